#pragma once

// Britton's-lemma reduction for HNN extensions with free base group and
// finitely generated associated subgroups given as folded graphs. A pinch
// t^-1 a t (a in A) rewrites a through express() and the index-aligned record
// correspondence A_i -> B_i; t b t^-1 goes the other way.

#include <optional>
#include <random>
#include <vector>

#include "cgt/error.hpp"
#include "cgt/stallings.hpp"
#include "cgt/word.hpp"

namespace cgt {

class BrittonHNN {
public:
  BrittonHNN(Alphabet base_alphabet, GenId stable, SubgroupGraph assocA, SubgroupGraph assocB)
      : base_(std::move(base_alphabet)), stable_(stable), a_(std::move(assocA)), b_(std::move(assocB)) {
    if (base_.contains(stable_)) fail(errc::alphabet_collision, "stable letter lies in the base alphabet");
    if (a_.generators_of_record().size() != b_.generators_of_record().size())
      fail(errc::constraint, "associated subgroups need matching record lengths");
    if (a_.rank() != a_.generators_of_record().size() || b_.rank() != b_.generators_of_record().size())
      fail(errc::constraint, "record generators must be a free basis on both sides");
  }

  const Alphabet& base_alphabet() const { return base_; }
  GenId stable() const { return stable_; }
  const SubgroupGraph& assocA() const { return a_; }
  const SubgroupGraph& assocB() const { return b_; }

  // Rewrites a member of one side through the record correspondence.
  Word across(const Word& w, bool a_to_b) const {
    const SubgroupGraph& from = a_to_b ? a_ : b_;
    const SubgroupGraph& to = a_to_b ? b_ : a_;
    Word expr = express(from, w);
    Word out;
    for (Lit l : expr) {
      auto pos = from.record_alphabet().position(lit_gen(l));
      const Word& img = to.generators_of_record()[*pos];
      if (lit_sign(l) > 0)
        out.append(img);
      else
        out.append(invert(img));
    }
    return reduce(out);
  }

private:
  Alphabet base_;
  GenId stable_;
  SubgroupGraph a_;
  SubgroupGraph b_;
};

// The whole free group on `base` as a folded graph (record = the basis).
inline SubgroupGraph full_group_graph(const Alphabet& base, const std::string& record_ns = "sub") {
  std::vector<Word> gens;
  for (GenId g : base.gens()) gens.push_back(Word::letter(g));
  return fold(gens, record_ns);
}

// Ascending HNN extension t^-1 x t = phi(x): A is the whole base group,
// B = phi(base) with records aligned generator-by-generator.
inline BrittonHNN ascending_hnn(const Alphabet& base, GenId stable, const GeneratorMap& phi) {
  std::vector<Word> images;
  for (GenId g : base.gens()) images.push_back(phi.image(g));
  return BrittonHNN(base, stable, full_group_graph(base, "hnnA"), fold(images, "hnnB"));
}

namespace detail {

struct Pinch {
  std::size_t lo; // index of the opening stable letter
  std::size_t hi; // index of the closing stable letter
  bool a_side;    // t^-1 a t when true, t b t^-1 when false
};

inline std::vector<Pinch> find_pinches(const BrittonHNN& h, const Word& w) {
  std::vector<std::size_t> tpos;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (lit_gen(w[i]) == h.stable()) tpos.push_back(i);
  std::vector<Pinch> out;
  for (std::size_t k = 0; k + 1 < tpos.size(); ++k) {
    std::size_t i = tpos[k], j = tpos[k + 1];
    if (lit_sign(w[i]) == lit_sign(w[j])) continue;
    std::vector<Lit> seg(w.lits().begin() + static_cast<std::ptrdiff_t>(i) + 1,
                         w.lits().begin() + static_cast<std::ptrdiff_t>(j));
    Word s(std::move(seg));
    bool a_side = lit_sign(w[i]) < 0;
    const SubgroupGraph& g = a_side ? h.assocA() : h.assocB();
    if (contains(g, s)) out.push_back(Pinch{i, j, a_side});
  }
  return out;
}

inline Word apply_pinch(const BrittonHNN& h, const Word& w, const Pinch& p) {
  std::vector<Lit> seg(w.lits().begin() + static_cast<std::ptrdiff_t>(p.lo) + 1,
                       w.lits().begin() + static_cast<std::ptrdiff_t>(p.hi));
  Word mid = h.across(Word(std::move(seg)), p.a_side);
  Word out;
  for (std::size_t i = 0; i < p.lo; ++i) out.push_back(w[i]);
  out.append(mid);
  for (std::size_t i = p.hi + 1; i < w.size(); ++i) out.push_back(w[i]);
  return reduce(out);
}

} // namespace detail

// Leftmost-innermost pinch removal; rng, when given, randomizes the pinch
// choice (the decision must not depend on it).
inline Word britton_reduce(const BrittonHNN& h, const Word& w, std::mt19937_64* rng = nullptr) {
  Word cur = reduce(w);
  while (true) {
    auto pinches = detail::find_pinches(h, cur);
    if (pinches.empty()) return cur;
    const detail::Pinch& p =
        rng ? pinches[std::uniform_int_distribution<std::size_t>(0, pinches.size() - 1)(*rng)] : pinches.front();
    cur = detail::apply_pinch(h, cur, p);
  }
}

inline bool hnn_is_identity(const BrittonHNN& h, const Word& w, std::mt19937_64* rng = nullptr) {
  Word r = britton_reduce(h, w, rng);
  for (Lit l : r)
    if (lit_gen(l) == h.stable()) return false;
  return r.empty();
}

} // namespace cgt
