#pragma once

// Piece computation, C'(1/6) verification, and Dehn's algorithm. Pieces are
// common prefixes of two distinct places in the symmetrized closure (a place
// = relator instance x sign x cyclic offset); two places on the same signed
// relator cap the piece at |r|-1, which is what makes proper powers like a^6
// fail the metric. The metric ratio is kept as an exact rational.

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cgt/error.hpp"
#include "cgt/presentation.hpp"
#include "cgt/word.hpp"
#include "json.hpp"

namespace cgt {

// Concrete relators plus schema instances short enough to matter for Dehn
// steps on words of the given length (|instance| < 2 * word_length).
inline std::vector<Word> relevant_relators(const Presentation& p, long long word_length) {
  std::vector<Word> out = p.relators();
  for (const auto& sch : p.schemas())
    for (long long s : sch.index_set().elems()) {
      if (s == 0) continue;
      Word inst = sch.instantiate(s);
      if (inst.empty()) continue;
      if (static_cast<long long>(inst.size()) < 2 * word_length) out.push_back(canonical_relator(inst));
    }
  // canonical dedupe
  std::vector<Word> dedup;
  for (const Word& r : out) {
    Word c = canonical_relator(r);
    if (c.empty()) continue;
    bool seen = false;
    for (const Word& d : dedup)
      if (d == c) seen = true;
    if (!seen) dedup.push_back(std::move(c));
  }
  return dedup;
}

class SymmetrizedRelatorSet {
public:
  SymmetrizedRelatorSet(Presentation source, long long bound)
      : source_(std::move(source)), bound_(bound) {
    relators_ = source_.relators();
    for (const auto& sch : source_.schemas())
      for (Word& w : sch.instances(bound)) {
        Word c = canonical_relator(w);
        bool seen = false;
        for (const Word& d : relators_)
          if (d == c) seen = true;
        if (!seen && !c.empty()) relators_.push_back(std::move(c));
      }
  }

  const Presentation& source() const { return source_; }
  long long bound() const { return bound_; }
  const std::vector<Word>& relators() const { return relators_; }

  // All rotations of all relators and their inverses, deduped as words and
  // sorted; the word list Dehn matching scans.
  std::vector<Word> closure() const {
    std::vector<Word> out;
    for (const Word& r : relators_) {
      Word inv = invert(r);
      for (std::size_t k = 0; k < r.size(); ++k) {
        out.push_back(rotate(r, k));
        out.push_back(rotate(inv, k));
      }
    }
    std::sort(out.begin(), out.end(), word_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

private:
  Presentation source_;
  long long bound_;
  std::vector<Word> relators_;
};

struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d) {
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    return Rational{n / g, d / g};
  }
  bool less_than(long long n, long long d) const {
    return static_cast<__int128>(num) * d < static_cast<__int128>(n) * den;
  }
  bool operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
  }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

struct PieceReport {
  std::size_t max_piece_length = 0;
  Word witness_a, witness_b, witness_piece;
  Rational ratio; // max |piece| / |relator| over all relators
  std::size_t relator_count = 0;

  bool satisfies_c16() const { return ratio.less_than(1, 6); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["max_piece_length"] = max_piece_length;
    j["ratio"] = {{"num", ratio.num}, {"den", ratio.den}};
    j["satisfies_c16"] = satisfies_c16();
    j["relator_count"] = relator_count;
    if (max_piece_length > 0) {
      j["witness"] = {{"relator_a", print_word(witness_a)},
                      {"relator_b", print_word(witness_b)},
                      {"piece", print_word(witness_piece)}};
    }
    return j;
  }
};

namespace detail {

inline std::size_t lcp_len(const Word& a, const Word& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

struct Place {
  std::size_t rel;
  int sign;
  std::size_t offset;
  Word word;
};

inline PieceReport compute_pieces_words(const std::vector<Word>& relators) {
  std::vector<Place> places;
  for (std::size_t r = 0; r < relators.size(); ++r) {
    Word inv = invert(relators[r]);
    for (std::size_t k = 0; k < relators[r].size(); ++k) {
      places.push_back(Place{r, +1, k, rotate(relators[r], k)});
      places.push_back(Place{r, -1, k, rotate(inv, k)});
    }
  }

  PieceReport rep;
  rep.relator_count = relators.size();
  for (std::size_t i = 0; i < places.size(); ++i)
    for (std::size_t j = i + 1; j < places.size(); ++j) {
      const Place& pa = places[i];
      const Place& pb = places[j];
      std::size_t L = lcp_len(pa.word, pb.word);
      if (pa.rel == pb.rel && pa.sign == pb.sign) {
        // distinct cyclic offsets of one signed relator: proper pieces only
        L = std::min(L, relators[pa.rel].size() - 1);
      }
      if (L == 0) continue;
      for (const Place* p : {&pa, &pb}) {
        long long den = static_cast<long long>(relators[p->rel].size());
        Rational cand = Rational::of(static_cast<long long>(L), den);
        if (rep.ratio < cand) rep.ratio = cand;
      }
      if (L > rep.max_piece_length) {
        rep.max_piece_length = L;
        rep.witness_a = relators[pa.rel];
        rep.witness_b = relators[pb.rel];
        std::vector<Lit> piece(pa.word.lits().begin(), pa.word.lits().begin() + static_cast<std::ptrdiff_t>(L));
        rep.witness_piece = Word(std::move(piece));
      }
    }
  return rep;
}

inline Word least_rotation(const Word& w) {
  Word best = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    Word r = rotate(w, k);
    if (word_less(r, best)) best = r;
  }
  return best;
}

} // namespace detail

inline PieceReport compute_pieces(const SymmetrizedRelatorSet& rs) {
  return detail::compute_pieces_words(rs.relators());
}

inline PieceReport compute_pieces(const Presentation& p, long long bound) {
  return compute_pieces(SymmetrizedRelatorSet(p, bound));
}

// Dehn's algorithm on the cyclic word: freely and cyclically reduce, then
// while some cyclic subword matches more than half of a symmetrized relator,
// replace it by the inverse of the complement. The output is the canonical
// rotation of the Dehn-reduced cyclic word; it is empty iff w = 1 under
// C'(1/6) (Greendlinger).
inline Word dehn_reduce(const Presentation& p, const Word& w) {
  Word cur = detail::least_rotation(cyclic_reduce(w).first);
  std::vector<Word> rels = relevant_relators(p, static_cast<long long>(cur.size()));
  if (!rels.empty()) {
    PieceReport rep = detail::compute_pieces_words(rels);
    if (!rep.satisfies_c16())
      fail(errc::not_small_cancellation,
           "presentation is not C'(1/6) at the relevant truncation (ratio " + rep.ratio.str() + ")");
  }
  std::vector<Word> closure;
  for (const Word& r : rels) {
    Word inv = invert(r);
    for (std::size_t k = 0; k < r.size(); ++k) {
      closure.push_back(rotate(r, k));
      closure.push_back(rotate(inv, k));
    }
  }
  std::sort(closure.begin(), closure.end(), word_less);
  closure.erase(std::unique(closure.begin(), closure.end()), closure.end());

  while (!cur.empty()) {
    Word doubled = cur * cur;
    std::size_t best_len = 0, best_pos = 0, best_rel = 0;
    for (std::size_t ri = 0; ri < closure.size(); ++ri) {
      const Word& rhat = closure[ri];
      for (std::size_t i = 0; i < cur.size(); ++i) {
        std::size_t cap = std::min(cur.size(), rhat.size());
        std::size_t m = 0;
        while (m < cap && doubled[i + m] == rhat[m]) ++m;
        if (2 * m > rhat.size()) {
          if (m > best_len || (m == best_len && best_len > 0 && i < best_pos)) {
            best_len = m;
            best_pos = i;
            best_rel = ri;
          }
        }
      }
    }
    if (best_len == 0) break;
    const Word& rhat = closure[best_rel];
    std::vector<Lit> tail_complement(rhat.lits().begin() + static_cast<std::ptrdiff_t>(best_len),
                                     rhat.lits().end());
    Word rotated = rotate(cur, best_pos);
    std::vector<Lit> rest(rotated.lits().begin() + static_cast<std::ptrdiff_t>(best_len),
                          rotated.lits().end());
    cur = detail::least_rotation(cyclic_reduce(invert(Word(std::move(tail_complement))) * Word(std::move(rest))).first);
  }
  return cur;
}

// Word problem for C'(1/6) presentations via Greendlinger's lemma. J'-style
// presentations built with l < 13 are refused even when the measured metric
// happens to pass; the paper's claim covers l >= 13 only.
inline bool c16_is_identity(const Presentation& p, const Word& w) {
  auto it = p.meta().find("jprime_l");
  if (it != p.meta().end() && std::stoll(it->second) < 13)
    fail(errc::not_small_cancellation, "J'(l,S) decision requires l >= 13 (got l = " + it->second + ")");
  return dehn_reduce(p, w).empty();
}

} // namespace cgt
