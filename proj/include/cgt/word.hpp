#pragma once

// Free-group words over a global interned generator table. Letters are stored
// as signed 32-bit codes: +(id+1) for a generator, -(id+1) for its inverse.
// Words are plain letter sequences; they are not implicitly reduced (the Godel
// numbering needs raw words), reduce() gives the free-group normal form.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cgt/error.hpp"

namespace cgt {

using GenId = std::int32_t;
using Lit = std::int32_t; // +(id+1) / -(id+1)

constexpr int kNoIndex = -1;

struct GenKey {
  std::string ns;   // may be empty
  std::string name; // identifier, no underscores
  int index = kNoIndex;

  auto operator<=>(const GenKey&) const = default;
};

namespace detail {

inline bool valid_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  return true;
}

class SymbolTable {
public:
  static SymbolTable& instance() {
    static SymbolTable t;
    return t;
  }

  GenId intern(const GenKey& k) {
    if (!detail::valid_ident(k.name) || (!k.ns.empty() && !detail::valid_ident(k.ns)))
      fail(errc::constraint, "invalid generator name '" + k.ns + "." + k.name + "'");
    if (k.index < kNoIndex) fail(errc::constraint, "negative generator index");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    GenId id = static_cast<GenId>(keys_.size());
    keys_.push_back(k);
    ids_.emplace(k, id);
    return id;
  }

  const GenKey& key(GenId id) const {
    std::lock_guard<std::mutex> lock(mu_);
    // deque: references stay valid across later interns
    return keys_.at(static_cast<std::size_t>(id));
  }

private:
  mutable std::mutex mu_;
  std::deque<GenKey> keys_;
  std::map<GenKey, GenId> ids_;
};

} // namespace detail

inline GenId intern_gen(const std::string& ns, const std::string& name, int index = kNoIndex) {
  return detail::SymbolTable::instance().intern(GenKey{ns, name, index});
}

inline const GenKey& gen_key(GenId id) { return detail::SymbolTable::instance().key(id); }

inline std::string gen_display(GenId id) {
  const GenKey& k = gen_key(id);
  std::string s;
  if (!k.ns.empty()) {
    s += k.ns;
    s += '.';
  }
  s += k.name;
  if (k.index != kNoIndex) {
    s += '_';
    s += std::to_string(k.index);
  }
  return s;
}

struct Letter {
  GenId gen;
  int sign; // +1 or -1
};

inline Lit make_lit(GenId g, int sign) { return sign > 0 ? g + 1 : -(g + 1); }
inline Lit make_lit(const Letter& l) { return make_lit(l.gen, l.sign); }
inline GenId lit_gen(Lit l) { return (l > 0 ? l : -l) - 1; }
inline int lit_sign(Lit l) { return l > 0 ? 1 : -1; }
inline Letter lit_letter(Lit l) { return Letter{lit_gen(l), lit_sign(l)}; }

// Deterministic letter order: (ns, name, index), positive before negative.
// Independent of interning order, so canonical forms are stable across runs.
inline bool lit_less(Lit a, Lit b) {
  if (a == b) return false;
  const GenKey& ka = gen_key(lit_gen(a));
  const GenKey& kb = gen_key(lit_gen(b));
  if (ka != kb) return ka < kb;
  return lit_sign(a) > lit_sign(b);
}

class Word {
public:
  Word() = default;
  explicit Word(std::vector<Lit> lits) : lits_(std::move(lits)) {}
  Word(std::initializer_list<Lit> lits) : lits_(lits) {}

  static Word letter(GenId g, int sign = 1) { return Word({make_lit(g, sign)}); }

  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  Lit operator[](std::size_t i) const { return lits_[i]; }
  const std::vector<Lit>& lits() const { return lits_; }

  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }

  void push_back(Lit l) { lits_.push_back(l); }
  void append(const Word& w) { lits_.insert(lits_.end(), w.lits_.begin(), w.lits_.end()); }

  bool operator==(const Word&) const = default;

private:
  std::vector<Lit> lits_;
};

inline Word operator*(const Word& a, const Word& b) {
  Word r = a;
  r.append(b);
  return r;
}

inline Word invert(const Word& w) {
  std::vector<Lit> out;
  out.reserve(w.size());
  for (auto it = w.lits().rbegin(); it != w.lits().rend(); ++it) out.push_back(-*it);
  return Word(std::move(out));
}

inline Word pow(const Word& w, long long k) {
  Word base = k >= 0 ? w : invert(w);
  long long n = k >= 0 ? k : -k;
  if (n > 0 && static_cast<unsigned long long>(n) * w.size() > (1ull << 27))
    fail(errc::overflow, "word power too large to materialize");
  Word out;
  for (long long i = 0; i < n; ++i) out.append(base);
  return out;
}

inline Word reduce(const Word& w) {
  std::vector<Lit> stack;
  stack.reserve(w.size());
  for (Lit l : w) {
    if (!stack.empty() && stack.back() == -l)
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(std::move(stack));
}

inline bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == -w[i - 1]) return false;
  return true;
}

inline bool freely_equal(const Word& a, const Word& b) { return reduce(a * invert(b)).empty(); }

// (core, conjugator): w = conjugator * core * conjugator^-1, core cyclically reduced.
inline std::pair<Word, Word> cyclic_reduce(const Word& w) {
  Word r = reduce(w);
  std::size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
    ++lo;
    --hi;
  }
  std::vector<Lit> core(r.lits().begin() + static_cast<std::ptrdiff_t>(lo),
                        r.lits().begin() + static_cast<std::ptrdiff_t>(hi));
  std::vector<Lit> conj(r.lits().begin(), r.lits().begin() + static_cast<std::ptrdiff_t>(lo));
  return {Word(std::move(core)), Word(std::move(conj))};
}

inline bool is_cyclically_reduced(const Word& w) {
  if (!is_reduced(w)) return false;
  return w.size() < 2 || w[0] != -w[w.size() - 1];
}

inline long long exponent_sum(const Word& w, GenId g) {
  long long s = 0;
  for (Lit l : w)
    if (lit_gen(l) == g) s += lit_sign(l);
  return s;
}

inline Word rotate(const Word& w, std::size_t k) {
  if (w.empty()) return w;
  k %= w.size();
  std::vector<Lit> out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w[(i + k) % w.size()]);
  return Word(std::move(out));
}

inline bool word_less(const Word& a, const Word& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return lit_less(a[i], b[i]);
  }
  return a.size() < b.size();
}

// ---------------------------------------------------------------------------
// Alphabet: an ordered set of generators with display-name lookup.

class Alphabet {
public:
  Alphabet() = default;
  explicit Alphabet(std::vector<GenId> gens) {
    for (GenId g : gens) add(g);
  }

  void add(GenId g) {
    if (set_.count(g)) fail(errc::alphabet_collision, "duplicate generator " + gen_display(g));
    order_.push_back(g);
    set_.insert(g);
  }

  bool contains(GenId g) const { return set_.count(g) != 0; }
  bool contains_word(const Word& w) const {
    for (Lit l : w)
      if (!contains(lit_gen(l))) return false;
    return true;
  }

  std::size_t size() const { return order_.size(); }
  const std::vector<GenId>& gens() const { return order_; }
  GenId operator[](std::size_t i) const { return order_[i]; }

  std::optional<GenId> find_display(const std::string& disp) const {
    for (GenId g : order_)
      if (gen_display(g) == disp) return g;
    return std::nullopt;
  }

  std::optional<std::size_t> position(GenId g) const {
    for (std::size_t i = 0; i < order_.size(); ++i)
      if (order_[i] == g) return i;
    return std::nullopt;
  }

  bool disjoint(const Alphabet& other) const {
    for (GenId g : order_)
      if (other.contains(g)) return false;
    return true;
  }

  static Alphabet merged(const Alphabet& a, const Alphabet& b) {
    Alphabet out = a;
    for (GenId g : b.gens()) out.add(g);
    return out;
  }

  bool operator==(const Alphabet& o) const { return order_ == o.order_; }

private:
  std::vector<GenId> order_;
  std::unordered_set<GenId> set_;
};

// ---------------------------------------------------------------------------
// GeneratorMap: a homomorphism of free groups given on an alphabet.

class GeneratorMap {
public:
  GeneratorMap() = default;
  GeneratorMap(Alphabet domain, Alphabet codomain) : domain_(std::move(domain)), codomain_(std::move(codomain)) {}

  void set(GenId g, Word image) {
    if (!domain_.contains(g)) fail(errc::unmapped_generator, gen_display(g) + " not in map domain");
    if (!codomain_.contains_word(image))
      fail(errc::alphabet_error, "image of " + gen_display(g) + " leaves the codomain alphabet");
    images_[g] = std::move(image);
  }

  const Alphabet& domain() const { return domain_; }
  const Alphabet& codomain() const { return codomain_; }

  const Word& image(GenId g) const {
    auto it = images_.find(g);
    if (it == images_.end()) fail(errc::unmapped_generator, "no image for " + gen_display(g));
    return it->second;
  }

  bool total() const {
    for (GenId g : domain_.gens())
      if (!images_.count(g)) return false;
    return true;
  }

  static GeneratorMap identity(const Alphabet& a) {
    GeneratorMap m(a, a);
    for (GenId g : a.gens()) m.set(g, Word::letter(g));
    return m;
  }

private:
  Alphabet domain_;
  Alphabet codomain_;
  std::unordered_map<GenId, Word> images_;
};

inline Word substitute(const GeneratorMap& m, const Word& w) {
  Word out;
  for (Lit l : w) {
    const Word& img = m.image(lit_gen(l));
    if (lit_sign(l) > 0)
      out.append(img);
    else
      out.append(invert(img));
  }
  return reduce(out);
}

// ---------------------------------------------------------------------------
// Text syntax. One word = whitespace-separated letters; a letter is
//   [ns.]name[_index]['|^k]
// with ' meaning inverse and ^k an integer power (applied to that letter).
// Printing is canonical: maximal runs of one letter print as g, g', g^k, g^-k.

namespace detail {

struct LetterToken {
  GenKey key;
  long long exp; // signed; expands to |exp| copies
};

inline LetterToken parse_letter_token(const std::string& tok) {
  std::size_t i = 0;
  auto ident = [&]() -> std::string {
    std::size_t start = i;
    if (i < tok.size() && std::isalpha(static_cast<unsigned char>(tok[i]))) {
      ++i;
      while (i < tok.size() && std::isalnum(static_cast<unsigned char>(tok[i]))) ++i;
    }
    return tok.substr(start, i - start);
  };

  GenKey key;
  std::string first = ident();
  if (first.empty()) fail(errc::parse, "bad letter token '" + tok + "'");
  if (i < tok.size() && tok[i] == '.') {
    ++i;
    key.ns = first;
    key.name = ident();
    if (key.name.empty()) fail(errc::parse, "bad letter token '" + tok + "'");
  } else {
    key.name = first;
  }
  if (i < tok.size() && tok[i] == '_') {
    ++i;
    std::size_t start = i;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
    if (i == start) fail(errc::parse, "bad generator index in '" + tok + "'");
    key.index = std::stoi(tok.substr(start, i - start));
  }

  long long exp = 1;
  if (i < tok.size() && tok[i] == '\'') {
    ++i;
    exp = -1;
  } else if (i < tok.size() && tok[i] == '^') {
    ++i;
    std::size_t start = i;
    if (i < tok.size() && tok[i] == '-') ++i;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
    if (i == start || (tok[start] == '-' && i == start + 1))
      fail(errc::parse, "bad exponent in '" + tok + "'");
    exp = std::stoll(tok.substr(start, i - start));
  }
  if (i != tok.size()) fail(errc::parse, "trailing characters in letter '" + tok + "'");
  return LetterToken{key, exp};
}

} // namespace detail

// Parses a word. With a scope alphabet, every letter must resolve to a
// declared generator (undeclared-generator error); without one, generators
// are interned on sight.
inline Word parse_word(const std::string& text, const Alphabet* scope = nullptr) {
  Word out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "1") continue; // the empty word prints as "1"
    auto lt = detail::parse_letter_token(tok);
    GenId g = intern_gen(lt.key.ns, lt.key.name, lt.key.index);
    if (scope && !scope->contains(g))
      fail(errc::undeclared_generator, "undeclared generator '" + gen_display(g) + "'");
    if (std::llabs(lt.exp) > (1 << 22)) fail(errc::overflow, "letter power too large");
    for (long long k = 0; k < std::llabs(lt.exp); ++k) out.push_back(make_lit(g, lt.exp > 0 ? 1 : -1));
  }
  return out;
}

inline std::string print_word(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    std::size_t run = j - i;
    if (!out.empty()) out += ' ';
    out += gen_display(lit_gen(w[i]));
    if (lit_sign(w[i]) > 0) {
      if (run > 1) out += "^" + std::to_string(run);
    } else {
      if (run == 1)
        out += "'";
      else
        out += "^-" + std::to_string(run);
    }
    i = j;
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Word& w) { return os << print_word(w); }

} // namespace cgt

namespace std {
template <>
struct hash<cgt::Word> {
  std::size_t operator()(const cgt::Word& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (cgt::Lit l : w) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(l));
      h *= 1099511628211ull;
    }
    return h;
  }
};
} // namespace std
