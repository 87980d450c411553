#pragma once

// Presentations: finite generator lists, concrete relators (stored as
// canonical cyclic words), and relator schemas (families indexed by an
// integer set containing 0, e.g. j_1^s ... j_l^s over s in S).

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cgt/error.hpp"
#include "cgt/intmat.hpp"
#include "cgt/word.hpp"
#include "json.hpp"

namespace cgt {

// ---------------------------------------------------------------------------
// IntegerSet: finite, sorted, distinct, always contains 0.

class IntegerSet {
public:
  IntegerSet() : elems_{0} {}
  explicit IntegerSet(std::vector<long long> elems) {
    std::set<long long> s(elems.begin(), elems.end());
    s.insert(0);
    elems_.assign(s.begin(), s.end());
  }

  const std::vector<long long>& elems() const { return elems_; }
  bool contains(long long v) const { return std::binary_search(elems_.begin(), elems_.end(), v); }
  std::size_t size() const { return elems_.size(); }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < elems_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(elems_[i]);
    }
    return out + "}";
  }

  static IntegerSet parse(const std::string& text) {
    std::string t = text;
    auto l = t.find('{');
    auto r = t.rfind('}');
    if (l == std::string::npos || r == std::string::npos || r < l)
      fail(errc::parse, "integer set must look like {0,2,5}");
    std::vector<long long> elems;
    std::string body = t.substr(l + 1, r - l - 1);
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t pos = 0;
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      std::size_t end = item.size();
      while (end > pos && std::isspace(static_cast<unsigned char>(item[end - 1]))) --end;
      if (end == pos) continue;
      try {
        elems.push_back(std::stoll(item.substr(pos, end - pos)));
      } catch (const std::exception&) {
        fail(errc::parse, "bad integer '" + item + "' in set");
      }
    }
    return IntegerSet(std::move(elems));
  }

  bool operator==(const IntegerSet&) const = default;

private:
  std::vector<long long> elems_;
};

// ---------------------------------------------------------------------------
// Relator schemas: a product of factors base^(k*s) or base^k with one shared
// integer parameter s. The s = 0 instance always reduces to the empty word.

struct SchemaFactor {
  Word base;          // nonempty
  bool times_s = true; // exponent = exp * s when true, else exp
  long long exp = 1;
};

class RelatorSchema {
public:
  RelatorSchema(std::vector<SchemaFactor> factors, IntegerSet index_set)
      : factors_(std::move(factors)), set_(std::move(index_set)) {
    for (const auto& f : factors_)
      if (f.base.empty()) fail(errc::bad_schema, "schema factor with empty base");
    if (!reduce(instantiate(0)).empty())
      fail(errc::bad_schema, "schema template does not vanish at s = 0");
  }

  const std::vector<SchemaFactor>& factors() const { return factors_; }
  const IntegerSet& index_set() const { return set_; }

  Word instantiate(long long s) const {
    Word out;
    for (const auto& f : factors_) {
      long long e = f.times_s ? detail::checked(static_cast<__int128>(f.exp) * s) : f.exp;
      out.append(pow(f.base, e));
    }
    return reduce(out);
  }

  // All nonempty instances with |s| <= bound.
  std::vector<Word> instances(long long bound) const {
    std::vector<Word> out;
    for (long long s : set_.elems()) {
      if (s == 0 || std::llabs(s) > bound) continue;
      Word w = instantiate(s);
      if (!w.empty()) out.push_back(w);
    }
    return out;
  }

  RelatorSchema mapped(const GeneratorMap& m) const {
    std::vector<SchemaFactor> out;
    for (const auto& f : factors_) {
      Word img = substitute(m, f.base);
      if (img.empty()) continue;
      out.push_back(SchemaFactor{img, f.times_s, f.exp});
    }
    return RelatorSchema(std::move(out), set_);
  }

  bool uses(GenId g) const {
    for (const auto& f : factors_)
      for (Lit l : f.base)
        if (lit_gen(l) == g) return true;
    return false;
  }

private:
  std::vector<SchemaFactor> factors_;
  IntegerSet set_;
};

namespace detail {

inline std::string print_schema_template(const RelatorSchema& sch) {
  std::string out;
  for (const auto& f : sch.factors()) {
    if (!out.empty()) out += ' ';
    if (!f.times_s) {
      out += print_word(pow(f.base, f.exp));
      continue;
    }
    if (f.base.size() == 1)
      out += print_word(f.base);
    else
      out += "(" + print_word(f.base) + ")";
    out += "^";
    if (f.exp == -1)
      out += "-s";
    else if (f.exp == 1)
      out += "s";
    else
      out += std::to_string(f.exp) + "s";
  }
  return out;
}

// Splits "j_1^s (x y)^-s c_0^3" into factors.
inline std::vector<SchemaFactor> parse_schema_template(const std::string& text, const Alphabet* scope) {
  std::vector<SchemaFactor> out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto parse_s_exp = [&](const std::string& es) -> std::optional<long long> {
    // "s", "-s", "2s", "-2s"
    if (es.empty() || es.back() != 's') return std::nullopt;
    std::string num = es.substr(0, es.size() - 1);
    if (num.empty()) return 1;
    if (num == "-") return -1;
    try {
      return std::stoll(num);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  while (true) {
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] == '(') {
      std::size_t close = text.find(')', i);
      if (close == std::string::npos) fail(errc::parse, "unbalanced '(' in schema template");
      Word base = parse_word(text.substr(i + 1, close - i - 1), scope);
      if (base.empty()) fail(errc::bad_schema, "empty parenthesized base in schema");
      i = close + 1;
      if (i >= text.size() || text[i] != '^') fail(errc::parse, "parenthesized base needs an exponent");
      ++i;
      std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::string es = text.substr(start, i - start);
      if (auto k = parse_s_exp(es)) {
        out.push_back(SchemaFactor{base, true, *k});
      } else {
        try {
          out.push_back(SchemaFactor{base, false, std::stoll(es)});
        } catch (const std::exception&) {
          fail(errc::parse, "bad exponent '" + es + "' in schema template");
        }
      }
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string tok = text.substr(start, i - start);
    auto caret = tok.rfind('^');
    std::optional<long long> k;
    if (caret != std::string::npos) k = parse_s_exp(tok.substr(caret + 1));
    if (k) {
      Word base = parse_word(tok.substr(0, caret), scope);
      if (base.size() != 1) fail(errc::parse, "bad base letter in '" + tok + "'");
      out.push_back(SchemaFactor{base, true, *k});
    } else {
      Word w = parse_word(tok, scope); // plain letters / powers
      if (w.empty()) continue;
      // normalize a constant run into one factor
      Word base = Word::letter(lit_gen(w[0]), 1);
      long long e = 0;
      for (Lit l : w) {
        if (lit_gen(l) != lit_gen(w[0]) || lit_sign(l) != lit_sign(w[0]))
          fail(errc::parse, "mixed constant token '" + tok + "' in schema template");
        e += lit_sign(l);
      }
      out.push_back(SchemaFactor{base, false, e});
    }
  }
  return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Relator canonicalization: the lexicographically least cyclic rotation of the
// cyclic core and of its inverse. Used for storage and deduplication.

inline Word canonical_relator(const Word& w) {
  Word core = cyclic_reduce(w).first;
  if (core.empty()) return core;
  Word best = core;
  Word inv = invert(core);
  for (std::size_t k = 0; k < core.size(); ++k) {
    Word r1 = rotate(core, k);
    if (word_less(r1, best)) best = r1;
    Word r2 = rotate(inv, k);
    if (word_less(r2, best)) best = r2;
  }
  return best;
}

// ---------------------------------------------------------------------------

class Presentation {
public:
  Presentation() = default;
  explicit Presentation(Alphabet gens) : gens_(std::move(gens)) {}

  const Alphabet& gens() const { return gens_; }
  const std::vector<Word>& relators() const { return relators_; }
  const std::vector<RelatorSchema>& schemas() const { return schemas_; }
  const std::vector<GenId>& marked() const { return marked_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  void add_relator(const Word& w) {
    if (!gens_.contains_word(w))
      fail(errc::undeclared_generator, "relator uses a generator outside the presentation");
    Word c = canonical_relator(w);
    if (c.empty()) return;
    for (const Word& r : relators_)
      if (r == c) return;
    relators_.push_back(std::move(c));
  }

  void add_schema(RelatorSchema sch) {
    for (const auto& f : sch.factors())
      if (!gens_.contains_word(f.base))
        fail(errc::undeclared_generator, "schema uses a generator outside the presentation");
    schemas_.push_back(std::move(sch));
  }

  void set_marked(std::vector<GenId> m) {
    for (GenId g : m)
      if (!gens_.contains(g)) fail(errc::constraint, "marked generator not declared");
    marked_ = std::move(m);
  }

  void set_meta(const std::string& k, const std::string& v) { meta_[k] = v; }

  // Concrete relators plus schema instances with |s| <= bound.
  std::vector<Word> relators_truncated(long long bound) const {
    std::vector<Word> out = relators_;
    for (const auto& sch : schemas_)
      for (Word& w : sch.instances(bound)) out.push_back(std::move(w));
    return out;
  }

  bool has_schemas() const { return !schemas_.empty(); }

private:
  Alphabet gens_;
  std::vector<Word> relators_;
  std::vector<RelatorSchema> schemas_;
  std::vector<GenId> marked_;
  std::map<std::string, std::string> meta_;
};

// One row per relator (schemas truncated to |s| <= bound), one column per
// generator, entries = exponent sums.
inline IntMat abelianized_relation_matrix(const Presentation& p, long long bound) {
  std::vector<Word> rels = p.relators_truncated(bound);
  IntMat m(rels.size(), p.gens().size());
  for (std::size_t i = 0; i < rels.size(); ++i)
    for (std::size_t j = 0; j < p.gens().size(); ++j) m.at(i, j) = exponent_sum(rels[i], p.gens()[j]);
  return m;
}

inline IntVec exponent_vector(const Presentation& p, const Word& w) {
  IntVec v(p.gens().size());
  for (std::size_t j = 0; j < p.gens().size(); ++j) v[j] = exponent_sum(w, p.gens()[j]);
  return v;
}

// ---------------------------------------------------------------------------
// HNN extension.

struct HNNDescriptor {
  Presentation base;
  GenId stable;
  std::vector<std::pair<Word, Word>> pairs; // stable^-1 * first * stable = second
};

inline Presentation hnn_extend(const HNNDescriptor& d) {
  if (d.base.gens().contains(d.stable))
    fail(errc::alphabet_collision, "stable letter " + gen_display(d.stable) + " already in base alphabet");
  for (const auto& [a, b] : d.pairs)
    if (!d.base.gens().contains_word(a) || !d.base.gens().contains_word(b))
      fail(errc::alphabet_error, "associated pair words must lie over the base alphabet");

  Alphabet gens = d.base.gens();
  gens.add(d.stable);
  Presentation out(gens);
  for (const Word& r : d.base.relators()) out.add_relator(r);
  for (const auto& sch : d.base.schemas()) out.add_schema(sch);
  Word t = Word::letter(d.stable);
  for (const auto& [a, b] : d.pairs) out.add_relator(invert(t) * a * t * invert(b));
  out.set_marked(d.base.marked());
  return out;
}

// ---------------------------------------------------------------------------
// Amalgamated free product: union plus identification relators a b^-1.

inline Presentation amalgamated_product(const Presentation& p, const Presentation& q,
                                        const std::vector<std::pair<Word, Word>>& pairs) {
  if (!p.gens().disjoint(q.gens()))
    fail(errc::alphabet_collision, "amalgamated product requires disjoint alphabets");
  for (const auto& [a, b] : pairs)
    if (!p.gens().contains_word(a) || !q.gens().contains_word(b))
      fail(errc::alphabet_error, "amalgamation pair must be (p-word, q-word)");

  Presentation out(Alphabet::merged(p.gens(), q.gens()));
  for (const Word& r : p.relators()) out.add_relator(r);
  for (const Word& r : q.relators()) out.add_relator(r);
  for (const auto& sch : p.schemas()) out.add_schema(sch);
  for (const auto& sch : q.schemas()) out.add_schema(sch);
  for (const auto& [a, b] : pairs) out.add_relator(a * invert(b));
  return out;
}

// Direct product: union plus all commutators [x, y].
inline Presentation direct_product(const Presentation& p, const Presentation& q) {
  if (!p.gens().disjoint(q.gens()))
    fail(errc::alphabet_collision, "direct product requires disjoint alphabets");
  Presentation out(Alphabet::merged(p.gens(), q.gens()));
  for (const Word& r : p.relators()) out.add_relator(r);
  for (const Word& r : q.relators()) out.add_relator(r);
  for (const auto& sch : p.schemas()) out.add_schema(sch);
  for (const auto& sch : q.schemas()) out.add_schema(sch);
  for (GenId x : p.gens().gens())
    for (GenId y : q.gens().gens()) {
      Word wx = Word::letter(x), wy = Word::letter(y);
      out.add_relator(wx * wy * invert(wx) * invert(wy));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Tietze elimination of one generator with a defining relator g * defining^-1.

inline Presentation tietze_eliminate(const Presentation& p, GenId g, const Word& defining) {
  if (!p.gens().contains(g)) fail(errc::constraint, "cannot eliminate undeclared generator");
  for (Lit l : defining)
    if (lit_gen(l) == g)
      fail(errc::self_referential_definition, gen_display(g) + " occurs in its own definition");
  if (!p.gens().contains_word(defining))
    fail(errc::undeclared_generator, "defining word leaves the alphabet");

  Word target = canonical_relator(Word::letter(g) * invert(defining));
  std::optional<std::size_t> defining_idx;
  for (std::size_t i = 0; i < p.relators().size(); ++i)
    if (p.relators()[i] == target) {
      defining_idx = i;
      break;
    }
  if (!defining_idx)
    fail(errc::no_defining_relator,
         "no relator freely equal to " + gen_display(g) + " * defining^-1");

  Alphabet gens;
  for (GenId x : p.gens().gens())
    if (x != g) gens.add(x);

  GeneratorMap m(p.gens(), gens);
  for (GenId x : p.gens().gens()) m.set(x, x == g ? defining : Word::letter(x));

  Presentation out(gens);
  for (std::size_t i = 0; i < p.relators().size(); ++i) {
    if (i == *defining_idx) continue;
    out.add_relator(substitute(m, p.relators()[i]));
  }
  for (const auto& sch : p.schemas()) out.add_schema(sch.mapped(m));

  std::vector<GenId> marked;
  for (GenId x : p.marked())
    if (x != g) marked.push_back(x);
  out.set_marked(marked);
  for (const auto& [k, v] : p.meta()) out.set_meta(k, v);
  std::string log = out.meta().count("eliminated") ? out.meta().at("eliminated") + ";" : "";
  out.set_meta("eliminated", log + gen_display(g) + "=" + print_word(defining));
  return out;
}

// Deterministic defining-word discovery: the first stored relator containing
// exactly one occurrence of g, rotated so that occurrence leads.
inline std::optional<Word> find_defining_word(const Presentation& p, GenId g) {
  for (const Word& r : p.relators()) {
    std::size_t count = 0, pos = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (lit_gen(r[i]) == g) {
        ++count;
        pos = i;
      }
    if (count != 1) continue;
    Word rot = rotate(r, pos); // the g^\pm occurrence leads
    if (lit_sign(rot[0]) < 0) {
      rot = invert(rot);                 // puts g^+ last
      rot = rotate(rot, rot.size() - 1); // and back to the front
    }
    // rot = g * tail as a relator, so g is defined by tail^-1
    std::vector<Lit> tail(rot.lits().begin() + 1, rot.lits().end());
    return reduce(invert(Word(std::move(tail))));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Text format:
//   gens: a b c_0
//   rel: a b a' b'
//   schema: j_1^s j_2^s for s in {0,2}

inline std::string print_presentation(const Presentation& p) {
  std::string out = "gens:";
  for (GenId g : p.gens().gens()) out += " " + gen_display(g);
  out += "\n";
  for (const Word& r : p.relators()) out += "rel: " + print_word(r) + "\n";
  for (const auto& sch : p.schemas())
    out += "schema: " + detail::print_schema_template(sch) + " for s in " + sch.index_set().str() + "\n";
  return out;
}

inline Presentation parse_presentation(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::optional<Alphabet> gens;
  std::vector<std::pair<int, std::string>> rel_lines, schema_lines;

  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    auto starts = [&](const char* k) { return line.compare(pos, std::string(k).size(), k) == 0; };
    try {
      if (starts("gens:")) {
        if (gens) fail(errc::parse, "duplicate gens: line");
        Alphabet a;
        std::istringstream gl(line.substr(pos + 5));
        std::string tok;
        while (gl >> tok) {
          auto lt = detail::parse_letter_token(tok);
          if (lt.exp != 1) fail(errc::parse, "generator declarations take no exponent");
          a.add(intern_gen(lt.key.ns, lt.key.name, lt.key.index));
        }
        gens = std::move(a);
      } else if (starts("rel:")) {
        rel_lines.emplace_back(lineno, line.substr(pos + 4));
      } else if (starts("schema:")) {
        schema_lines.emplace_back(lineno, line.substr(pos + 7));
      } else {
        fail(errc::parse, "unknown line kind");
      }
    } catch (const error& e) {
      throw error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!gens) fail(errc::parse, "missing gens: line");

  Presentation p(*gens);
  for (const auto& [ln, body] : rel_lines) {
    try {
      p.add_relator(parse_word(body, &p.gens()));
    } catch (const error& e) {
      throw error(e.code(), "line " + std::to_string(ln) + ": " + e.what());
    }
  }
  for (const auto& [ln, body] : schema_lines) {
    try {
      auto sep = body.find(" for s in ");
      if (sep == std::string::npos) fail(errc::parse, "schema line needs ' for s in {..}'");
      auto factors = detail::parse_schema_template(body.substr(0, sep), &p.gens());
      IntegerSet set = IntegerSet::parse(body.substr(sep + 10));
      p.add_schema(RelatorSchema(std::move(factors), std::move(set)));
    } catch (const error& e) {
      throw error(e.code(), "line " + std::to_string(ln) + ": " + e.what());
    }
  }
  return p;
}

// JSON mirror with the same field names.
inline nlohmann::ordered_json presentation_to_json(const Presentation& p) {
  nlohmann::ordered_json j;
  j["gens"] = nlohmann::ordered_json::array();
  for (GenId g : p.gens().gens()) j["gens"].push_back(gen_display(g));
  j["rels"] = nlohmann::ordered_json::array();
  for (const Word& r : p.relators()) j["rels"].push_back(print_word(r));
  j["schemas"] = nlohmann::ordered_json::array();
  for (const auto& sch : p.schemas()) {
    nlohmann::ordered_json js;
    js["template"] = detail::print_schema_template(sch);
    js["set"] = sch.index_set().elems();
    j["schemas"].push_back(js);
  }
  if (!p.marked().empty()) {
    j["marked"] = nlohmann::ordered_json::array();
    for (GenId g : p.marked()) j["marked"].push_back(gen_display(g));
  }
  if (!p.meta().empty()) j["meta"] = p.meta();
  return j;
}

inline Presentation presentation_from_json(const nlohmann::json& j) {
  Alphabet a;
  for (const auto& s : j.at("gens")) {
    auto lt = detail::parse_letter_token(s.get<std::string>());
    a.add(intern_gen(lt.key.ns, lt.key.name, lt.key.index));
  }
  Presentation p(a);
  if (j.contains("rels"))
    for (const auto& s : j.at("rels")) p.add_relator(parse_word(s.get<std::string>(), &p.gens()));
  if (j.contains("schemas"))
    for (const auto& js : j.at("schemas")) {
      auto factors = detail::parse_schema_template(js.at("template").get<std::string>(), &p.gens());
      IntegerSet set{js.at("set").get<std::vector<long long>>()};
      p.add_schema(RelatorSchema(std::move(factors), std::move(set)));
    }
  if (j.contains("marked")) {
    std::vector<GenId> marked;
    for (const auto& s : j.at("marked")) {
      auto lt = detail::parse_letter_token(s.get<std::string>());
      marked.push_back(intern_gen(lt.key.ns, lt.key.name, lt.key.index));
    }
    p.set_marked(marked);
  }
  if (j.contains("meta"))
    for (const auto& [k, v] : j.at("meta").items()) p.set_meta(k, v.get<std::string>());
  return p;
}

} // namespace cgt
