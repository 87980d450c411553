#pragma once

// Finite-truncation homology checker: build the radius-rho ball of the
// partial Cayley complex whose 2-cells come from the first m (designated)
// relators, then search for an integral 2-chain with a prescribed boundary
// loop by exact integer linear algebra. Absence of a certificate at a finite
// radius is inconclusive, never a refutation.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgt/error.hpp"
#include "cgt/intmat.hpp"
#include "cgt/presentation.hpp"
#include "cgt/smallcancel.hpp"
#include "cgt/word.hpp"
#include "json.hpp"

namespace cgt {

// Word-problem oracle for the group presented by the generators and the
// designated relators; is_identity must be sound and complete there.
struct WordOracle {
  std::string name;
  std::function<bool(const Word&)> is_identity;
};

inline WordOracle oracle_free() {
  return WordOracle{"free", [](const Word& w) { return reduce(w).empty(); }};
}

inline WordOracle oracle_trivial() {
  return WordOracle{"trivial", [](const Word&) { return true; }};
}

// Exact for presentations of abelian groups: equality holds iff the exponent
// vector difference lies in the relation row span.
inline WordOracle oracle_abelian(const Presentation& p, long long schema_bound = 8) {
  IntMat rel = abelianized_relation_matrix(p, schema_bound);
  Presentation copy = p;
  return WordOracle{"abelian", [rel, copy](const Word& w) {
                      return in_row_span(rel, exponent_vector(copy, w));
                    }};
}

inline WordOracle oracle_dehn(const Presentation& p) {
  Presentation copy = p;
  return WordOracle{"dehn", [copy](const Word& w) { return c16_is_identity(copy, w); }};
}

inline WordOracle make_oracle(const std::string& name, const Presentation& p) {
  if (name == "free") return oracle_free();
  if (name == "trivial") return oracle_trivial();
  if (name == "abelian") return oracle_abelian(p);
  if (name == "dehn") return oracle_dehn(p);
  fail(errc::constraint, "unknown oracle '" + name + "' (expected free|trivial|abelian|dehn)");
}

class CayleyBall {
public:
  struct Edge {
    int from;
    GenId gen;
    int to;
  };
  struct Cell {
    int vertex;
    std::size_t relator; // index into designated relators
  };

  Presentation presentation;
  std::size_t designated = 0;
  long long radius = 0;
  std::string oracle_name;
  std::vector<Word> vertices; // canonical words, index 0 = identity
  std::vector<Edge> edges;
  std::vector<Cell> cells;

  std::optional<std::pair<int, int>> step(int v, Lit l) const {
    auto it = adj_.find({v, l});
    if (it == adj_.end()) return std::nullopt;
    return it->second;
  }

  // Signed edge chain of the relator loop traced from `from`; nullopt when
  // the trace leaves the ball.
  std::optional<IntVec> trace_chain(int from, const Word& r) const {
    IntVec chain(edges.size(), 0);
    int v = from;
    for (Lit l : r) {
      auto nxt = step(v, l);
      if (!nxt) return std::nullopt;
      chain[static_cast<std::size_t>(nxt->second)] += (l > 0 ? 1 : -1);
      v = nxt->first;
    }
    if (v != from) return std::nullopt; // not a loop at this truncation
    return chain;
  }

  void index_edges() {
    adj_.clear();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      adj_[{edges[i].from, make_lit(edges[i].gen, 1)}] = {edges[i].to, static_cast<int>(i)};
      adj_[{edges[i].to, make_lit(edges[i].gen, -1)}] = {edges[i].from, static_cast<int>(i)};
    }
  }

private:
  std::map<std::pair<int, Lit>, std::pair<int, int>> adj_;
};

inline CayleyBall cayley_ball(const Presentation& p, std::size_t designated, const WordOracle& oracle,
                              long long radius) {
  if (designated > p.relators().size())
    fail(errc::constraint, "designated relator count exceeds the presentation");

  CayleyBall ball;
  ball.presentation = p;
  ball.designated = designated;
  ball.radius = radius;
  ball.oracle_name = oracle.name;
  ball.vertices.push_back(Word());

  auto find_vertex = [&](const Word& w) -> std::optional<int> {
    for (std::size_t i = 0; i < ball.vertices.size(); ++i)
      if (oracle.is_identity(w * invert(ball.vertices[i]))) return static_cast<int>(i);
    return std::nullopt;
  };

  // breadth-first by word-metric layers
  std::vector<int> frontier{0};
  for (long long depth = 0; depth < radius && !frontier.empty(); ++depth) {
    std::vector<int> next;
    for (int v : frontier) {
      for (GenId g : p.gens().gens()) {
        for (int sign : {1, -1}) {
          Word w = reduce(ball.vertices[static_cast<std::size_t>(v)] * Word::letter(g, sign));
          if (!find_vertex(w)) {
            ball.vertices.push_back(w);
            next.push_back(static_cast<int>(ball.vertices.size()) - 1);
          }
        }
      }
    }
    frontier = std::move(next);
  }

  // edges with both endpoints inside the ball
  for (std::size_t v = 0; v < ball.vertices.size(); ++v)
    for (GenId g : p.gens().gens()) {
      Word w = reduce(ball.vertices[v] * Word::letter(g, 1));
      if (auto t = find_vertex(w)) ball.edges.push_back(CayleyBall::Edge{static_cast<int>(v), g, *t});
    }
  ball.index_edges();

  // cells whose whole boundary path stays inside the ball
  for (std::size_t v = 0; v < ball.vertices.size(); ++v)
    for (std::size_t k = 0; k < designated; ++k)
      if (ball.trace_chain(static_cast<int>(v), p.relators()[k]))
        ball.cells.push_back(CayleyBall::Cell{static_cast<int>(v), k});

  return ball;
}

struct BoundaryCertificate {
  std::vector<long long> coefficients; // aligned with ball.cells
  Word target;
};

// Cell-boundary matrix: one column per cell, one row per edge.
inline IntMat boundary_matrix(const CayleyBall& ball) {
  IntMat m(ball.edges.size(), ball.cells.size());
  for (std::size_t c = 0; c < ball.cells.size(); ++c) {
    auto chain = ball.trace_chain(ball.cells[c].vertex, ball.presentation.relators()[ball.cells[c].relator]);
    for (std::size_t e = 0; e < ball.edges.size(); ++e) m.at(e, c) = (*chain)[e];
  }
  return m;
}

inline std::optional<BoundaryCertificate> boundary_certificate(const CayleyBall& ball, const Word& r) {
  auto target = ball.trace_chain(0, reduce(r));
  if (!target) fail(errc::loop_exits_ball, "relator loop leaves the ball at this radius");
  if (ball.cells.empty()) return std::nullopt;
  auto x = solve_integer(boundary_matrix(ball), *target);
  if (!x) return std::nullopt;
  return BoundaryCertificate{*x, reduce(r)};
}

// Independent soundness check: re-multiplies the boundary of the weighted
// cell sum by direct summation, no solver involved.
inline bool verify_certificate(const CayleyBall& ball, const BoundaryCertificate& cert) {
  if (cert.coefficients.size() != ball.cells.size()) return false;
  auto target = ball.trace_chain(0, cert.target);
  if (!target) return false;
  IntVec sum(ball.edges.size(), 0);
  for (std::size_t c = 0; c < ball.cells.size(); ++c) {
    if (cert.coefficients[c] == 0) continue;
    auto chain = ball.trace_chain(ball.cells[c].vertex, ball.presentation.relators()[ball.cells[c].relator]);
    if (!chain) return false;
    for (std::size_t e = 0; e < sum.size(); ++e)
      sum[e] = detail::checked(static_cast<__int128>(sum[e]) +
                               static_cast<__int128>(cert.coefficients[c]) * (*chain)[e]);
  }
  return sum == *target;
}

// Certificate file: everything needed to rebuild the ball and re-verify.
inline nlohmann::ordered_json certificate_to_json(const CayleyBall& ball, const BoundaryCertificate& cert) {
  nlohmann::ordered_json j;
  j["presentation"] = presentation_to_json(ball.presentation);
  j["designated"] = ball.designated;
  j["radius"] = ball.radius;
  j["oracle"] = ball.oracle_name;
  j["relator"] = print_word(cert.target);
  j["cells"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < ball.cells.size(); ++c) {
    if (cert.coefficients[c] == 0) continue;
    nlohmann::ordered_json jc;
    jc["vertex"] = print_word(ball.vertices[static_cast<std::size_t>(ball.cells[c].vertex)]);
    jc["relator"] = ball.cells[c].relator;
    jc["coefficient"] = cert.coefficients[c];
    j["cells"].push_back(jc);
  }
  return j;
}

// Standalone re-verification from the serialized form alone.
inline bool verify_certificate_json(const nlohmann::json& j) {
  Presentation p = presentation_from_json(j.at("presentation"));
  WordOracle oracle = make_oracle(j.at("oracle").get<std::string>(), p);
  CayleyBall ball = cayley_ball(p, j.at("designated").get<std::size_t>(), oracle, j.at("radius").get<long long>());
  BoundaryCertificate cert;
  cert.target = parse_word(j.at("relator").get<std::string>(), &p.gens());
  cert.coefficients.assign(ball.cells.size(), 0);
  for (const auto& jc : j.at("cells")) {
    Word v = parse_word(jc.at("vertex").get<std::string>(), &p.gens());
    std::size_t rel = jc.at("relator").get<std::size_t>();
    bool found = false;
    for (std::size_t c = 0; c < ball.cells.size(); ++c)
      if (ball.cells[c].relator == rel &&
          ball.vertices[static_cast<std::size_t>(ball.cells[c].vertex)] == v) {
        cert.coefficients[c] = jc.at("coefficient").get<long long>();
        found = true;
        break;
      }
    if (!found) return false;
  }
  return verify_certificate(ball, cert);
}

} // namespace cgt
