#pragma once

// Stallings folding for finitely generated subgroups of free groups.
//
// The fold carries witnesses: every edge stores a word over the record
// generators (the subgroup generators as given) such that concatenating the
// stored words along any basepoint loop yields an expression of that loop's
// element in the record generators. Folding preserves this by conjugating the
// witness of every edge incident to an absorbed vertex with the discrepancy
// between the two identified edges. express() is then a single graph trace.

#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cgt/error.hpp"
#include "cgt/word.hpp"
#include "json.hpp"

namespace cgt {

class SubgroupGraph {
public:
  struct Edge {
    int from;
    GenId gen;
    int to;
    Word xi; // record-generator contribution when traversed from -> to
  };

  int basepoint() const { return 0; }
  std::size_t vertex_count() const { return adj_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Word>& generators_of_record() const { return record_; }
  const Alphabet& record_alphabet() const { return record_alpha_; }

  // (target, edge id) for the unique half-edge at v with this letter.
  std::optional<std::pair<int, int>> step(int v, Lit l) const {
    const auto& m = adj_[static_cast<std::size_t>(v)];
    auto it = m.find(l);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }

  std::size_t rank() const {
    return edges_.size() + 1 - vertex_count();
  }

  GeneratorMap record_assignment(const Alphabet& codomain) const {
    GeneratorMap m(record_alpha_, codomain);
    for (std::size_t i = 0; i < record_.size(); ++i) m.set(record_alpha_[i], record_[i]);
    return m;
  }

  friend SubgroupGraph fold(const std::vector<Word>&, const std::string&, bool);

private:
  std::vector<Edge> edges_;
  std::vector<std::unordered_map<Lit, std::pair<int, int>>> adj_; // v -> lit -> (target, edge)
  std::vector<Word> record_;
  Alphabet record_alpha_;
};

namespace detail {

struct FoldBuilder {
  struct Edge {
    int from;
    GenId gen;
    int to;
    Word xi;
    bool alive = true;
  };

  std::vector<Edge> edges;
  std::vector<std::unordered_multimap<Lit, int>> adj; // vertex -> lit -> edge id
  std::vector<int> parent;                            // union-find
  bool witnesses;

  explicit FoldBuilder(bool with_witnesses) : witnesses(with_witnesses) { new_vertex(); }

  int new_vertex() {
    adj.emplace_back();
    parent.push_back(static_cast<int>(parent.size()));
    return static_cast<int>(parent.size()) - 1;
  }

  int find(int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  int add_edge(int from, GenId gen, int to, Word xi) {
    int id = static_cast<int>(edges.size());
    edges.push_back(Edge{from, gen, to, std::move(xi)});
    adj[from].emplace(make_lit(gen, 1), id);
    adj[to].emplace(make_lit(gen, -1), id);
    return id;
  }

  // Oriented witness contribution of edge e when leaving vertex v.
  Word contribution(int e, Lit l) const { return l > 0 ? edges[e].xi : invert(edges[e].xi); }

  int other_end(int e, Lit l) const { return l > 0 ? edges[e].to : edges[e].from; }

  void drop_edge(int e) {
    Edge& ed = edges[e];
    ed.alive = false;
    erase_entry(ed.from, make_lit(ed.gen, 1), e);
    erase_entry(ed.to, make_lit(ed.gen, -1), e);
  }

  void erase_entry(int v, Lit l, int e) {
    auto range = adj[v].equal_range(l);
    for (auto it = range.first; it != range.second; ++it)
      if (it->second == e) {
        adj[v].erase(it);
        return;
      }
  }

  void fold_all() {
    std::deque<int> work;
    for (int v = 0; v < static_cast<int>(adj.size()); ++v) work.push_back(v);
    while (!work.empty()) {
      int v = work.front();
      work.pop_front();
      if (find(v) != v) continue;
      bool changed = true;
      while (changed) {
        changed = false;
        // locate two half-edges at v with the same letter
        for (auto it = adj[v].begin(); it != adj[v].end() && !changed; ++it) {
          auto range = adj[v].equal_range(it->first);
          auto second = range.first;
          ++second;
          if (second == range.second) continue;
          int e1 = range.first->second, e2 = second->second;
          if (e1 > e2) std::swap(e1, e2); // deterministic keep rule
          Lit l = it->first;
          int w1 = other_end(e1, l), w2 = other_end(e2, l);
          if (w1 == w2) {
            drop_edge(e2);
          } else {
            if (w2 == 0) { // keep the basepoint as representative
              std::swap(e1, e2);
              std::swap(w1, w2);
            }
            merge(v, l, e1, e2, w1, w2, work);
            if (v == w2) v = w1; // folding vertex may have been absorbed
          }
          changed = true;
          work.push_back(v);
        }
      }
    }
  }

  // Absorb w2 into w1, where e1/e2 leave v with letter l toward w1/w2.
  void merge(int /*v*/, Lit l, int e1, int e2, int w1, int w2, std::deque<int>& work) {
    Word delta;
    if (witnesses) delta = reduce(invert(contribution(e1, l)) * contribution(e2, l));

    std::vector<std::pair<Lit, int>> incident(adj[w2].begin(), adj[w2].end());
    adj[w2].clear();
    // dedupe self-loops listed under both orientations
    std::vector<int> seen;
    for (auto& [hl, e] : incident) {
      (void)hl;
      Edge& ed = edges[e];
      if (!ed.alive) continue;
      bool dup = false;
      for (int s : seen)
        if (s == e) dup = true;
      if (dup) continue;
      seen.push_back(e);
      if (witnesses && !delta.empty()) {
        if (ed.from == w2) ed.xi = reduce(delta * ed.xi);
        if (ed.to == w2) ed.xi = reduce(ed.xi * invert(delta));
      }
      if (ed.from == w2) {
        ed.from = w1;
        adj[w1].emplace(make_lit(ed.gen, 1), e);
      }
      if (ed.to == w2) {
        ed.to = w1;
        adj[w1].emplace(make_lit(ed.gen, -1), e);
      }
    }
    parent[w2] = w1;
    (void)e2;
    work.push_back(w1);
  }
};

} // namespace detail

// Folds the given words (reduced on intake) into the core Stallings graph.
// record_ns names the synthesized record alphabet sub.g_0, sub.g_1, ...
inline SubgroupGraph fold(const std::vector<Word>& gens, const std::string& record_ns = "sub",
                          bool witnesses = true) {
  detail::FoldBuilder b(witnesses);

  std::vector<Word> record;
  Alphabet record_alpha;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    record.push_back(reduce(gens[i]));
    record_alpha.add(intern_gen(record_ns, "g", static_cast<int>(i)));
  }

  for (std::size_t i = 0; i < record.size(); ++i) {
    const Word& w = record[i];
    if (w.empty()) continue;
    Word mark = witnesses ? Word::letter(record_alpha[i]) : Word();
    int prev = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      bool last = (k + 1 == w.size());
      int next = last ? 0 : b.new_vertex();
      Lit l = w[k];
      Word xi = (witnesses && last) ? (l > 0 ? mark : invert(mark)) : Word();
      if (l > 0)
        b.add_edge(prev, lit_gen(l), next, std::move(xi));
      else
        b.add_edge(next, lit_gen(l), prev, std::move(xi));
      prev = next;
    }
  }

  b.fold_all();

  // core trim: drop non-basepoint vertices of degree <= 1
  {
    std::deque<int> q;
    for (int v = 0; v < static_cast<int>(b.adj.size()); ++v)
      if (b.find(v) == v && v != 0 && b.adj[v].size() <= 1) q.push_back(v);
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (v == 0 || b.adj[v].size() > 1) continue;
      if (b.adj[v].empty()) continue;
      auto [l, e] = *b.adj[v].begin();
      int u = b.other_end(e, l);
      b.drop_edge(e);
      if (u != 0 && b.adj[u].size() <= 1) q.push_back(u);
    }
  }

  // canonical renumbering: BFS from the basepoint in letter order
  std::unordered_map<Lit, int> lit_rank;
  {
    std::vector<Lit> lits;
    for (const auto& e : b.edges)
      if (e.alive) {
        lits.push_back(make_lit(e.gen, 1));
        lits.push_back(make_lit(e.gen, -1));
      }
    std::sort(lits.begin(), lits.end(), lit_less);
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i < lits.size(); ++i) lit_rank[lits[i]] = static_cast<int>(i);
  }

  std::unordered_map<int, int> number;
  std::vector<int> order;
  number[0] = 0;
  order.push_back(0);
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    std::vector<std::pair<Lit, int>> nbrs(b.adj[v].begin(), b.adj[v].end());
    std::sort(nbrs.begin(), nbrs.end(), [&](const auto& x, const auto& y) {
      if (x.first != y.first) return lit_rank[x.first] < lit_rank[y.first];
      return x.second < y.second;
    });
    for (auto& [l, e] : nbrs) {
      int u = b.other_end(e, l);
      if (!number.count(u)) {
        number[u] = static_cast<int>(order.size());
        order.push_back(u);
        q.push(u);
      }
    }
  }

  SubgroupGraph g;
  g.record_ = std::move(record);
  g.record_alpha_ = std::move(record_alpha);
  g.adj_.resize(order.size());
  std::vector<std::tuple<int, int, int, Word>> collected; // (from, lit_rank, to, xi)
  for (const auto& e : b.edges)
    if (e.alive)
      collected.emplace_back(number.at(e.from), lit_rank[make_lit(e.gen, 1)], number.at(e.to), e.xi);
  std::sort(collected.begin(), collected.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x), std::get<2>(x)) <
           std::tie(std::get<0>(y), std::get<1>(y), std::get<2>(y));
  });
  std::vector<Lit> rank_to_lit(lit_rank.size());
  for (auto& [l, r] : lit_rank) rank_to_lit[static_cast<std::size_t>(r)] = l;
  for (auto& [from, lr, to, xi] : collected) {
    Lit l = rank_to_lit[static_cast<std::size_t>(lr)];
    GenId gen = lit_gen(l);
    int id = static_cast<int>(g.edges_.size());
    g.edges_.push_back(SubgroupGraph::Edge{from, gen, to, xi});
    g.adj_[static_cast<std::size_t>(from)][make_lit(gen, 1)] = {to, id};
    g.adj_[static_cast<std::size_t>(to)][make_lit(gen, -1)] = {from, id};
  }
  return g;
}

inline bool contains(const SubgroupGraph& g, const Word& w) {
  Word r = reduce(w);
  int v = g.basepoint();
  for (Lit l : r) {
    auto nxt = g.step(v, l);
    if (!nxt) return false;
    v = nxt->first;
  }
  return v == g.basepoint();
}

// Expression of w over the record generators; substituting the record
// assignment back reduces to w.
inline Word express(const SubgroupGraph& g, const Word& w) {
  Word r = reduce(w);
  int v = g.basepoint();
  Word out;
  for (Lit l : r) {
    auto nxt = g.step(v, l);
    if (!nxt) fail(errc::not_a_member, "word is not in the subgroup");
    const auto& e = g.edges()[static_cast<std::size_t>(nxt->second)];
    if (l > 0)
      out.append(e.xi);
    else
      out.append(invert(e.xi));
    v = nxt->first;
  }
  if (v != g.basepoint()) fail(errc::not_a_member, "word is not in the subgroup");
  return reduce(out);
}

inline std::size_t graph_rank(const SubgroupGraph& g) { return g.rank(); }

// Dump format: vertex count, basepoint, edge triples.
inline std::string dump_graph(const SubgroupGraph& g) {
  std::ostringstream os;
  os << "vertices: " << g.vertex_count() << "\n";
  os << "basepoint: " << g.basepoint() << "\n";
  for (const auto& e : g.edges()) os << "edge: " << e.from << " " << gen_display(e.gen) << " " << e.to << "\n";
  return os.str();
}

inline nlohmann::ordered_json graph_to_json(const SubgroupGraph& g) {
  nlohmann::ordered_json j;
  j["vertices"] = g.vertex_count();
  j["basepoint"] = g.basepoint();
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({e.from, gen_display(e.gen), e.to});
  j["generators_of_record"] = nlohmann::ordered_json::array();
  for (const Word& w : g.generators_of_record()) j["generators_of_record"].push_back(print_word(w));
  return j;
}

} // namespace cgt
