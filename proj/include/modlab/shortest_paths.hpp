#ifndef MODLAB_SHORTEST_PATHS_HPP
#define MODLAB_SHORTEST_PATHS_HPP

#include <limits>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "modlab/metric_graph.hpp"

namespace modlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Multi-source Dijkstra over edge lengths. `allowed` (when given) masks the
// nodes a path may use; unreachable nodes keep distance +inf.
inline std::vector<double> distance_field(const MetricGraph& g,
                                          std::span<const NodeId> sources,
                                          const std::vector<char>* allowed = nullptr) {
  std::vector<double> dist(static_cast<std::size_t>(g.num_nodes()), kInf);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (NodeId s : sources) {
    if (allowed && !(*allowed)[s]) continue;
    if (dist[s] > 0.0) {
      dist[s] = 0.0;
      pq.push({0.0, s});
    }
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (const MetricGraph::Arc& a : g.neighbors(v)) {
      if (allowed && !(*allowed)[a.to]) continue;
      double nd = d + g.edge(a.edge).length;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        pq.push({nd, a.to});
      }
    }
  }
  return dist;
}

inline std::vector<double> distance_field(const MetricGraph& g, NodeId source,
                                          const std::vector<char>* allowed = nullptr) {
  NodeId s[1] = {source};
  return distance_field(g, std::span<const NodeId>(s, 1), allowed);
}

inline double graph_distance(const MetricGraph& g, NodeId a, NodeId b) {
  if (a < 0 || a >= g.num_nodes() || b < 0 || b >= g.num_nodes())
    throw ArgumentError("graph_distance: node index out of range");
  if (a == b) return 0.0;
  auto dist = distance_field(g, a);
  if (dist[b] == kInf) throw GraphError("disconnected: no path between nodes");
  return dist[b];
}

// Open metric ball {y : d(x0, y) < r}.
inline NodeSet metric_ball(const MetricGraph& g, NodeId x0, double r) {
  if (x0 < 0 || x0 >= g.num_nodes())
    throw ArgumentError("metric_ball: node index out of range");
  if (r < 0.0) throw ArgumentError("metric_ball: negative radius");
  NodeSet out;
  if (r == 0.0) return out;
  auto dist = distance_field(g, x0);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dist[v] < r) out.ids.push_back(v);
  return out;
}

inline NodeSet closed_ball(const MetricGraph& g, NodeId x0, double r) {
  if (r < 0.0) throw ArgumentError("closed_ball: negative radius");
  auto dist = distance_field(g, x0);
  NodeSet out;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dist[v] <= r) out.ids.push_back(v);
  return out;
}

inline double set_distance(const MetricGraph& g, const NodeSet& s, const NodeSet& t) {
  if (s.empty() || t.empty()) throw ArgumentError("set_distance: empty set");
  s.validate(g, "set_distance");
  t.validate(g, "set_distance");
  auto dist = distance_field(g, std::span<const NodeId>(s.ids));
  double best = kInf;
  for (NodeId v : t.ids) best = std::min(best, dist[v]);
  if (best == kInf) throw GraphError("disconnected: sets not joined");
  return best;
}

inline double set_diameter(const MetricGraph& g, const NodeSet& s) {
  if (s.empty()) throw ArgumentError("set_diameter: empty set");
  s.validate(g, "set_diameter");
  double best = 0.0;
  for (NodeId v : s.ids) {
    auto dist = distance_field(g, v);
    for (NodeId w : s.ids) {
      if (dist[w] == kInf) throw GraphError("disconnected: set not joined");
      best = std::max(best, dist[w]);
    }
  }
  return best;
}

inline double graph_diameter(const MetricGraph& g) {
  return set_diameter(g, NodeSet::all(g));
}

// Measure of the open ball: edges fully inside count sigma, edges crossing
// the boundary count sigma/2.
inline double ball_measure(const MetricGraph& g, NodeId x0, double r) {
  if (x0 < 0 || x0 >= g.num_nodes())
    throw ArgumentError("ball_measure: node index out of range");
  if (r < 0.0) throw ArgumentError("ball_measure: negative radius");
  if (r == 0.0) return 0.0;
  auto dist = distance_field(g, x0);
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const bool ina = dist[e.a] < r, inb = dist[e.b] < r;
    if (ina && inb)
      total += e.sigma;
    else if (ina || inb)
      total += 0.5 * e.sigma;
  }
  return total;
}

// True if the induced subgraph on `s` is connected.
inline bool is_connected_subset(const MetricGraph& g, const NodeSet& s) {
  if (s.empty()) return false;
  auto m = s.mask(g.num_nodes());
  std::vector<NodeId> stack = {s.ids.front()};
  std::vector<char> seen(static_cast<std::size_t>(g.num_nodes()), 0);
  seen[s.ids.front()] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (const MetricGraph::Arc& a : g.neighbors(v)) {
      if (m[a.to] && !seen[a.to]) {
        seen[a.to] = 1;
        ++count;
        stack.push_back(a.to);
      }
    }
  }
  return count == s.size();
}

// ---------------------------------------------------------------------------
// Weighted shortest paths with a fully deterministic tie-break, used by the
// admissibility oracle. Keys are (weight, hop count) compared
// lexicographically; among optimal paths the one with the lexicographically
// smallest node sequence (then edge ids) is reconstructed.

struct PathKey {
  double d = kInf;
  std::int32_t h = std::numeric_limits<std::int32_t>::max();
  bool operator<(const PathKey& o) const { return d < o.d || (d == o.d && h < o.h); }
};

struct WeightedPath {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  double weight = kInf;
};

// Key field of the cheapest (weight, hops) walk from each node into
// `targets`, restricted to `allowed` nodes; weights must be >= 0.
inline std::vector<PathKey> key_field_to(const MetricGraph& g,
                                         std::span<const NodeId> targets,
                                         const std::vector<double>& edge_weight,
                                         const std::vector<char>* allowed) {
  std::vector<PathKey> key(static_cast<std::size_t>(g.num_nodes()));
  using Item = std::tuple<double, std::int32_t, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (NodeId t : targets) {
    if (allowed && !(*allowed)[t]) continue;
    if (key[t].d > 0.0) {
      key[t] = {0.0, 0};
      pq.push({0.0, 0, t});
    }
  }
  while (!pq.empty()) {
    auto [d, h, v] = pq.top();
    pq.pop();
    if (d > key[v].d || (d == key[v].d && h > key[v].h)) continue;
    for (const MetricGraph::Arc& a : g.neighbors(v)) {
      if (allowed && !(*allowed)[a.to]) continue;
      PathKey cand{d + edge_weight[static_cast<std::size_t>(a.edge)],
                   static_cast<std::int32_t>(h + 1)};
      if (cand < key[a.to]) {
        key[a.to] = cand;
        pq.push({cand.d, cand.h, a.to});
      }
    }
  }
  return key;
}

// Minimum-weight path from E to F through `allowed` nodes. Ties are broken by
// fewest edges, then by lexicographic node order, then edge ids, so the
// result is reproducible bit for bit. Returns nullopt when F is unreachable.
inline std::optional<WeightedPath> min_weight_path(
    const MetricGraph& g, const NodeSet& E, const NodeSet& F,
    const std::vector<double>& edge_weight, const std::vector<char>* allowed = nullptr) {
  auto back = key_field_to(g, std::span<const NodeId>(F.ids), edge_weight, allowed);

  PathKey best;
  NodeId start = -1;
  for (NodeId e : E.ids) {  // ids sorted: first hit is the smallest node
    if (allowed && !(*allowed)[e]) continue;
    if (back[e] < best) {
      best = back[e];
      start = e;
    }
  }
  if (start < 0 || best.d == kInf) return std::nullopt;

  WeightedPath out;
  out.weight = best.d;
  out.nodes.push_back(start);
  NodeId u = start;
  // Walk down the hop count; at least the Dijkstra parent always satisfies
  // the exact key identity, so the small slack only widens the choice set.
  while (back[u].h > 0) {
    const double eps = 1e-12 * (1.0 + std::abs(back[u].d));
    NodeId best_next = -1;
    EdgeId best_edge = -1;
    for (const MetricGraph::Arc& a : g.neighbors(u)) {
      if (allowed && !(*allowed)[a.to]) continue;
      if (back[a.to].h != back[u].h - 1) continue;
      double w = edge_weight[static_cast<std::size_t>(a.edge)];
      if (std::abs(back[a.to].d + w - back[u].d) > eps) continue;
      if (best_next < 0 || a.to < best_next ||
          (a.to == best_next && a.edge < best_edge)) {
        best_next = a.to;
        best_edge = a.edge;
      }
    }
    if (best_next < 0) return std::nullopt;  // cannot happen on exact fields
    out.nodes.push_back(best_next);
    out.edges.push_back(best_edge);
    u = best_next;
  }
  return out;
}

}  // namespace modlab

#endif  // MODLAB_SHORTEST_PATHS_HPP
