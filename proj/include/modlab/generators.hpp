#ifndef MODLAB_GENERATORS_HPP
#define MODLAB_GENERATORS_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "modlab/metric_graph.hpp"

namespace modlab {

inline constexpr std::int64_t kDefaultNodeBudget = 2'000'000;

struct GridSpec {
  int dim = 2;
  int side = 2;        // nodes per axis
  double spacing = 1.0;
  bool periodic = false;
};

// Axis-aligned nearest-neighbour lattice; length = spacing, sigma =
// spacing^dim so the total measure tracks volume.
inline MetricGraph euclidean_grid(const GridSpec& spec,
                                  std::int64_t node_budget = kDefaultNodeBudget) {
  if (spec.dim < 1) throw ArgumentError("euclidean_grid: dim >= 1 required");
  if (spec.side < 2) throw ArgumentError("euclidean_grid: side >= 2 required");
  if (!(spec.spacing > 0.0)) throw ArgumentError("euclidean_grid: spacing > 0 required");
  if (spec.periodic && spec.side < 3)
    throw ArgumentError("euclidean_grid: periodic wraparound needs side >= 3");
  std::int64_t n = 1;
  for (int k = 0; k < spec.dim; ++k) {
    n *= spec.side;
    if (n > node_budget) throw ArgumentError("euclidean_grid: too large, node budget exceeded");
  }

  const double sigma = std::pow(spec.spacing, spec.dim);
  std::vector<double> coords(static_cast<std::size_t>(n) * spec.dim);
  std::vector<int> idx(static_cast<std::size_t>(spec.dim), 0);
  for (std::int64_t v = 0; v < n; ++v) {
    for (int k = 0; k < spec.dim; ++k)
      coords[static_cast<std::size_t>(v) * spec.dim + k] = idx[k] * spec.spacing;
    for (int k = 0; k < spec.dim; ++k) {
      if (++idx[k] < spec.side) break;
      idx[k] = 0;
    }
  }
  // node index is mixed-radix little-endian in the axis indices
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * spec.dim);
  std::int64_t stride = 1;
  for (int k = 0; k < spec.dim; ++k) {
    for (std::int64_t v = 0; v < n; ++v) {
      int axis = static_cast<int>((v / stride) % spec.side);
      if (axis + 1 < spec.side) {
        edges.push_back({static_cast<NodeId>(v), static_cast<NodeId>(v + stride),
                         spec.spacing, sigma});
      } else if (spec.periodic) {
        edges.push_back({static_cast<NodeId>(v),
                         static_cast<NodeId>(v - stride * (spec.side - 1)),
                         spec.spacing, sigma});
      }
    }
    stride *= spec.side;
  }
  return MetricGraph(static_cast<NodeId>(n), std::move(edges), std::move(coords),
                     spec.dim);
}

struct Subgraph {
  MetricGraph graph;
  std::vector<NodeId> to_parent;    // new index -> old index
  std::vector<NodeId> from_parent;  // old index -> new index, -1 if dropped
};

// Induced subgraph on `keep` with inherited lengths and sigmas. Errors when
// the restriction is disconnected.
inline Subgraph subgraph_restrict(const MetricGraph& g, const NodeSet& keep) {
  if (keep.empty()) throw ArgumentError("subgraph_restrict: empty node set");
  keep.validate(g, "subgraph_restrict");
  std::vector<NodeId> from_parent(static_cast<std::size_t>(g.num_nodes()), -1);
  std::vector<NodeId> to_parent;
  to_parent.reserve(keep.size());
  for (NodeId v : keep.ids) {
    from_parent[v] = static_cast<NodeId>(to_parent.size());
    to_parent.push_back(v);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (from_parent[e.a] >= 0 && from_parent[e.b] >= 0)
      edges.push_back({from_parent[e.a], from_parent[e.b], e.length, e.sigma});
  }
  std::vector<double> coords;
  if (g.has_coords()) {
    coords.resize(to_parent.size() * g.dim());
    for (std::size_t i = 0; i < to_parent.size(); ++i)
      for (int k = 0; k < g.dim(); ++k)
        coords[i * g.dim() + k] = g.coord(to_parent[i])[k];
  }
  try {
    MetricGraph sub(static_cast<NodeId>(to_parent.size()), std::move(edges),
                    std::move(coords), g.has_coords() ? g.dim() : 0);
    return {std::move(sub), std::move(to_parent), std::move(from_parent)};
  } catch (const GraphError&) {
    throw GraphError("subgraph_restrict: disconnected domain");
  }
}

// Discrete first Heisenberg group: integer points (i,j,k), edges along the
// horizontal generators (i,j,k)-(i+1,j,k) and (i,j,k)-(i,j+1,k-i). The word
// metric over these moves approximates the Carnot-Caratheodory metric;
// homogeneous dimension 4, so sigma = spacing^4.
inline MetricGraph heisenberg_grid(int side, double spacing = 1.0,
                                   std::int64_t node_budget = kDefaultNodeBudget) {
  if (side < 3) throw ArgumentError("heisenberg_grid: side >= 3 required");
  if (!(spacing > 0.0)) throw ArgumentError("heisenberg_grid: spacing > 0 required");
  const int h = (side - 1) / 2;
  const int kmax = h * h + 2 * h;
  const std::int64_t ni = 2 * h + 1, nk = 2 * static_cast<std::int64_t>(kmax) + 1;
  const std::int64_t n = ni * ni * nk;
  if (n > node_budget) throw ArgumentError("heisenberg_grid: too large, node budget exceeded");

  auto index = [&](int i, int j, int k) -> std::int64_t {
    return ((static_cast<std::int64_t>(i + h) * ni) + (j + h)) * nk + (k + kmax);
  };
  std::vector<double> coords(static_cast<std::size_t>(n) * 3);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * n));
  const double sigma = std::pow(spacing, 4);
  for (int i = -h; i <= h; ++i)
    for (int j = -h; j <= h; ++j)
      for (int k = -kmax; k <= kmax; ++k) {
        const std::int64_t v = index(i, j, k);
        coords[static_cast<std::size_t>(v) * 3 + 0] = i * spacing;
        coords[static_cast<std::size_t>(v) * 3 + 1] = j * spacing;
        coords[static_cast<std::size_t>(v) * 3 + 2] = k * spacing;
        if (i + 1 <= h)
          edges.push_back({static_cast<NodeId>(v),
                           static_cast<NodeId>(index(i + 1, j, k)), spacing, sigma});
        if (j + 1 <= h && k - i >= -kmax && k - i <= kmax)
          edges.push_back({static_cast<NodeId>(v),
                           static_cast<NodeId>(index(i, j + 1, k - i)), spacing, sigma});
      }
  return MetricGraph(static_cast<NodeId>(n), std::move(edges), std::move(coords), 3);
}

// Endpoints of the depth-th generation of the middle-(1-2*ratio) Cantor
// construction on [0,1]; 2^(depth+1) points.
inline std::vector<double> cantor_points(int depth, double ratio) {
  if (depth < 1) throw ArgumentError("cantor_points: depth >= 1 required");
  if (!(ratio > 0.0) || !(ratio < 0.5))
    throw ArgumentError("cantor_points: ratio must lie in (0, 1/2)");
  std::vector<std::pair<double, double>> intervals = {{0.0, 1.0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::pair<double, double>> next;
    next.reserve(intervals.size() * 2);
    for (auto [a, b] : intervals) {
      const double len = b - a;
      next.push_back({a, a + ratio * len});
      next.push_back({b - ratio * len, b});
    }
    intervals = std::move(next);
  }
  std::vector<double> pts;
  pts.reserve(intervals.size() * 2);
  for (auto [a, b] : intervals) {
    pts.push_back(a);
    pts.push_back(b);
  }
  return pts;
}

// Map applied to node positions; combinatorics are preserved, edge lengths
// are recomputed as coordinate distances of the image endpoints. The image
// sigma is length^dim unless a volume factor (local Jacobian of the measure)
// is supplied, in which case sigma is pushed forward:
// sigma' = sigma * volume_factor(edge midpoint).
struct VertexMap {
  std::function<std::vector<double>(std::span<const double>)> position;
  std::function<double(std::span<const double>)> volume_factor;  // optional
  std::string name = "map";
};

inline VertexMap identity_map() {
  VertexMap m;
  m.position = [](std::span<const double> p) {
    return std::vector<double>(p.begin(), p.end());
  };
  m.volume_factor = [](std::span<const double>) { return 1.0; };
  m.name = "identity";
  return m;
}

// Diagonal linear map, e.g. (x, y) -> (s0 x, s1 y).
inline VertexMap diagonal_map(std::vector<double> scales) {
  double det = 1.0;
  for (double s : scales) det *= std::abs(s);
  VertexMap m;
  m.position = [scales](std::span<const double> p) {
    std::vector<double> q(p.begin(), p.end());
    for (std::size_t k = 0; k < q.size() && k < scales.size(); ++k) q[k] *= scales[k];
    return q;
  };
  m.volume_factor = [det](std::span<const double>) { return det; };
  m.name = "diagonal";
  return m;
}

// Radial collar blowup around `center` (2D): radii in (0, rf] are pushed
// onto the collar (a, rf] via r -> a + r (rf - a) / rf, identity outside.
// The puncture itself has no well-defined image; it is sent to radius a on
// the positive x-axis, and experiments on the punctured domain ignore it.
inline VertexMap collar_blowup_map(std::vector<double> center, double a, double rf) {
  if (!(a > 0.0) || !(rf > a))
    throw ArgumentError("collar_blowup_map: need 0 < a < rf");
  const double slope = (rf - a) / rf;
  VertexMap m;
  m.position = [center, a, slope, rf](std::span<const double> p) {
    std::vector<double> q(p.begin(), p.end());
    double r2 = 0.0;
    for (std::size_t k = 0; k < q.size() && k < center.size(); ++k)
      r2 += (q[k] - center[k]) * (q[k] - center[k]);
    const double r = std::sqrt(r2);
    if (r >= rf) return q;
    if (r == 0.0) {
      q[0] = center[0] + a;
      return q;
    }
    const double scale = (a + slope * r) / r;
    for (std::size_t k = 0; k < q.size() && k < center.size(); ++k)
      q[k] = center[k] + scale * (q[k] - center[k]);
    return q;
  };
  // 2D polar volume element: (new_r / r) * d(new_r)/dr
  m.volume_factor = [center, a, slope, rf](std::span<const double> p) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < p.size() && k < center.size(); ++k)
      r2 += (p[k] - center[k]) * (p[k] - center[k]);
    const double r = std::sqrt(r2);
    if (r >= rf || r == 0.0) return 1.0;
    return (a + slope * r) / r * slope;
  };
  m.name = "collar";
  return m;
}

inline MetricGraph apply_vertex_map(const MetricGraph& g, const VertexMap& map) {
  if (!g.has_coords()) throw ArgumentError("apply_vertex_map: graph has no coordinates");
  if (!map.position) throw ArgumentError("apply_vertex_map: map has no position function");
  const int dim = g.dim();
  std::vector<double> coords(static_cast<std::size_t>(g.num_nodes()) * dim);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto q = map.position(g.coord(v));
    if (static_cast<int>(q.size()) != dim)
      throw ArgumentError("apply_vertex_map: map changed coordinate dimension");
    for (int k = 0; k < dim; ++k) coords[static_cast<std::size_t>(v) * dim + k] = q[k];
  }
  std::vector<Edge> edges = g.edges();
  for (EdgeId i = 0; i < g.num_edges(); ++i) {
    Edge& e = edges[static_cast<std::size_t>(i)];
    double len2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = coords[static_cast<std::size_t>(e.a) * dim + k] -
                       coords[static_cast<std::size_t>(e.b) * dim + k];
      len2 += d * d;
    }
    const double len = std::sqrt(len2);
    if (!(len > 0.0))
      throw GraphError("apply_vertex_map: map collapses an edge to zero length");
    if (map.volume_factor) {
      std::vector<double> mid(static_cast<std::size_t>(dim));
      for (int k = 0; k < dim; ++k)
        mid[static_cast<std::size_t>(k)] =
            0.5 * (g.coord(e.a)[k] + g.coord(e.b)[k]);
      e.sigma = e.sigma * map.volume_factor(mid);
    } else {
      e.sigma = std::pow(len, dim);
    }
    e.length = len;
  }
  return MetricGraph(g.num_nodes(), std::move(edges), std::move(coords), dim);
}

}  // namespace modlab

#endif  // MODLAB_GENERATORS_HPP
