#ifndef MODLAB_METRIC_GRAPH_HPP
#define MODLAB_METRIC_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace modlab {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

// Bad caller input (preconditions, malformed selectors, invalid parameters).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structural defects of a graph or a computation on it (disconnected domain,
// scale too fine, parse failures).
struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem problems; the CLI maps these to a distinct exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  double length = 1.0;  // metric weight, > 0
  double sigma = 1.0;   // measure weight, > 0
};

// Finite metric measure space: the metric is shortest-path length over edge
// lengths, the measure lives on edges via sigma. Immutable after
// construction; all queries are read-only and safe to share across threads.
class MetricGraph {
 public:
  struct Arc {
    NodeId to;
    EdgeId edge;
  };

  MetricGraph(NodeId n_nodes, std::vector<Edge> edges,
              std::vector<double> coords = {}, int dim = 0)
      : dim_(dim), coords_(std::move(coords)), edges_(std::move(edges)) {
    if (n_nodes <= 0) throw ArgumentError("graph needs at least one node");
    n_ = n_nodes;
    if (dim_ < 0) throw ArgumentError("negative coordinate dimension");
    if (dim_ > 0 && coords_.size() != static_cast<std::size_t>(n_) * dim_)
      throw ArgumentError("coordinate array size does not match nodes*dim");
    for (const Edge& e : edges_) {
      if (e.a < 0 || e.a >= n_ || e.b < 0 || e.b >= n_)
        throw GraphError("edge references invalid node");
      if (e.a == e.b) throw GraphError("self-loop edge");
      if (!(e.length > 0.0) || !std::isfinite(e.length))
        throw GraphError("edge length must be positive and finite");
      if (!(e.sigma > 0.0) || !std::isfinite(e.sigma))
        throw GraphError("edge sigma must be positive and finite");
    }
    build_adjacency();
    if (!is_connected()) throw GraphError("disconnected graph");
    total_measure_ = 0.0;
    max_edge_length_ = 0.0;
    for (const Edge& e : edges_) {
      total_measure_ += e.sigma;
      max_edge_length_ = std::max(max_edge_length_, e.length);
    }
  }

  NodeId num_nodes() const { return n_; }
  EdgeId num_edges() const { return static_cast<EdgeId>(edges_.size()); }
  int dim() const { return dim_; }
  bool has_coords() const { return dim_ > 0; }

  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const double> coord(NodeId v) const {
    return {coords_.data() + static_cast<std::size_t>(v) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& coords() const { return coords_; }

  std::span<const Arc> neighbors(NodeId v) const {
    return {adj_.data() + adj_offset_[v],
            static_cast<std::size_t>(adj_offset_[v + 1] - adj_offset_[v])};
  }

  double total_measure() const { return total_measure_; }
  double max_edge_length() const { return max_edge_length_; }

  double coord_distance(NodeId a, NodeId b) const {
    double s = 0.0;
    auto pa = coord(a), pb = coord(b);
    for (int k = 0; k < dim_; ++k) s += (pa[k] - pb[k]) * (pa[k] - pb[k]);
    return std::sqrt(s);
  }

 private:
  void build_adjacency() {
    adj_offset_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const Edge& e : edges_) {
      ++adj_offset_[e.a + 1];
      ++adj_offset_[e.b + 1];
    }
    for (NodeId v = 0; v < n_; ++v) adj_offset_[v + 1] += adj_offset_[v];
    adj_.resize(adj_offset_[n_]);
    std::vector<std::int64_t> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
    for (EdgeId i = 0; i < static_cast<EdgeId>(edges_.size()); ++i) {
      const Edge& e = edges_[static_cast<std::size_t>(i)];
      adj_[cursor[e.a]++] = {e.b, i};
      adj_[cursor[e.b]++] = {e.a, i};
    }
  }

  bool is_connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<NodeId> stack = {0};
    seen[0] = 1;
    NodeId count = 1;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const Arc& a : neighbors(v)) {
        if (!seen[a.to]) {
          seen[a.to] = 1;
          ++count;
          stack.push_back(a.to);
        }
      }
    }
    return count == n_;
  }

  NodeId n_ = 0;
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> adj_offset_;
  std::vector<Arc> adj_;
  double total_measure_ = 0.0;
  double max_edge_length_ = 0.0;
};

// Sorted, deduplicated set of node indices.
struct NodeSet {
  std::vector<NodeId> ids;

  NodeSet() = default;
  explicit NodeSet(std::vector<NodeId> raw) : ids(std::move(raw)) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }

  static NodeSet of(std::initializer_list<NodeId> raw) {
    return NodeSet(std::vector<NodeId>(raw));
  }

  bool empty() const { return ids.empty(); }
  std::size_t size() const { return ids.size(); }
  bool contains(NodeId v) const {
    return std::binary_search(ids.begin(), ids.end(), v);
  }

  void validate(const MetricGraph& g, const char* what) const {
    for (NodeId v : ids) {
      if (v < 0 || v >= g.num_nodes())
        throw ArgumentError(std::string(what) + ": node index out of range");
    }
  }

  bool intersects(const NodeSet& other) const {
    auto it = ids.begin();
    for (NodeId v : other.ids) {
      it = std::lower_bound(it, ids.end(), v);
      if (it == ids.end()) return false;
      if (*it == v) return true;
    }
    return false;
  }

  std::vector<char> mask(NodeId n) const {
    std::vector<char> m(static_cast<std::size_t>(n), 0);
    for (NodeId v : ids) m[static_cast<std::size_t>(v)] = 1;
    return m;
  }

  static NodeSet all(const MetricGraph& g) {
    std::vector<NodeId> v(static_cast<std::size_t>(g.num_nodes()));
    for (NodeId i = 0; i < g.num_nodes(); ++i) v[static_cast<std::size_t>(i)] = i;
    NodeSet s;
    s.ids = std::move(v);
    return s;
  }
};

}  // namespace modlab

#endif  // MODLAB_METRIC_GRAPH_HPP
