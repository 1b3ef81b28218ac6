#ifndef MODLAB_GRAPH_IO_HPP
#define MODLAB_GRAPH_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "modlab/metric_graph.hpp"

namespace modlab {

// Line-oriented text format:
//   nodes N edges M dim D
//   node <id> <D coords>          (N lines)
//   edge <a> <b> <length> <sigma> (M lines)
// Whitespace-separated decimal; NaN and nonpositive lengths are rejected.

inline MetricGraph read_graph(std::istream& in) {
  std::string kw;
  NodeId n = 0;
  long m = 0;
  int dim = 0;
  std::string kw2, kw3;
  if (!(in >> kw >> n >> kw2 >> m >> kw3 >> dim) || kw != "nodes" ||
      kw2 != "edges" || kw3 != "dim")
    throw GraphError("graph parse: bad header, expected 'nodes N edges M dim D'");
  if (n <= 0 || m < 0 || dim < 0) throw GraphError("graph parse: bad header counts");

  std::vector<double> coords(static_cast<std::size_t>(n) * dim, 0.0);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (NodeId i = 0; i < n; ++i) {
    NodeId id;
    if (!(in >> kw >> id) || kw != "node")
      throw GraphError("graph parse: expected node line");
    if (id < 0 || id >= n || seen[id])
      throw GraphError("graph parse: node ids must be dense 0..N-1, once each");
    seen[id] = 1;
    for (int k = 0; k < dim; ++k) {
      double c;
      if (!(in >> c) || !std::isfinite(c))
        throw GraphError("graph parse: bad node coordinate");
      coords[static_cast<std::size_t>(id) * dim + k] = c;
    }
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> kw >> e.a >> e.b >> e.length >> e.sigma) || kw != "edge")
      throw GraphError("graph parse: expected edge line");
    if (!std::isfinite(e.length) || e.length <= 0.0)
      throw GraphError("graph parse: edge length must be positive and finite");
    if (!std::isfinite(e.sigma) || e.sigma <= 0.0)
      throw GraphError("graph parse: edge sigma must be positive and finite");
    edges.push_back(e);
  }
  return MetricGraph(n, std::move(edges), std::move(coords), dim);
}

inline MetricGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  return read_graph(in);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_graph(std::ostream& out, const MetricGraph& g) {
  out << "nodes " << g.num_nodes() << " edges " << g.num_edges() << " dim "
      << g.dim() << "\n";
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    out << "node " << v;
    for (double c : g.coord(v)) out << " " << format_double(c);
    out << "\n";
  }
  for (EdgeId i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edge(i);
    out << "edge " << e.a << " " << e.b << " " << format_double(e.length) << " "
        << format_double(e.sigma) << "\n";
  }
}

inline void write_graph_file(const std::string& path, const MetricGraph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file: " + path);
  write_graph(out, g);
}

}  // namespace modlab

#endif  // MODLAB_GRAPH_IO_HPP
