#ifndef MODLAB_SELECTORS_HPP
#define MODLAB_SELECTORS_HPP

#include <sstream>
#include <string>
#include <vector>

#include "modlab/metric_graph.hpp"
#include "modlab/shortest_paths.hpp"

namespace modlab {

// Node-set selectors for curve family specs, parsed from a short text form:
//   all
//   ids 3 7 12            (or comma separated)
//   node 5
//   ball <center> <r>     open metric ball
//   cball <center> <r>    closed metric ball
//   boundary_side left|right|bottom|top
//   complement <selector>
// `mid` is accepted wherever a node id is expected and names the node nearest
// the coordinate centroid.

inline NodeId centroid_node(const MetricGraph& g) {
  if (!g.has_coords()) throw ArgumentError("selector: 'mid' needs coordinates");
  std::vector<double> c(static_cast<std::size_t>(g.dim()), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (int k = 0; k < g.dim(); ++k) c[static_cast<std::size_t>(k)] += g.coord(v)[k];
  for (auto& x : c) x /= g.num_nodes();
  NodeId best = 0;
  double bd = kInf;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      const double d = g.coord(v)[k] - c[static_cast<std::size_t>(k)];
      s += d * d;
    }
    if (s < bd) {
      bd = s;
      best = v;
    }
  }
  return best;
}

inline NodeId parse_node_ref(const MetricGraph& g, const std::string& tok) {
  if (tok == "mid") return centroid_node(g);
  std::size_t pos = 0;
  long v = -1;
  try {
    v = std::stol(tok, &pos);
  } catch (...) {
    throw ArgumentError("selector: bad node reference '" + tok + "'");
  }
  if (pos != tok.size() || v < 0 || v >= g.num_nodes())
    throw ArgumentError("selector: bad node reference '" + tok + "'");
  return static_cast<NodeId>(v);
}

namespace detail {

inline NodeSet boundary_side(const MetricGraph& g, const std::string& side) {
  if (!g.has_coords()) throw ArgumentError("selector: boundary_side needs coordinates");
  int axis;
  bool take_min;
  if (side == "left") {
    axis = 0;
    take_min = true;
  } else if (side == "right") {
    axis = 0;
    take_min = false;
  } else if (side == "bottom") {
    axis = 1;
    take_min = true;
  } else if (side == "top") {
    axis = 1;
    take_min = false;
  } else {
    throw ArgumentError("selector: unknown boundary side '" + side + "'");
  }
  if (axis >= g.dim()) throw ArgumentError("selector: boundary side axis exceeds dim");
  double extreme = take_min ? kInf : -kInf;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const double x = g.coord(v)[axis];
    extreme = take_min ? std::min(extreme, x) : std::max(extreme, x);
  }
  NodeSet s;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (g.coord(v)[axis] == extreme) s.ids.push_back(v);
  return s;
}

inline NodeSet parse_selector_tokens(const MetricGraph& g,
                                     const std::vector<std::string>& tok,
                                     std::size_t& pos) {
  if (pos >= tok.size()) throw ArgumentError("selector: empty expression");
  const std::string head = tok[pos++];
  if (head == "all") return NodeSet::all(g);
  if (head == "node") {
    if (pos >= tok.size()) throw ArgumentError("selector: 'node' needs an id");
    NodeSet s;
    s.ids = {parse_node_ref(g, tok[pos++])};
    return s;
  }
  if (head == "ids") {
    std::vector<NodeId> ids;
    while (pos < tok.size()) ids.push_back(parse_node_ref(g, tok[pos++]));
    if (ids.empty()) throw ArgumentError("selector: 'ids' needs at least one id");
    return NodeSet(std::move(ids));
  }
  if (head == "ball" || head == "cball") {
    if (pos + 1 >= tok.size())
      throw ArgumentError("selector: '" + head + "' needs center and radius");
    const NodeId c = parse_node_ref(g, tok[pos++]);
    double r;
    try {
      r = std::stod(tok[pos++]);
    } catch (...) {
      throw ArgumentError("selector: bad radius");
    }
    return head == "ball" ? metric_ball(g, c, r) : closed_ball(g, c, r);
  }
  if (head == "boundary_side") {
    if (pos >= tok.size()) throw ArgumentError("selector: 'boundary_side' needs a side");
    return boundary_side(g, tok[pos++]);
  }
  if (head == "complement") {
    const NodeSet inner = parse_selector_tokens(g, tok, pos);
    NodeSet s;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (!inner.contains(v)) s.ids.push_back(v);
    return s;
  }
  throw ArgumentError("selector: unknown form '" + head + "'");
}

}  // namespace detail

inline NodeSet parse_node_selector(const MetricGraph& g, const std::string& text) {
  std::vector<std::string> tok;
  std::string piece;
  std::istringstream in(text);
  while (in >> piece) {
    // commas are separators too
    std::string cur;
    for (char ch : piece) {
      if (ch == ',') {
        if (!cur.empty()) tok.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) tok.push_back(cur);
  }
  std::size_t pos = 0;
  NodeSet s = detail::parse_selector_tokens(g, tok, pos);
  if (pos != tok.size()) throw ArgumentError("selector: trailing tokens in '" + text + "'");
  return s;
}

}  // namespace modlab

#endif  // MODLAB_SELECTORS_HPP
