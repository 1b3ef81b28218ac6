#ifndef MODLAB_POROSITY_HPP
#define MODLAB_POROSITY_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "modlab/metric_graph.hpp"
#include "modlab/shortest_paths.hpp"

namespace modlab {

// Finite point set with a metric: either points in R^d with the Euclidean
// metric, or nodes of a MetricGraph under the graph metric.
struct PointSet {
  int dim = 1;
  std::vector<double> coords;  // size() = count * dim

  std::size_t count() const { return coords.size() / static_cast<std::size_t>(dim); }

  double distance(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = coords[i * dim + k] - coords[j * dim + k];
      s += d * d;
    }
    return std::sqrt(s);
  }

  static PointSet line(const std::vector<double>& xs) {
    PointSet p;
    p.dim = 1;
    p.coords = xs;
    return p;
  }
};

struct MetricPoints {
  std::function<double(std::size_t, std::size_t)> distance;
  std::size_t count = 0;

  static MetricPoints of(const PointSet& p) {
    return {[&p](std::size_t i, std::size_t j) { return p.distance(i, j); }, p.count()};
  }
  static MetricPoints of(const MetricGraph& g, std::vector<NodeId> nodes) {
    auto shared = std::make_shared<std::vector<NodeId>>(std::move(nodes));
    const MetricGraph* gp = &g;
    return {[gp, shared](std::size_t i, std::size_t j) {
              return graph_distance(*gp, (*shared)[i], (*shared)[j]);
            },
            shared->size()};
  }
};

// Annulus-emptiness test at each scale: true at r iff no point of E has
// distance to x in [r/t, r*t) — closed inner threshold, open outer.
inline std::vector<bool> porosity_check(const MetricPoints& E, std::size_t x_index,
                                        double t, const std::vector<double>& scales) {
  if (!(t > 1.0)) throw ArgumentError("porosity_check: t > 1 required");
  if (x_index >= E.count) throw ArgumentError("porosity_check: point index out of range");
  for (double r : scales)
    if (!(r > 0.0)) throw ArgumentError("porosity_check: scales must be positive");
  std::vector<double> d(E.count);
  for (std::size_t j = 0; j < E.count; ++j) d[j] = E.distance(x_index, j);
  std::vector<bool> out(scales.size(), true);
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const double inner = scales[s] / t, outer = scales[s] * t;
    for (std::size_t j = 0; j < E.count; ++j) {
      if (d[j] >= inner && d[j] < outer) {  // distance 0 from x itself never qualifies

        out[s] = false;
        break;
      }
    }
  }
  return out;
}

struct ScaleSchedule {
  double r0 = 0.5;
  double factor = 0.5;  // in (0, 1)
  int count = 8;

  std::vector<double> scales() const {
    std::vector<double> r(static_cast<std::size_t>(count));
    double v = r0;
    for (int j = 0; j < count; ++j, v *= factor) r[static_cast<std::size_t>(j)] = v;
    return r;
  }
};

struct PorosityReport {
  struct PerPoint {
    std::size_t index = 0;
    std::vector<double> scales_passed;
    std::vector<double> scales_failed;
  };
  double t = 0.0;
  int m = 0;  // required number of passing scales per point
  std::vector<PerPoint> per_point;
  bool verdict = false;
};

struct PorosityScan {
  std::vector<PorosityReport> reports;        // one per t in the grid
  std::optional<double> smallest_passing_t;
};

// For each t in the grid, run the annulus test at the geometric scale
// schedule for every point; a point passes when at least m scales are empty.
// A finite-scale surrogate of "a sequence of scales tending to zero".
inline PorosityScan porosity_scan(const MetricPoints& E, const std::vector<double>& t_grid,
                                  const ScaleSchedule& schedule, int m) {
  if (!(schedule.factor > 0.0) || !(schedule.factor < 1.0))
    throw ArgumentError("porosity_scan: factor must lie in (0, 1)");
  if (m < 1 || schedule.count < m)
    throw ArgumentError("porosity_scan: need count >= m >= 1");
  const auto scales = schedule.scales();
  PorosityScan scan;
  for (double t : t_grid) {
    PorosityReport rep;
    rep.t = t;
    rep.m = m;
    rep.verdict = true;
    for (std::size_t x = 0; x < E.count; ++x) {
      auto ok = porosity_check(E, x, t, scales);
      PorosityReport::PerPoint pp;
      pp.index = x;
      for (std::size_t s = 0; s < scales.size(); ++s)
        (ok[s] ? pp.scales_passed : pp.scales_failed).push_back(scales[s]);
      if (static_cast<int>(pp.scales_passed.size()) < m) rep.verdict = false;
      rep.per_point.push_back(std::move(pp));
    }
    if (rep.verdict && (!scan.smallest_passing_t || t < *scan.smallest_passing_t))
      scan.smallest_passing_t = t;
    scan.reports.push_back(std::move(rep));
  }
  return scan;
}

}  // namespace modlab

#endif  // MODLAB_POROSITY_HPP
