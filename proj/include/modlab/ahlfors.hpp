#ifndef MODLAB_AHLFORS_HPP
#define MODLAB_AHLFORS_HPP

#include <cmath>
#include <vector>

#include "modlab/metric_graph.hpp"
#include "modlab/shortest_paths.hpp"

namespace modlab {

struct AhlforsFit {
  double q_hat = 0.0;   // fitted dimension (log-log slope)
  double c_hat = 1.0;   // exp(max |residual|), so both regularity bounds
                        // hold on the sampled range by construction
  double r_min = 0.0;
  double r_max = 0.0;
  double residual = 0.0;  // max |log residual|
};

// The radii a fit samples: n geometrically spaced values from r_min to r_max
// inclusive. Part of the fit contract so callers can reproduce the grid.
inline std::vector<double> ahlfors_radii(double r_min, double r_max, int n_radii) {
  std::vector<double> r(static_cast<std::size_t>(n_radii));
  for (int k = 0; k < n_radii; ++k) {
    double t = n_radii == 1 ? 0.0 : static_cast<double>(k) / (n_radii - 1);
    r[static_cast<std::size_t>(k)] = r_min * std::pow(r_max / r_min, t);
  }
  return r;
}

// Pooled ordinary least squares of log mu(B(x, r)) against log r over all
// sample nodes and radii.
inline AhlforsFit ahlfors_fit(const MetricGraph& g, const NodeSet& sample_nodes,
                              double r_min, double r_max, int n_radii) {
  if (sample_nodes.empty()) throw ArgumentError("ahlfors_fit: no sample nodes");
  sample_nodes.validate(g, "ahlfors_fit");
  if (!(r_min > 0.0) || !(r_min < r_max))
    throw ArgumentError("ahlfors_fit: need 0 < r_min < r_max");
  if (n_radii < 3) throw ArgumentError("ahlfors_fit: need n_radii >= 3");

  const auto radii = ahlfors_radii(r_min, r_max, n_radii);
  std::vector<double> xs, ys;
  xs.reserve(sample_nodes.size() * radii.size());
  ys.reserve(xs.capacity());
  for (NodeId x0 : sample_nodes.ids) {
    auto dist = distance_field(g, x0);
    for (double r : radii) {
      double mu = 0.0;
      for (const Edge& e : g.edges()) {
        const bool ina = dist[e.a] < r, inb = dist[e.b] < r;
        if (ina && inb)
          mu += e.sigma;
        else if (ina || inb)
          mu += 0.5 * e.sigma;
      }
      if (mu <= 0.0) throw GraphError("ahlfors_fit: scale too fine, empty ball");
      xs.push_back(std::log(r));
      ys.push_back(std::log(mu));
    }
  }

  const std::size_t n = xs.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  AhlforsFit fit;
  fit.q_hat = sxy / sxx;
  const double intercept = my - fit.q_hat * mx;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double res = ys[i] - (intercept + fit.q_hat * xs[i]);
    max_abs = std::max(max_abs, std::abs(res));
  }
  fit.residual = max_abs;
  fit.c_hat = std::exp(max_abs);
  fit.r_min = r_min;
  fit.r_max = r_max;
  return fit;
}

}  // namespace modlab

#endif  // MODLAB_AHLFORS_HPP
