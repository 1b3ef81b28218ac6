#ifndef MODLAB_MODULUS_HPP
#define MODLAB_MODULUS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "modlab/metric_graph.hpp"
#include "modlab/shortest_paths.hpp"

namespace modlab {

// The triple (E, F, U): curves run inside U and join E to F.
struct CurveFamilySpec {
  NodeSet E, F, U;

  void validate(const MetricGraph& g) const {
    E.validate(g, "family E");
    F.validate(g, "family F");
    U.validate(g, "family U");
    if (E.empty() || F.empty()) throw ArgumentError("curve family: E and F must be nonempty");
    if (E.intersects(F)) throw ArgumentError("curve family: E and F must be disjoint");
    for (NodeId v : E.ids)
      if (!U.contains(v)) throw ArgumentError("curve family: E not contained in U");
    for (NodeId v : F.ids)
      if (!U.contains(v)) throw ArgumentError("curve family: F not contained in U");
  }

  static CurveFamilySpec joining(const MetricGraph& g, NodeSet e, NodeSet f) {
    return {std::move(e), std::move(f), NodeSet::all(g)};
  }
};

struct Density {
  std::vector<double> rho;  // one value per edge, >= 0

  double path_length(const MetricGraph& g, std::span<const EdgeId> path) const {
    double L = 0.0;
    for (EdgeId e : path) L += rho[static_cast<std::size_t>(e)] * g.edge(e).length;
    return L;
  }
};

struct PathRef {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
};

enum class SolveStatus { converged, iteration_limit };

struct ModulusResult {
  double value = 0.0;       // primal objective at rho
  Density rho;              // admissible within tol (oracle-verified)
  std::vector<PathRef> active_paths;
  double dual_bound = 0.0;  // certified lower bound on the modulus
  double gap = 0.0;         // value - dual_bound
  int iterations = 0;
  double p = 2.0;
  SolveStatus status = SolveStatus::converged;
  bool vacuous = false;            // no E-F curve inside U
  double min_family_length = kInf; // oracle minimum of the rho-length over the family
};

struct Violation {
  PathRef path;
  double rho_length = 0.0;
};

namespace detail {

// Restricted problem over a finite path set: minimize sum sigma rho^p subject
// to rho-length >= 1 on each path. Solved by cyclic dual coordinate ascent on
// the multipliers; rho follows the stationarity closed form
// rho(e) = (y_e l_e / (p sigma_e))^(1/(p-1)) with y_e the multiplier load.
class RestrictedSolver {
 public:
  RestrictedSolver(const MetricGraph& g, double p) : g_(&g), p_(p) {
    y_.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
    rho_.assign(y_.size(), 0.0);
    touched_.assign(y_.size(), 0);
  }

  void add_path(std::vector<EdgeId> edges) {
    for (EdgeId e : edges)
      if (!touched_[static_cast<std::size_t>(e)]) {
        touched_[static_cast<std::size_t>(e)] = 1;
        support_.push_back(e);
      }
    paths_.push_back(std::move(edges));
    lambda_.push_back(0.0);
  }

  std::size_t num_paths() const { return paths_.size(); }
  const std::vector<std::vector<EdgeId>>& paths() const { return paths_; }
  const std::vector<double>& lambda() const { return lambda_; }

  double rho_at(EdgeId e) const { return rho_[static_cast<std::size_t>(e)]; }
  const std::vector<double>& rho() const { return rho_; }

  double objective() const {
    double obj = 0.0;
    for (EdgeId e : support_) {
      const double r = rho_[static_cast<std::size_t>(e)];
      if (r > 0.0) obj += g_->edge(e).sigma * std::pow(r, p_);
    }
    return obj;
  }

  double dual_value() const {
    double s = 0.0;
    for (double l : lambda_) s += l;
    return s - (p_ - 1.0) * objective();
  }

  double path_length(const std::vector<EdgeId>& path) const {
    double L = 0.0;
    for (EdgeId e : path)
      L += g_->edge(e).length * rho_[static_cast<std::size_t>(e)];
    return L;
  }

  double min_path_length() const {
    double m = kInf;
    for (const auto& path : paths_) m = std::min(m, path_length(path));
    return m;
  }

  // Cyclic sweeps until the restricted primal-dual gap falls below
  // rel_tol * max(value, 1) or the sweep budget runs out.
  bool solve(double rel_tol, int max_sweeps) {
    if (paths_.empty()) throw ArgumentError("inner solve: no paths");
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      for (std::size_t i = 0; i < paths_.size(); ++i) update_path(i);
      if (sweep % 16 == 15) rebuild_loads();
      if (sweep % 4 == 3 || sweep == 0) {
        if (restricted_gap() <= rel_tol) return true;
      }
    }
    rebuild_loads();
    return restricted_gap() <= rel_tol;
  }

  // (feasible value - dual) / max(feasible value, 1) for the restricted problem
  double restricted_gap() const {
    const double minL = min_path_length();
    if (!(minL > 0.0)) return kInf;
    const double feas = objective() / std::pow(minL, p_);
    return (feas - dual_value()) / std::max(feas, 1.0);
  }

 private:
  void set_rho(EdgeId e) {
    const std::size_t i = static_cast<std::size_t>(e);
    const Edge& ed = g_->edge(e);
    rho_[i] = y_[i] <= 0.0
                  ? 0.0
                  : std::pow(y_[i] * ed.length / (p_ * ed.sigma), 1.0 / (p_ - 1.0));
  }

  void apply_delta(std::size_t path_idx, double delta) {
    if (delta == 0.0) return;
    lambda_[path_idx] += delta;
    for (EdgeId e : paths_[path_idx]) {
      const std::size_t i = static_cast<std::size_t>(e);
      y_[i] = std::max(0.0, y_[i] + delta);
      set_rho(e);
    }
  }

  // Maximize the dual in the single coordinate lambda_gamma: pick the value
  // at which the path's rho-length is exactly 1, clamped at 0.
  void update_path(std::size_t idx) {
    const auto& path = paths_[idx];
    if (p_ == 2.0) {
      // length is affine in the coordinate: L(d) = A + B d
      double A = 0.0, B = 0.0;
      for (EdgeId e : path) {
        const Edge& ed = g_->edge(e);
        const std::size_t i = static_cast<std::size_t>(e);
        A += ed.length * ed.length * y_[i] / (2.0 * ed.sigma);
        B += ed.length * ed.length / (2.0 * ed.sigma);
      }
      const double target = (1.0 - A) / B;
      apply_delta(idx, std::max(target, -lambda_[idx]));
      return;
    }
    auto length_at = [&](double d) {
      double L = 0.0;
      for (EdgeId e : path) {
        const Edge& ed = g_->edge(e);
        const double y = y_[static_cast<std::size_t>(e)] + d;
        if (y > 0.0)
          L += ed.length * std::pow(y * ed.length / (p_ * ed.sigma), 1.0 / (p_ - 1.0));
      }
      return L;
    };
    const double lo_limit = -lambda_[idx];
    if (length_at(lo_limit) >= 1.0) {
      apply_delta(idx, lo_limit);
      return;
    }
    double lo = lo_limit, hi = std::max(1.0, -2.0 * lo_limit);
    while (length_at(hi) < 1.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (length_at(mid) < 1.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-14 * (1.0 + std::abs(hi))) break;
    }
    apply_delta(idx, hi);
  }

  void rebuild_loads() {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (std::size_t i = 0; i < paths_.size(); ++i)
      for (EdgeId e : paths_[i]) y_[static_cast<std::size_t>(e)] += lambda_[i];
    for (EdgeId e : support_) set_rho(e);
  }

  const MetricGraph* g_;
  double p_;
  std::vector<std::vector<EdgeId>> paths_;
  std::vector<double> lambda_;
  std::vector<double> y_;
  std::vector<double> rho_;
  std::vector<char> touched_ = {};
  std::vector<EdgeId> support_;
};

inline std::vector<double> oracle_weights(const MetricGraph& g,
                                          const std::vector<double>& rho) {
  std::vector<double> w(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    w[static_cast<std::size_t>(e)] = rho[static_cast<std::size_t>(e)] * g.edge(e).length;
  return w;
}

}  // namespace detail

// Minimum rho-length curve of the family, when that length is below 1 - tol.
// The minimizing path itself is deterministic: fewest edges, then
// lexicographic node order.
inline std::optional<Violation> admissibility_violation(const MetricGraph& g,
                                                        const Density& rho,
                                                        const CurveFamilySpec& fam,
                                                        double tol) {
  fam.validate(g);
  for (double r : rho.rho)
    if (!(r >= 0.0)) throw ArgumentError("admissibility oracle: rho must be nonnegative");
  auto mask = fam.U.mask(g.num_nodes());
  auto w = detail::oracle_weights(g, rho.rho);
  auto best = min_weight_path(g, fam.E, fam.F, w, &mask);
  if (!best) return std::nullopt;
  if (best->weight >= 1.0 - tol) return std::nullopt;
  return Violation{{std::move(best->nodes), std::move(best->edges)}, best->weight};
}

// Restricted-problem solve over explicitly given paths; returns a density
// feasible for those paths and within tol of the restricted optimum. When
// the sweep budget runs out first, the best iterate is returned and
// *converged (if supplied) reports the failure.
inline Density inner_minimize(const MetricGraph& g,
                              const std::vector<std::vector<EdgeId>>& paths, double p,
                              double tol, bool* converged = nullptr) {
  if (paths.empty()) throw ArgumentError("inner_minimize: paths must be nonempty");
  if (!(p > 1.0)) throw ArgumentError("inner_minimize: p > 1 required");
  detail::RestrictedSolver solver(g, p);
  for (const auto& path : paths) {
    if (path.empty()) throw ArgumentError("inner_minimize: empty path");
    solver.add_path(path);
  }
  const bool ok = solver.solve(tol, 20000);
  if (converged) *converged = ok;
  const double minL = solver.min_path_length();
  Density d{solver.rho()};
  if (minL > 0.0 && minL != 1.0)
    for (double& r : d.rho) r /= minL;
  return d;
}

// Lagrangian dual of the restricted program: a certified lower bound for the
// restricted problem, hence for the full modulus when the paths come from the
// family.
inline double dual_lower_bound(const MetricGraph& g,
                               const std::vector<std::vector<EdgeId>>& paths,
                               const std::vector<double>& lambdas, double p) {
  if (paths.size() != lambdas.size())
    throw ArgumentError("dual_lower_bound: one multiplier per path required");
  std::vector<double> y(static_cast<std::size_t>(g.num_edges()), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!(lambdas[i] >= 0.0))
      throw ArgumentError("dual_lower_bound: negative multiplier");
    sum += lambdas[i];
    for (EdgeId e : paths[i]) y[static_cast<std::size_t>(e)] += lambdas[i];
  }
  double obj = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const double ye = y[static_cast<std::size_t>(e)];
    if (ye > 0.0) {
      const Edge& ed = g.edge(e);
      obj += ed.sigma * std::pow(ye * ed.length / (p * ed.sigma), p / (p - 1.0));
    }
  }
  return sum - (p - 1.0) * obj;
}

// Mod_p of the curve family by constraint generation: keep an active path
// set, inner-minimize over it, ask the shortest-path oracle for a violated
// curve, add it, repeat. A converged result carries a two-sided certificate:
// the returned density is admissible within tol over the whole family
// (oracle-verified) and value - dual_bound <= tol * max(value, 1).
inline ModulusResult compute_modulus(const MetricGraph& g, const CurveFamilySpec& fam,
                                     double p, double tol = 1e-6, int max_iter = 20000) {
  fam.validate(g);
  if (!(p > 1.0)) throw ArgumentError("compute_modulus: p > 1 required");
  if (!(tol > 0.0)) throw ArgumentError("compute_modulus: tol > 0 required");

  ModulusResult out;
  out.p = p;
  out.rho.rho.assign(static_cast<std::size_t>(g.num_edges()), 0.0);

  auto mask = fam.U.mask(g.num_nodes());
  auto first = min_weight_path(g, fam.E, fam.F, out.rho.rho /*all zero*/, &mask);
  // zero weights: reuse rho array as the weight vector
  if (!first) {
    out.vacuous = true;
    out.status = SolveStatus::converged;
    return out;
  }

  detail::RestrictedSolver solver(g, p);
  solver.add_path(first->edges);

  double inner_tol = 0.25 * tol;
  out.status = SolveStatus::iteration_limit;
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    solver.solve(inner_tol, iter == 1 ? 2000 : 600);

    const double minL = solver.min_path_length();
    Density rho_hat{solver.rho()};
    if (minL > 0.0)
      for (double& r : rho_hat.rho) r /= minL;
    const double value = solver.objective() / std::pow(minL, p);
    const double dual = solver.dual_value();

    auto w = detail::oracle_weights(g, rho_hat.rho);
    auto best = min_weight_path(g, fam.E, fam.F, w, &mask);
    const double family_min = best ? best->weight : kInf;

    out.rho = std::move(rho_hat);
    out.value = value;
    out.dual_bound = dual;
    out.gap = value - dual;
    out.min_family_length = family_min;

    if (best && family_min < 1.0 - tol) {
      solver.add_path(best->edges);
      continue;
    }
    if (out.gap <= tol * std::max(value, 1.0)) {
      out.status = SolveStatus::converged;
      break;
    }
    inner_tol *= 0.25;  // oracle satisfied but certificate loose: tighten
  }

  for (const auto& path : solver.paths()) {
    const double L = out.rho.path_length(g, path);
    if (L <= 1.0 + tol) {
      PathRef ref;
      ref.edges = path;
      ref.nodes = {};  // filled below
      NodeId cur = -1;
      // reconstruct the node sequence from consecutive shared endpoints
      if (path.size() == 1) {
        ref.nodes = {g.edge(path[0]).a, g.edge(path[0]).b};
      } else if (!path.empty()) {
        const Edge& e0 = g.edge(path[0]);
        const Edge& e1 = g.edge(path[1]);
        cur = (e0.a == e1.a || e0.a == e1.b) ? e0.b : e0.a;
        ref.nodes.push_back(cur);
        for (EdgeId e : path) {
          const Edge& ed = g.edge(e);
          cur = (ed.a == cur) ? ed.b : ed.a;
          ref.nodes.push_back(cur);
        }
      }
      out.active_paths.push_back(std::move(ref));
    }
  }
  return out;
}

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::converged ? "converged" : "iteration-limit";
}

}  // namespace modlab

#endif  // MODLAB_MODULUS_HPP
