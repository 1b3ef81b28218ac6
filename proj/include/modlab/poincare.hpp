#ifndef MODLAB_POINCARE_HPP
#define MODLAB_POINCARE_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "modlab/metric_graph.hpp"
#include "modlab/rng.hpp"
#include "modlab/shortest_paths.hpp"

namespace modlab {

struct ScalarField {
  std::vector<double> u;  // one value per node
};

struct EdgeGradient {
  std::vector<double> g;  // one value per edge, >= 0
};

// Node measure consistent with the edge measure: each node carries half the
// sigma of its incident edges, so total node measure equals total edge
// measure.
inline std::vector<double> node_measures(const MetricGraph& g) {
  std::vector<double> nu(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (const Edge& e : g.edges()) {
    nu[static_cast<std::size_t>(e.a)] += 0.5 * e.sigma;
    nu[static_cast<std::size_t>(e.b)] += 0.5 * e.sigma;
  }
  return nu;
}

// g(e) = |u(a) - u(b)| / l(e): an upper gradient for every edge path by
// telescoping, and pointwise minimal among edge-constant upper gradients.
inline EdgeGradient minimal_upper_gradient(const MetricGraph& g, const ScalarField& u) {
  if (u.u.size() != static_cast<std::size_t>(g.num_nodes()))
    throw ArgumentError("minimal_upper_gradient: field size mismatch");
  for (double v : u.u)
    if (!std::isfinite(v)) throw ArgumentError("minimal_upper_gradient: field must be finite");
  EdgeGradient out;
  out.g.resize(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    out.g[static_cast<std::size_t>(e)] =
        std::abs(u.u[static_cast<std::size_t>(ed.a)] - u.u[static_cast<std::size_t>(ed.b)]) /
        ed.length;
  }
  return out;
}

struct UpperGradientCheck {
  bool ok = true;
  std::vector<NodeId> witness;  // a violating path when ok is false
  explicit operator bool() const { return ok; }
};

// Per-edge check |u(a) - u(b)| <= g(e) l(e); sufficient for all edge paths by
// telescoping. A handful of seeded random walks are verified as well.
inline UpperGradientCheck verify_upper_gradient(const MetricGraph& g,
                                                const ScalarField& u,
                                                const EdgeGradient& grad,
                                                int n_paths = 32,
                                                std::uint64_t seed = 0) {
  if (u.u.size() != static_cast<std::size_t>(g.num_nodes()) ||
      grad.g.size() != static_cast<std::size_t>(g.num_edges()))
    throw ArgumentError("verify_upper_gradient: size mismatch");
  UpperGradientCheck out;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const double lhs = std::abs(u.u[static_cast<std::size_t>(ed.a)] -
                                u.u[static_cast<std::size_t>(ed.b)]);
    const double rhs = grad.g[static_cast<std::size_t>(e)] * ed.length;
    if (lhs > rhs * (1.0 + 1e-12) + 1e-15) {
      out.ok = false;
      out.witness = {ed.a, ed.b};
      return out;
    }
  }
  Rng rng(seed);
  for (int k = 0; k < n_paths; ++k) {
    NodeId v = static_cast<NodeId>(rng.next_index(g.num_nodes()));
    std::vector<NodeId> path = {v};
    double sum = 0.0;
    const int len = 1 + static_cast<int>(rng.next_index(16));
    for (int step = 0; step < len; ++step) {
      auto nb = g.neighbors(v);
      if (nb.empty()) break;
      const auto& arc = nb[static_cast<std::size_t>(rng.next_index(static_cast<std::int64_t>(nb.size())))];
      sum += grad.g[static_cast<std::size_t>(arc.edge)] * g.edge(arc.edge).length;
      v = arc.to;
      path.push_back(v);
    }
    const double lhs = std::abs(u.u[static_cast<std::size_t>(path.front())] -
                                u.u[static_cast<std::size_t>(v)]);
    if (lhs > sum * (1.0 + 1e-12) + 1e-12) {
      out.ok = false;
      out.witness = std::move(path);
      return out;
    }
  }
  return out;
}

struct PoincareBall {
  NodeId center = 0;
  double radius = 0.0;
};

namespace detail {

struct BallContext {
  std::vector<NodeId> b_nodes;       // nodes of B
  std::vector<NodeId> tau_nodes;     // nodes of tau B
  std::vector<double> nu;            // node measures restricted to B
  double nu_total = 0.0;
  std::vector<EdgeId> grad_edges;    // edges with both endpoints in tau B
  double mu_grad = 0.0;              // total sigma of those edges
  double r = 0.0;
};

inline BallContext make_ball_context(const MetricGraph& g, const PoincareBall& ball,
                                     double tau) {
  if (!(ball.radius > 0.0)) throw ArgumentError("poincare: radius > 0 required");
  if (!(tau >= 1.0)) throw ArgumentError("poincare: tau >= 1 required");
  BallContext ctx;
  ctx.r = ball.radius;
  const auto dist = distance_field(g, ball.center);
  std::vector<char> in_tau(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (dist[v] < ball.radius) ctx.b_nodes.push_back(v);
    if (dist[v] < tau * ball.radius) {
      in_tau[v] = 1;
      ctx.tau_nodes.push_back(v);
    }
  }
  if (ctx.b_nodes.empty()) throw ArgumentError("poincare: empty ball");
  const auto nu = node_measures(g);
  for (NodeId v : ctx.b_nodes) {
    ctx.nu.push_back(nu[static_cast<std::size_t>(v)]);
    ctx.nu_total += nu[static_cast<std::size_t>(v)];
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    if (in_tau[ed.a] && in_tau[ed.b]) {
      ctx.grad_edges.push_back(e);
      ctx.mu_grad += ed.sigma;
    }
  }
  if (ctx.grad_edges.empty()) throw ArgumentError("poincare: inflated ball contains no edge");
  return ctx;
}

inline double mean_on_ball(const BallContext& ctx, const std::vector<double>& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < ctx.b_nodes.size(); ++i)
    m += ctx.nu[i] * u[static_cast<std::size_t>(ctx.b_nodes[i])];
  return m / ctx.nu_total;
}

inline double lhs_mean_deviation(const BallContext& ctx, const std::vector<double>& u) {
  const double mean = mean_on_ball(ctx, u);
  double s = 0.0;
  for (std::size_t i = 0; i < ctx.b_nodes.size(); ++i)
    s += ctx.nu[i] * std::abs(u[static_cast<std::size_t>(ctx.b_nodes[i])] - mean);
  return s / ctx.nu_total;
}

inline double rhs_gradient_mean(const MetricGraph& g, const BallContext& ctx,
                                const std::vector<double>& grad, double p) {
  double s = 0.0;
  for (EdgeId e : ctx.grad_edges)
    s += g.edge(e).sigma * std::pow(grad[static_cast<std::size_t>(e)], p);
  return std::pow(s / ctx.mu_grad, 1.0 / p);
}

}  // namespace detail

// Smallest C making the p-Poincare inequality hold for this (u, g, ball):
//   mean_B |u - u_B| <= C r (mean_{tau B} g^p)^(1/p).
// Node means use the half-sigma node measure; the gradient term uses sigma
// on edges inside tau B directly. Returns +inf when the gradient term
// vanishes but the deviation does not.
inline double poincare_ratio(const MetricGraph& g, const PoincareBall& ball,
                             const ScalarField& u, const EdgeGradient& grad,
                             double p, double tau) {
  if (!(p >= 1.0)) throw ArgumentError("poincare_ratio: p >= 1 required");
  if (u.u.size() != static_cast<std::size_t>(g.num_nodes()) ||
      grad.g.size() != static_cast<std::size_t>(g.num_edges()))
    throw ArgumentError("poincare_ratio: size mismatch");
  const auto ctx = detail::make_ball_context(g, ball, tau);
  const double lhs = detail::lhs_mean_deviation(ctx, u.u);
  const double rhs = detail::rhs_gradient_mean(g, ctx, grad.g, p);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / (ctx.r * rhs);
}

struct PoincareReport {
  double C_hat = 0.0;
  double tau = 1.0;
  double p = 2.0;
  PoincareBall ball;
  ScalarField witness;
  std::string method;  // "exact-quadratic" or "sampled"
};

namespace detail {

// Smoothed random field: white noise diffused k steps toward neighbour
// averages. Rough noise under-explores the extremal space.
inline std::vector<double> smoothed_noise(const MetricGraph& g, Rng& rng,
                                          int smoothing_steps) {
  std::vector<double> u(static_cast<std::size_t>(g.num_nodes()));
  for (auto& x : u) x = rng.gaussian();
  std::vector<double> next(u.size());
  for (int s = 0; s < smoothing_steps; ++s) {
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      double acc = u[static_cast<std::size_t>(v)];
      int cnt = 1;
      for (const MetricGraph::Arc& a : g.neighbors(v)) {
        acc += u[static_cast<std::size_t>(a.to)];
        ++cnt;
      }
      next[static_cast<std::size_t>(v)] = acc / cnt;
    }
    std::swap(u, next);
  }
  return u;
}

// Maximizer of (c' u) / sqrt(u' L u) restricted to the tau-ball subgraph,
// via one Cholesky factorization and a solve per right-hand side. The
// pinned node grounds the constant null direction.
class DirichletSolver {
 public:
  DirichletSolver(const MetricGraph& g, const BallContext& ctx) : g_(&g), ctx_(&ctx) {
    index_.assign(static_cast<std::size_t>(g.num_nodes()), -1);
    for (std::size_t i = 0; i < ctx.tau_nodes.size(); ++i)
      index_[static_cast<std::size_t>(ctx.tau_nodes[i])] = static_cast<int>(i);
    // component labels within the tau-ball subgraph
    comp_.assign(ctx.tau_nodes.size(), -1);
    int ncomp = 0;
    for (std::size_t i = 0; i < ctx.tau_nodes.size(); ++i) {
      if (comp_[i] >= 0) continue;
      std::vector<int> stack = {static_cast<int>(i)};
      comp_[i] = ncomp;
      while (!stack.empty()) {
        int k = stack.back();
        stack.pop_back();
        for (const MetricGraph::Arc& a : g.neighbors(ctx.tau_nodes[static_cast<std::size_t>(k)])) {
          int j = index_[static_cast<std::size_t>(a.to)];
          if (j >= 0 && comp_[static_cast<std::size_t>(j)] < 0) {
            comp_[static_cast<std::size_t>(j)] = ncomp;
            stack.push_back(j);
          }
        }
      }
      ++ncomp;
    }
    b_component_ = -2;
    for (NodeId v : ctx.b_nodes) {
      const int c = comp_[static_cast<std::size_t>(index_[static_cast<std::size_t>(v)])];
      if (b_component_ == -2)
        b_component_ = c;
      else if (b_component_ != c)
        b_component_ = -1;  // B straddles components: constant unbounded
    }
    if (b_component_ < 0) return;

    const int n = static_cast<int>(ctx.tau_nodes.size());
    pinned_.assign(static_cast<std::size_t>(n), 0);
    std::vector<char> comp_has_pin(static_cast<std::size_t>(ncomp), 0);
    reduced_index_.assign(static_cast<std::size_t>(n), -1);
    int m = 0;
    for (int i = 0; i < n; ++i) {
      const int c = comp_[static_cast<std::size_t>(i)];
      if (!comp_has_pin[static_cast<std::size_t>(c)]) {
        comp_has_pin[static_cast<std::size_t>(c)] = 1;
        pinned_[static_cast<std::size_t>(i)] = 1;
      } else {
        reduced_index_[static_cast<std::size_t>(i)] = m++;
      }
    }
    Eigen::SparseMatrix<double> L(m, m);
    std::vector<Eigen::Triplet<double>> trip;
    for (EdgeId e : ctx.grad_edges) {
      const Edge& ed = g.edge(e);
      const int ia = reduced_index_[static_cast<std::size_t>(index_[static_cast<std::size_t>(ed.a)])];
      const int ib = reduced_index_[static_cast<std::size_t>(index_[static_cast<std::size_t>(ed.b)])];
      const double c = ed.sigma / (ed.length * ed.length);
      if (ia >= 0) trip.emplace_back(ia, ia, c);
      if (ib >= 0) trip.emplace_back(ib, ib, c);
      if (ia >= 0 && ib >= 0) {
        trip.emplace_back(ia, ib, -c);
        trip.emplace_back(ib, ia, -c);
      }
    }
    L.setFromTriplets(trip.begin(), trip.end());
    chol_.compute(L);
    ok_ = chol_.info() == Eigen::Success;
  }

  bool b_disconnected() const { return b_component_ < 0; }
  bool ok() const { return ok_; }

  // solve L u = c (c supported on tau nodes, orthogonal to constants per
  // component); returns a full-size node field, zero off the tau-ball
  std::vector<double> solve(const std::vector<double>& c_full) const {
    const int n = static_cast<int>(ctx_->tau_nodes.size());
    int m = 0;
    for (int i = 0; i < n; ++i)
      if (reduced_index_[static_cast<std::size_t>(i)] >= 0) ++m;
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < n; ++i) {
      const int k = reduced_index_[static_cast<std::size_t>(i)];
      if (k >= 0)
        rhs[k] = c_full[static_cast<std::size_t>(ctx_->tau_nodes[static_cast<std::size_t>(i)])];
    }
    Eigen::VectorXd x = chol_.solve(rhs);
    std::vector<double> u(static_cast<std::size_t>(g_->num_nodes()), 0.0);
    for (int i = 0; i < n; ++i) {
      const int k = reduced_index_[static_cast<std::size_t>(i)];
      u[static_cast<std::size_t>(ctx_->tau_nodes[static_cast<std::size_t>(i)])] =
          k >= 0 ? x[k] : 0.0;
    }
    return u;
  }

 private:
  const MetricGraph* g_;
  const BallContext* ctx_;
  std::vector<int> index_;
  std::vector<int> comp_;
  std::vector<char> pinned_;
  std::vector<int> reduced_index_;
  int b_component_ = -2;
  bool ok_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

}  // namespace detail

enum class PoincareStrategy { exact_quadratic, sampled };

// Best-constant estimation over the ball. The sampled strategy takes the max
// ratio over n smoothed noise fields (a lower bound on the best constant).
// The exact-quadratic strategy (p = 2 only) ascends over sign patterns: for a
// fixed sign vector s the problem is quadratic with maximizer L^+ c(s), and
// re-reading the signs of the solution is a monotone ascent step; every
// sampled field also serves as a start, so the result dominates the sampled
// estimate by construction.
inline PoincareReport poincare_constant(const MetricGraph& g, const PoincareBall& ball,
                                        double p, double tau,
                                        PoincareStrategy strategy, int n_samples = 48,
                                        std::uint64_t seed = 0,
                                        int smoothing_steps = 3) {
  if (!(p >= 1.0)) throw ArgumentError("poincare_constant: p >= 1 required");
  if (strategy == PoincareStrategy::exact_quadratic && p != 2.0)
    throw ArgumentError("poincare_constant: exact-quadratic strategy requires p = 2");
  if (n_samples < 1) throw ArgumentError("poincare_constant: n_samples >= 1");

  const auto ctx = detail::make_ball_context(g, ball, tau);
  Rng rng(seed);

  PoincareReport rep;
  rep.tau = tau;
  rep.p = p;
  rep.ball = ball;

  auto ratio_of = [&](const std::vector<double>& u) {
    ScalarField f{u};
    const auto grad = minimal_upper_gradient(g, f);
    const double lhs = detail::lhs_mean_deviation(ctx, u);
    const double rhs = detail::rhs_gradient_mean(g, ctx, grad.g, p);
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
    return lhs / (ctx.r * rhs);
  };

  std::vector<std::vector<double>> starts;
  starts.reserve(static_cast<std::size_t>(n_samples) + 4);
  for (int k = 0; k < n_samples; ++k)
    starts.push_back(detail::smoothed_noise(g, rng, smoothing_steps));

  double best = -1.0;
  bool saw_unbounded = false;
  std::vector<double> best_u;
  auto consider = [&](const std::vector<double>& u) {
    const double r = ratio_of(u);
    if (!std::isfinite(r)) {
      saw_unbounded = saw_unbounded || r == kInf;
      return;
    }
    if (r > best) {
      best = r;
      best_u = u;
    }
  };
  for (const auto& u : starts) consider(u);

  if (strategy == PoincareStrategy::sampled) {
    rep.method = "sampled";
    rep.C_hat = saw_unbounded ? kInf : std::max(best, 0.0);
    rep.witness.u = best_u;
    return rep;
  }

  // coordinate fields are strong extremal candidates on embedded graphs
  if (g.has_coords()) {
    for (int k = 0; k < g.dim(); ++k) {
      std::vector<double> u(static_cast<std::size_t>(g.num_nodes()));
      for (NodeId v = 0; v < g.num_nodes(); ++v)
        u[static_cast<std::size_t>(v)] = g.coord(v)[k];
      starts.push_back(std::move(u));
    }
  }

  rep.method = "exact-quadratic";
  detail::DirichletSolver solver(g, ctx);
  if (solver.b_disconnected()) {
    rep.C_hat = kInf;
    return rep;
  }
  if (!solver.ok()) throw GraphError("poincare_constant: factorization failed");

  // sign-pattern ascent from every start
  auto ascend = [&](std::vector<double> u) {
    double cur = ratio_of(u);
    for (int it = 0; it < 64; ++it) {
      const double mean = detail::mean_on_ball(ctx, u);
      std::vector<double> c(static_cast<std::size_t>(g.num_nodes()), 0.0);
      double signed_mass = 0.0;
      for (std::size_t i = 0; i < ctx.b_nodes.size(); ++i) {
        const double s = u[static_cast<std::size_t>(ctx.b_nodes[i])] >= mean ? 1.0 : -1.0;
        c[static_cast<std::size_t>(ctx.b_nodes[i])] = ctx.nu[i] * s;
        signed_mass += ctx.nu[i] * s;
      }
      for (std::size_t i = 0; i < ctx.b_nodes.size(); ++i)
        c[static_cast<std::size_t>(ctx.b_nodes[i])] -=
            signed_mass * ctx.nu[i] / ctx.nu_total;
      auto next = solver.solve(c);
      const double nr = ratio_of(next);
      if (!(nr > cur * (1.0 + 1e-13))) break;
      cur = nr;
      u = std::move(next);
    }
    return std::pair<double, std::vector<double>>{cur, std::move(u)};
  };

  for (const auto& u0 : starts) {
    auto [val, u] = ascend(u0);
    if (std::isfinite(val) && val > best) {
      best = val;
      best_u = std::move(u);
    }
  }
  rep.C_hat = std::max(best, 0.0);
  rep.witness.u = best_u;
  return rep;
}

}  // namespace modlab

#endif  // MODLAB_POINCARE_HPP
