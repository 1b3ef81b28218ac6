#ifndef MODLAB_GEOMETRY_LAB_HPP
#define MODLAB_GEOMETRY_LAB_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "modlab/generators.hpp"
#include "modlab/metric_graph.hpp"
#include "modlab/modulus.hpp"
#include "modlab/parallel.hpp"
#include "modlab/rng.hpp"
#include "modlab/shortest_paths.hpp"

namespace modlab {

// dist(E, F) / min(diam E, diam F) for two disjoint continuum surrogates:
// connected node sets with positive diameter.
inline double relative_separation(const MetricGraph& g, const NodeSet& E,
                                  const NodeSet& F) {
  if (E.intersects(F)) throw ArgumentError("relative_separation: sets must be disjoint");
  for (const NodeSet* s : {&E, &F}) {
    if (s->size() < 2) throw ArgumentError("degenerate continuum: need at least two nodes");
    if (!is_connected_subset(g, *s))
      throw ArgumentError("degenerate continuum: set is not connected");
  }
  const double de = set_diameter(g, E), df = set_diameter(g, F);
  if (!(de > 0.0) || !(df > 0.0))
    throw ArgumentError("degenerate continuum: zero diameter");
  return set_distance(g, E, F) / std::min(de, df);
}

struct ExperimentOptions {
  double tol = 1e-3;
  int max_iter = 20000;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// Ring modulus decay

struct RingSample {
  double r = 0.0;
  double log_ratio = 0.0;  // log(R / r)
  double modulus = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::converged;
};

struct RingDecayFit {
  std::vector<RingSample> samples;  // ordered by increasing log(R/r)
  double fitted_exponent = 0.0;     // slope of log(mod) vs log(log(R/r))
  double fitted_C1 = 0.0;           // envelope intercept: bound holds on samples
  double Q = 0.0;
  double R = 0.0;
};

inline CurveFamilySpec ring_family(const MetricGraph& g,
                                   const std::vector<double>& dist, double r,
                                   double R) {
  NodeSet E, F;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (dist[v] <= r) E.ids.push_back(v);
    if (dist[v] >= R) F.ids.push_back(v);
  }
  if (F.empty()) throw ArgumentError("ring family: outer radius exceeds the graph");
  bool has_edge = false;
  for (const Edge& e : g.edges())
    if (dist[e.a] <= r && dist[e.b] <= r) {
      has_edge = true;
      break;
    }
  if (!has_edge) throw GraphError("ring family: scale too fine, inner ball contains no edge");
  return CurveFamilySpec::joining(g, std::move(E), std::move(F));
}

// Mod_Q of the family joining the closed ball B(x0, r) to the complement of
// B(x0, R), per inner radius, with a log-log fit of the decay.
inline RingDecayFit ring_modulus_curve(const MetricGraph& g, NodeId x0,
                                       std::vector<double> r_values, double R,
                                       double Q,
                                       const ExperimentOptions& opt = {}) {
  if (r_values.empty()) throw ArgumentError("ring_modulus_curve: no radii");
  for (double r : r_values)
    if (!(r > 0.0) || !(2.0 * r < R))
      throw ArgumentError("ring_modulus_curve: radii must satisfy 0 < 2r < R");
  std::sort(r_values.begin(), r_values.end(), std::greater<double>());
  const auto dist = distance_field(g, x0);

  RingDecayFit fit;
  fit.Q = Q;
  fit.R = R;
  fit.samples.resize(r_values.size());
  std::vector<CurveFamilySpec> fams;
  fams.reserve(r_values.size());
  for (double r : r_values) fams.push_back(ring_family(g, dist, r, R));
  parallel_for(r_values.size(), opt.threads, [&](std::size_t i) {
    const double r = r_values[i];
    auto res = compute_modulus(g, fams[i], Q, opt.tol, opt.max_iter);
    fit.samples[i] = {r, std::log(R / r), res.value, res.iterations, res.status};
  });

  const std::size_t n = fit.samples.size();
  double mx = 0, my = 0;
  for (const auto& s : fit.samples) {
    mx += std::log(s.log_ratio);
    my += std::log(s.modulus);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& s : fit.samples) {
    const double dx = std::log(s.log_ratio) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(s.modulus) - my);
  }
  fit.fitted_exponent = n > 1 ? sxy / sxx : 0.0;
  const double intercept = my - fit.fitted_exponent * mx;
  double max_res = 0.0;
  for (const auto& s : fit.samples)
    max_res = std::max(max_res, std::log(s.modulus) -
                                    (intercept + fit.fitted_exponent * std::log(s.log_ratio)));
  fit.fitted_C1 = std::exp(intercept + max_res);
  return fit;
}

// Smallest constant making mod <= C1 log(R/r)^(1-Q) hold on the samples.
inline double ring_envelope_constant(const RingDecayFit& fit) {
  double c = 0.0;
  for (const auto& s : fit.samples)
    c = std::max(c, s.modulus * std::pow(s.log_ratio, fit.Q - 1.0));
  return c;
}

// ---------------------------------------------------------------------------
// Sampling of continuum pairs (geodesic segments) for Loewner-type profiles

struct PairSamplerOptions {
  double seg_frac_min = 0.10;  // segment length as a fraction of the scale
  double seg_frac_max = 0.20;
  int attempts_per_pair = 200;
};

struct ContinuumPair {
  NodeSet E, F;
  double relsep = 0.0;
};

namespace detail {

inline NodeId nearest_node(const MetricGraph& g, const std::vector<double>& p,
                           const std::vector<char>* allowed) {
  NodeId best = -1;
  double bd = kInf;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (allowed && !(*allowed)[v]) continue;
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      const double d = g.coord(v)[k] - p[static_cast<std::size_t>(k)];
      s += d * d;
    }
    if (s < bd) {
      bd = s;
      best = v;
    }
  }
  return best;
}

inline std::vector<double> random_unit(Rng& rng, int dim) {
  std::vector<double> u(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : u) {
      x = rng.gaussian();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : u) x /= norm;
  return u;
}

inline std::optional<NodeSet> geodesic_segment(const MetricGraph& g, NodeId a,
                                               NodeId b,
                                               const std::vector<char>* allowed) {
  if (a < 0 || b < 0 || a == b) return std::nullopt;
  std::vector<double> w(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    w[static_cast<std::size_t>(e)] = g.edge(e).length;
  NodeSet A, B;
  A.ids = {a};
  B.ids = {b};
  auto path = min_weight_path(g, A, B, w, allowed);
  if (!path) return std::nullopt;
  return NodeSet(std::move(path->nodes));
}

// One proposal: anchor a geodesic segment, then a second one offset by a
// distance targeted below t * (segment scale); exact relative separation is
// checked afterwards.
inline std::optional<ContinuumPair> propose_pair(const MetricGraph& g, double t,
                                                 double scale,
                                                 const std::vector<double>& lo,
                                                 const std::vector<double>& hi,
                                                 Rng& rng,
                                                 const std::vector<char>* anchor_allowed,
                                                 const PairSamplerOptions& so) {
  const int dim = g.dim();
  const double seg = rng.uniform(so.seg_frac_min, so.seg_frac_max) * scale;
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k)
    x[static_cast<std::size_t>(k)] =
        rng.uniform(lo[static_cast<std::size_t>(k)], hi[static_cast<std::size_t>(k)]);
  auto dir = random_unit(rng, dim);
  std::vector<double> y = x;
  for (int k = 0; k < dim; ++k) {
    y[static_cast<std::size_t>(k)] += seg * dir[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(k)] = std::clamp(y[static_cast<std::size_t>(k)],
                                                lo[static_cast<std::size_t>(k)],
                                                hi[static_cast<std::size_t>(k)]);
  }
  auto E = geodesic_segment(g, nearest_node(g, x, anchor_allowed),
                            nearest_node(g, y, anchor_allowed), nullptr);
  if (!E || E->size() < 2) return std::nullopt;

  const double offset = rng.uniform(0.2, 0.9) * t * seg;
  auto dir2 = random_unit(rng, dim);
  std::vector<double> x2(static_cast<std::size_t>(dim)), y2;
  for (int k = 0; k < dim; ++k)
    x2[static_cast<std::size_t>(k)] =
        std::clamp(0.5 * (x[static_cast<std::size_t>(k)] + y[static_cast<std::size_t>(k)]) +
                       (offset + 0.5 * seg) * dir2[static_cast<std::size_t>(k)],
                   lo[static_cast<std::size_t>(k)], hi[static_cast<std::size_t>(k)]);
  auto dir3 = random_unit(rng, dim);
  y2 = x2;
  for (int k = 0; k < dim; ++k)
    y2[static_cast<std::size_t>(k)] =
        std::clamp(y2[static_cast<std::size_t>(k)] + seg * dir3[static_cast<std::size_t>(k)],
                   lo[static_cast<std::size_t>(k)], hi[static_cast<std::size_t>(k)]);
  auto F = geodesic_segment(g, nearest_node(g, x2, anchor_allowed),
                            nearest_node(g, y2, anchor_allowed), nullptr);
  if (!F || F->size() < 2) return std::nullopt;
  if (E->intersects(*F)) return std::nullopt;

  double relsep;
  try {
    relsep = relative_separation(g, *E, *F);
  } catch (const ArgumentError&) {
    return std::nullopt;
  }
  if (relsep > t) return std::nullopt;
  return ContinuumPair{std::move(*E), std::move(*F), relsep};
}

inline std::vector<ContinuumPair> sample_pairs(const MetricGraph& g, double t,
                                               double scale,
                                               const std::vector<double>& lo,
                                               const std::vector<double>& hi,
                                               int want, Rng rng,
                                               const std::vector<char>* anchor_allowed,
                                               const PairSamplerOptions& so) {
  std::vector<ContinuumPair> out;
  const long cap = static_cast<long>(so.attempts_per_pair) * want;
  for (long attempt = 0; attempt < cap && static_cast<int>(out.size()) < want;
       ++attempt) {
    auto pair = propose_pair(g, t, scale, lo, hi, rng, anchor_allowed, so);
    if (pair) out.push_back(std::move(*pair));
  }
  return out;
}

inline void coord_bounds(const MetricGraph& g, const std::vector<char>* allowed,
                         std::vector<double>& lo, std::vector<double>& hi) {
  const int dim = g.dim();
  lo.assign(static_cast<std::size_t>(dim), kInf);
  hi.assign(static_cast<std::size_t>(dim), -kInf);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (allowed && !(*allowed)[v]) continue;
    for (int k = 0; k < dim; ++k) {
      lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], g.coord(v)[k]);
      hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], g.coord(v)[k]);
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Loewner profile

struct LoewnerEstimate {
  struct Sample {
    double t = 0.0;
    double phi_hat = 0.0;  // monotone envelope (running minimum over t)
    double phi_raw = 0.0;  // sampled minimum at this t alone
    int pairs = 0;
    bool flagged = false;  // sampler could not produce the requested pairs
  };
  std::vector<Sample> profile;
  int pairs_per_t = 0;
};

// phi_hat(t): sampled minimum of Mod_Q over pairs of disjoint geodesic
// segments with relative separation <= t. An upper estimate of the true
// infimum; monotonicity in t is enforced by a running minimum afterwards,
// raw values are retained.
inline LoewnerEstimate loewner_profile(const MetricGraph& g, double Q,
                                       const std::vector<double>& t_values,
                                       int pairs_per_t, std::uint64_t seed,
                                       const ExperimentOptions& opt = {},
                                       const PairSamplerOptions& so = {}) {
  if (t_values.empty()) throw ArgumentError("loewner_profile: no t values");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0)) throw ArgumentError("loewner_profile: t must be positive");
    if (i > 0 && !(t_values[i] > t_values[i - 1]))
      throw ArgumentError("loewner_profile: t values must be strictly increasing");
  }
  if (!g.has_coords())
    throw ArgumentError("loewner_profile: sampler needs node coordinates");
  if (pairs_per_t < 1) throw ArgumentError("loewner_profile: pairs_per_t >= 1");

  std::vector<double> lo, hi;
  detail::coord_bounds(g, nullptr, lo, hi);
  double scale = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k)
    scale += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  scale = std::sqrt(scale);

  Rng rng(seed);
  LoewnerEstimate est;
  est.pairs_per_t = pairs_per_t;
  est.profile.resize(t_values.size());

  std::vector<std::vector<ContinuumPair>> pairs(t_values.size());
  for (std::size_t i = 0; i < t_values.size(); ++i)
    pairs[i] = detail::sample_pairs(g, t_values[i], scale, lo, hi, pairs_per_t,
                                    rng.fork(i), nullptr, so);

  std::vector<std::vector<double>> mods(t_values.size());
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    mods[i].assign(pairs[i].size(), 0.0);
    for (std::size_t j = 0; j < pairs[i].size(); ++j) tasks.push_back({i, j});
  }
  parallel_for(tasks.size(), opt.threads, [&](std::size_t k) {
    auto [i, j] = tasks[k];
    auto fam = CurveFamilySpec::joining(g, pairs[i][j].E, pairs[i][j].F);
    mods[i][j] = compute_modulus(g, fam, Q, opt.tol, opt.max_iter).value;
  });

  double envelope = kInf;
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    auto& s = est.profile[i];
    s.t = t_values[i];
    s.pairs = static_cast<int>(pairs[i].size());
    s.flagged = s.pairs < pairs_per_t;
    s.phi_raw = kInf;
    for (double m : mods[i]) s.phi_raw = std::min(s.phi_raw, m);
    if (s.pairs == 0) s.phi_raw = std::nan("");
    if (!std::isnan(s.phi_raw)) envelope = std::min(envelope, s.phi_raw);
    s.phi_hat = envelope == kInf ? std::nan("") : envelope;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Bounded geometry probe (local version: continua in B(x0, lambda r), curves
// confined to B(x0, r))

struct BoundedGeometryParams {
  double C0 = 0.0;
  double lambda = 1.0;
  std::vector<LoewnerEstimate::Sample> psi_samples;
};

inline BoundedGeometryParams bounded_geometry_probe(
    const MetricGraph& g, NodeId x0, double r, double lambda, double Q,
    const std::vector<double>& t_values, int pairs_per_t, std::uint64_t seed,
    const ExperimentOptions& opt = {}, const PairSamplerOptions& so = {}) {
  if (!(lambda > 0.0) || !(lambda <= 1.0))
    throw ArgumentError("bounded_geometry_probe: lambda must lie in (0, 1]");
  if (!(r > 0.0)) throw ArgumentError("bounded_geometry_probe: r > 0 required");

  BoundedGeometryParams out;
  out.lambda = lambda;
  for (int k = 1; k <= 8; ++k) {
    const double rr = r * k / 8.0;
    out.C0 = std::max(out.C0, ball_measure(g, x0, rr) / std::pow(rr, Q));
  }

  const NodeSet ball = metric_ball(g, x0, r);
  const NodeSet inner = metric_ball(g, x0, lambda * r);
  if (inner.size() < 2)
    throw GraphError("bounded_geometry_probe: scale too fine, inner ball too small");
  auto ball_mask = ball.mask(g.num_nodes());
  auto inner_mask = inner.mask(g.num_nodes());

  std::vector<double> lo, hi;
  detail::coord_bounds(g, g.has_coords() ? &inner_mask : nullptr, lo, hi);

  Rng rng(seed);
  out.psi_samples.resize(t_values.size());
  double envelope = kInf;
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0))
      throw ArgumentError("bounded_geometry_probe: t must be positive");
    auto pairs = detail::sample_pairs(g, t_values[i], 2.0 * lambda * r, lo, hi,
                                      pairs_per_t, rng.fork(i), &inner_mask, so);
    // continua must stay inside the inner ball
    std::vector<ContinuumPair> kept;
    for (auto& pr : pairs) {
      bool inside = true;
      for (NodeId v : pr.E.ids)
        if (!inner_mask[v]) inside = false;
      for (NodeId v : pr.F.ids)
        if (!inner_mask[v]) inside = false;
      if (inside) kept.push_back(std::move(pr));
    }
    auto& s = out.psi_samples[i];
    s.t = t_values[i];
    s.pairs = static_cast<int>(kept.size());
    s.flagged = s.pairs < pairs_per_t;
    s.phi_raw = kInf;
    std::vector<double> mods(kept.size(), 0.0);
    parallel_for(kept.size(), opt.threads, [&](std::size_t j) {
      CurveFamilySpec fam{kept[j].E, kept[j].F, ball};
      mods[j] = compute_modulus(g, fam, Q, opt.tol, opt.max_iter).value;
    });
    for (double m : mods) s.phi_raw = std::min(s.phi_raw, m);
    if (s.pairs == 0) s.phi_raw = std::nan("");
    if (!std::isnan(s.phi_raw)) envelope = std::min(envelope, s.phi_raw);
    s.phi_hat = envelope == kInf ? std::nan("") : envelope;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quasiconformal distortion: modulus quasi-invariance and metric dilatation

struct FamilyDistortion {
  double mod_source = 0.0;
  double mod_image = 0.0;
  double ratio = 1.0;
  bool skipped = false;  // vacuous family
};

struct DistortionReport {
  double modulus_ratio_K = 1.0;
  double dilatation_H = std::nan("");  // filled by metric_dilatation callers
  std::vector<FamilyDistortion> per_family;
};

// Worst two-sided modulus distortion over the given families. The image
// graph must share node indices with the source (as produced by
// apply_vertex_map), so image families reuse the same node sets.
inline DistortionReport modulus_ratio(const MetricGraph& g, const MetricGraph& g_img,
                                      const std::vector<CurveFamilySpec>& families,
                                      double Q, const ExperimentOptions& opt = {}) {
  if (g_img.num_nodes() != g.num_nodes())
    throw ArgumentError("modulus_ratio: image graph must share the node index space");
  if (families.empty()) throw ArgumentError("modulus_ratio: no families");
  DistortionReport rep;
  rep.per_family.resize(families.size());
  parallel_for(families.size(), opt.threads, [&](std::size_t i) {
    auto src = compute_modulus(g, families[i], Q, opt.tol, opt.max_iter);
    auto img = compute_modulus(g_img, families[i], Q, opt.tol, opt.max_iter);
    auto& fd = rep.per_family[i];
    fd.mod_source = src.value;
    fd.mod_image = img.value;
    if (src.vacuous || img.vacuous || src.value <= 0.0 || img.value <= 0.0) {
      fd.skipped = true;
      fd.ratio = std::nan("");
      return;
    }
    fd.ratio = std::max(fd.mod_image / fd.mod_source, fd.mod_source / fd.mod_image);
  });
  rep.modulus_ratio_K = 1.0;
  for (const auto& fd : rep.per_family)
    if (!fd.skipped) rep.modulus_ratio_K = std::max(rep.modulus_ratio_K, fd.ratio);
  return rep;
}

// Worst discrete dilatation quotient at x over the given radii:
//   max{ d'(fx, fy) : d(x,y) <= r } / min{ d'(fx, fy) : r <= d(x,y) <= cap*r }.
// The outer cutoff keeps the denominator a local quantity.
inline double metric_dilatation(const MetricGraph& g, const MetricGraph& g_img,
                                NodeId x, const std::vector<double>& r_values,
                                double outer_cap = 4.0) {
  if (g_img.num_nodes() != g.num_nodes())
    throw ArgumentError("metric_dilatation: image graph must share the node index space");
  if (x < 0 || x >= g.num_nodes()) throw ArgumentError("metric_dilatation: bad node");
  const auto d = distance_field(g, x);
  const auto dp = distance_field(g_img, x);
  double H = 0.0;
  bool any = false;
  for (double r : r_values) {
    if (!(r > 0.0)) throw ArgumentError("metric_dilatation: radii must be positive");
    double num = -kInf, den = kInf;
    for (NodeId y = 0; y < g.num_nodes(); ++y) {
      if (y == x) continue;
      if (d[y] <= r) num = std::max(num, dp[y]);
      if (d[y] >= r && d[y] <= outer_cap * r) den = std::min(den, dp[y]);
    }
    if (num < 0.0 || den == kInf || den <= 0.0) continue;  // empty comparison set
    H = std::max(H, num / den);
    any = true;
  }
  if (!any) throw ArgumentError("metric_dilatation: no radius produced a quotient");
  return H;
}

// ---------------------------------------------------------------------------
// Puncture experiment (the modulus chain around a puncture)

struct PunctureReport {
  enum class Verdict { none, point_like, continuum_like };

  std::vector<double> radii;         // strictly decreasing
  double r0 = 0.0;
  double Q = 0.0;
  std::vector<double> mod_source;    // Mod_Q of the annulus-crossing family
  std::vector<double> ring_modulus;  // Mod_Q of the enclosing ring family
  std::vector<double> lemma_bound;   // C1_env * log(r0/r)^(1-Q)
  std::vector<char> bound_ok;
  double C1_env = 0.0;
  bool has_map = false;
  std::vector<double> mod_image;
  std::vector<double> cluster_diameter;
  double point_threshold = 0.0;  // 3 x ambient image mesh
  Verdict verdict = Verdict::none;
};

namespace detail {

inline NodeSet inner_shell(const MetricGraph& g, const std::vector<double>& dist,
                           double r) {
  NodeSet s;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (dist[v] > r) continue;
    for (const MetricGraph::Arc& a : g.neighbors(v))
      if (dist[a.to] > r) {
        s.ids.push_back(v);
        break;
      }
  }
  return s;
}

inline NodeSet outer_shell(const MetricGraph& g, const std::vector<double>& dist,
                           double r) {
  NodeSet s;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (dist[v] < r) continue;
    for (const MetricGraph::Arc& a : g.neighbors(v))
      if (dist[a.to] < r) {
        s.ids.push_back(v);
        break;
      }
  }
  return s;
}

inline double coord_set_diameter(const MetricGraph& g, const NodeSet& s) {
  double best = 0.0;
  for (std::size_t i = 0; i < s.ids.size(); ++i)
    for (std::size_t j = i + 1; j < s.ids.size(); ++j)
      best = std::max(best, g.coord_distance(s.ids[i], s.ids[j]));
  return best;
}

}  // namespace detail

// For each radius r_i, Mod_Q of the curves crossing the annulus from the
// sphere at r_i to the sphere at r0, checked against the ring-modulus decay
// bound fitted on the same run. With a map, the image moduli and the
// diameter of the image cluster approximation decide the verdict: point-like
// when the finest cluster collapses to the scale of the ambient image mesh.
inline PunctureReport puncture_experiment(const MetricGraph& g, NodeId x0,
                                          const VertexMap* map, double r0,
                                          const std::vector<double>& radii, double Q,
                                          const ExperimentOptions& opt = {}) {
  if (radii.empty()) throw ArgumentError("puncture_experiment: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ArgumentError("puncture_experiment: radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw ArgumentError("puncture_experiment: radii must be strictly decreasing");
    if (!(2.0 * radii[i] < r0))
      throw ArgumentError("puncture_experiment: radii must satisfy 2r < r0");
  }
  const auto dist = distance_field(g, x0);
  bool interior = false;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dist[v] > r0) {
      interior = true;
      break;
    }
  if (!interior)
    throw ArgumentError("puncture_experiment: x0 is not interior at scale r0");

  PunctureReport rep;
  rep.radii = radii;
  rep.r0 = r0;
  rep.Q = Q;
  const NodeSet outer = detail::outer_shell(g, dist, r0);

  const std::size_t n = radii.size();
  rep.mod_source.assign(n, 0.0);
  rep.ring_modulus.assign(n, 0.0);
  rep.lemma_bound.assign(n, 0.0);
  rep.bound_ok.assign(n, 0);

  std::vector<CurveFamilySpec> annulus_fams, ring_fams;
  for (double r : radii) {
    NodeSet inner = detail::inner_shell(g, dist, r);
    if (inner.empty())
      throw GraphError("puncture_experiment: scale too fine, empty inner sphere");
    NodeSet domain;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (dist[v] >= r && dist[v] <= r0) domain.ids.push_back(v);
    for (NodeId v : inner.ids)
      if (dist[v] < r) domain.ids.push_back(v);
    for (NodeId v : outer.ids)
      if (dist[v] > r0) domain.ids.push_back(v);
    annulus_fams.push_back({inner, outer, NodeSet(std::move(domain.ids))});
    ring_fams.push_back(ring_family(g, dist, r, r0));
  }

  parallel_for(2 * n, opt.threads, [&](std::size_t k) {
    const std::size_t i = k / 2;
    if (k % 2 == 0)
      rep.mod_source[i] =
          compute_modulus(g, annulus_fams[i], Q, opt.tol, opt.max_iter).value;
    else
      rep.ring_modulus[i] =
          compute_modulus(g, ring_fams[i], Q, opt.tol, opt.max_iter).value;
  });

  for (std::size_t i = 0; i < n; ++i)
    rep.C1_env = std::max(rep.C1_env,
                          rep.ring_modulus[i] * std::pow(std::log(r0 / radii[i]), Q - 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    rep.lemma_bound[i] = rep.C1_env * std::pow(std::log(r0 / radii[i]), 1.0 - Q);
    // the two moduli carry independent solver error of order tol each
    rep.bound_ok[i] =
        rep.mod_source[i] <= rep.lemma_bound[i] * (1.0 + 2.0 * opt.tol) + 1e-12;
  }

  if (map) {
    rep.has_map = true;
    const MetricGraph g_img = apply_vertex_map(g, *map);
    rep.mod_image.assign(n, 0.0);
    rep.cluster_diameter.assign(n, 0.0);
    parallel_for(n, opt.threads, [&](std::size_t i) {
      rep.mod_image[i] =
          compute_modulus(g_img, annulus_fams[i], Q, opt.tol, opt.max_iter).value;
    });
    NodeSet cluster_finest;
    for (std::size_t i = 0; i < n; ++i) {
      NodeSet cluster;
      for (NodeId v = 0; v < g.num_nodes(); ++v)
        if (v != x0 && dist[v] <= radii[i]) cluster.ids.push_back(v);
      rep.cluster_diameter[i] = detail::coord_set_diameter(g_img, cluster);
      if (i + 1 == n) cluster_finest = std::move(cluster);
    }
    // ambient mesh: the image resolution around the cluster, excluding edges
    // that measure the cluster itself or touch the puncture
    auto in_cluster = cluster_finest.mask(g.num_nodes());
    double mesh = 0.0;
    for (const Edge& e : g_img.edges()) {
      if (e.a == x0 || e.b == x0 || in_cluster[e.a] || in_cluster[e.b]) continue;
      mesh = std::max(mesh, e.length);
    }
    rep.point_threshold = 3.0 * mesh;
    rep.verdict = rep.cluster_diameter.back() <= rep.point_threshold
                      ? PunctureReport::Verdict::point_like
                      : PunctureReport::Verdict::continuum_like;
  }
  return rep;
}

inline const char* to_string(PunctureReport::Verdict v) {
  switch (v) {
    case PunctureReport::Verdict::point_like:
      return "point-like";
    case PunctureReport::Verdict::continuum_like:
      return "continuum-like";
    default:
      return "none";
  }
}

}  // namespace modlab

#endif  // MODLAB_GEOMETRY_LAB_HPP
