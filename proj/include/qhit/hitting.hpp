#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qhit/error.hpp"
#include "qhit/graph.hpp"
#include "qhit/quantum.hpp"
#include "qhit/stochastic.hpp"

namespace qhit {

enum class WalkKind { Quantum, Classical };

inline const char* to_string(WalkKind k) { return k == WalkKind::Quantum ? "quantum" : "classical"; }

struct HittingCurve {
  std::vector<double> z;
  std::vector<double> p_exit;
  double z_opt = 0.0;
  double p_opt = 0.0;
  WalkKind kind = WalkKind::Quantum;
  // Set when the grid maximum sits on the first or last sample.
  bool boundary_maximum = false;
};

/// Scan window sized to hold the first-arrival peak of a depth-n hexagonal graph.
inline constexpr double kWindowPerDepth = 3.5;
inline constexpr double kStepPerCoupling = 0.01;
/// Fig. 2 sample length used to pin the coupling scale.
inline constexpr double kCalibrationLength = 25.2;

inline double default_window(int depth, double coupling) { return kWindowPerDepth * depth / coupling; }
inline double default_step(double coupling) { return kStepPerCoupling / coupling; }

namespace detail {

// Vertex of the parabola through (-1, a), (0, b), (1, c), as an offset in [-1, 1].
inline double parabolic_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
}

template <typename Probability>
HittingCurve scan_curve(Probability&& prob, WalkKind kind, double z_max, double dz, double z_offset) {
  require(std::isfinite(z_max) && z_max > 0.0, ErrorKind::InvalidParameter, "scan window must be > 0");
  require(std::isfinite(dz) && dz > 0.0, ErrorKind::InvalidParameter, "scan step must be > 0");
  require(z_offset >= 0.0 && z_offset < dz, ErrorKind::InvalidParameter, "grid offset must lie in [0, dz)");
  HittingCurve curve;
  curve.kind = kind;
  const auto count = static_cast<std::size_t>(std::floor((z_max - z_offset) / dz * (1.0 + 1e-12))) + 1;
  require(count >= 3, ErrorKind::InvalidParameter, "scan window holds fewer than 3 samples");
  curve.z.resize(count);
  curve.p_exit.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    curve.z[k] = z_offset + double(k) * dz;
    curve.p_exit[k] = prob(curve.z[k]);
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(curve.p_exit.begin(), curve.p_exit.end()) - curve.p_exit.begin());
  curve.z_opt = curve.z[best];
  curve.p_opt = curve.p_exit[best];
  if (best == 0 || best + 1 == count) {
    curve.boundary_maximum = true;
    return curve;
  }
  const double offset = parabolic_offset(curve.p_exit[best - 1], curve.p_exit[best], curve.p_exit[best + 1]);
  const double z_ref = curve.z[best] + offset * dz;
  const double p_ref = prob(z_ref);
  if (p_ref >= curve.p_opt) {
    curve.z_opt = z_ref;
    curve.p_opt = p_ref;
  }
  return curve;
}

}  // namespace detail

/// Exit probability of the entry-launched quantum walk on the grid
/// z_offset + k dz <= z_max, with the global maximum refined parabolically.
inline HittingCurve quantum_hitting_curve(const SpectralDecomposition& spectrum, const Graph& g, double z_max,
                                          double dz, double z_offset = 0.0) {
  const TransitionAmplitude amp(spectrum, g.entry(), g.exit());
  return detail::scan_curve([&](double z) { return amp.probability(z); }, WalkKind::Quantum, z_max, dz, z_offset);
}

inline HittingCurve quantum_hitting_curve(const Graph& g, const CouplingModel& cm, double z_max, double dz,
                                          double z_offset = 0.0) {
  return quantum_hitting_curve(decompose(build_hamiltonian(g, cm)), g, z_max, dz, z_offset);
}

/// Exit probability of the classical walk from the entry node.
inline HittingCurve classical_hitting_curve(const Graph& g, double rate, double t_max, double dt) {
  const auto spectrum = decompose(ClassicalGenerator(g, rate));
  const auto p0 = indicator(g.size(), g.entry());
  const auto exit = Eigen::Index(g.exit());
  return detail::scan_curve([&](double t) { return evolve_classical(spectrum, p0, t)(exit); }, WalkKind::Classical,
                            t_max, dt, 0.0);
}

/// Coupling that places the depth-2 hexagonal optimum at the calibration length.
inline double calibrated_coupling(double target_length = kCalibrationLength) {
  const Graph g = hexagonal_graph(2);
  const auto curve = quantum_hitting_curve(g, CouplingModel{1.0, 0.0}, default_window(2, 1.0), default_step(1.0));
  return curve.z_opt / target_length;
}

struct ConvergenceResult {
  double t_converge = 0.0;
  double epsilon = 1e-4;
  double p_a = 0.0;
  double t_low = 0.0;   // threshold 1e-3
  double t_high = 0.0;  // threshold 1e-5
};

struct ConvergenceOptions {
  double sample_step = 0.5;  // in units of 1/gamma
  double cap = 1e5;          // in units of 1/gamma
  int stay_checks = 10;
};

inline constexpr double kLowThreshold = 1e-3;
inline constexpr double kHighThreshold = 1e-5;

/// max_i |p_i - P_a| / P_a.
inline double relative_deviation(const ProbabilityVector& p) {
  const double pa = 1.0 / double(p.size());
  return (p.array() - pa).abs().maxCoeff() / pa;
}

namespace detail {

inline double first_settled_time(const SpectralDecomposition& spectrum, const ProbabilityVector& p0, double eps,
                                 double step, double cap, int checks) {
  auto passes = [&](double t) { return relative_deviation(evolve_classical(spectrum, p0, t)) <= eps; };
  auto stays = [&](double t) {
    for (int j = 1; j <= checks; ++j)
      if (!passes(t + j * step)) return false;
    return true;
  };
  if (passes(0.0) && stays(0.0)) return 0.0;
  for (long long k = 1;; ++k) {
    const double t = double(k) * step;
    require(t <= cap, ErrorKind::CapExceeded, "classical walk did not settle before the search cap");
    if (!passes(t) || !stays(t)) continue;
    double lo = t - step, hi = t;
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (passes(mid) ? hi : lo) = mid;
    }
    return hi;
  }
}

}  // namespace detail

/// Earliest time at which every site stays within eps * P_a of P_a = 1/N, for
/// the walk launched at the entry node. Brackets use the 1e-3 and 1e-5 thresholds.
inline ConvergenceResult classical_convergence_time(const Graph& g, double rate, double eps = 1e-4,
                                                    const ConvergenceOptions& opts = {}) {
  require(std::isfinite(rate) && rate > 0.0, ErrorKind::InvalidParameter, "rate must be > 0");
  require(eps > 0.0 && eps < 1.0, ErrorKind::InvalidParameter, "threshold must lie in (0, 1)");
  require(g.is_connected(), ErrorKind::NoConvergence, "graph is not connected; no uniform limit");
  const auto spectrum = decompose(ClassicalGenerator(g, rate));
  const auto p0 = indicator(g.size(), g.entry());
  const double step = opts.sample_step / rate;
  const double cap = opts.cap / rate;
  auto settle = [&](double e) { return detail::first_settled_time(spectrum, p0, e, step, cap, opts.stay_checks); };
  ConvergenceResult r;
  r.epsilon = eps;
  r.p_a = 1.0 / double(g.size());
  r.t_converge = settle(eps);
  r.t_low = settle(kLowThreshold);
  r.t_high = settle(kHighThreshold);
  return r;
}

struct SweepRow {
  int n = 0;
  double z_opt = 0.0;
  double p_opt = 0.0;
  double t_converge = 0.0;
  double t_low = 0.0;
  double t_high = 0.0;
  double p_a = 0.0;
  bool boundary_maximum = false;
};

struct SweepOptions {
  double window_per_depth = kWindowPerDepth;  // z_max = window_per_depth * n / C
  double step_per_coupling = kStepPerCoupling; // dz = step_per_coupling / C
  bool parallel = true;
};

inline SweepRow sweep_depth(int n, const CouplingModel& cm, double rate, const SweepOptions& opts) {
  const Graph g = hexagonal_graph(n);
  const auto curve = quantum_hitting_curve(g, cm, opts.window_per_depth * n / cm.coupling,
                                           opts.step_per_coupling / cm.coupling);
  const auto conv = classical_convergence_time(g, rate);
  return {n, curve.z_opt, curve.p_opt, conv.t_converge, conv.t_low, conv.t_high, conv.p_a, curve.boundary_maximum};
}

/// One row per hexagonal depth, sorted by n regardless of completion order.
inline std::vector<SweepRow> depth_sweep(std::span<const int> depths, const CouplingModel& cm, double rate,
                                         const SweepOptions& opts = {}) {
  require(!depths.empty(), ErrorKind::InvalidParameter, "depth range is empty");
  cm.validate();
  for (int n : depths) require(n >= 1, ErrorKind::InvalidParameter, "depths must be >= 1");
  std::vector<SweepRow> rows;
  if (opts.parallel) {
    std::vector<std::future<SweepRow>> jobs;
    for (int n : depths) jobs.push_back(std::async(std::launch::async, sweep_depth, n, cm, rate, opts));
    for (auto& j : jobs) rows.push_back(j.get());
  } else {
    for (int n : depths) rows.push_back(sweep_depth(n, cm, rate, opts));
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.n < b.n; });
  return rows;
}

enum class FitModel { Linear, PowerLaw };

inline const char* to_string(FitModel m) { return m == FitModel::Linear ? "linear" : "power-law"; }

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
};

/// y = slope * x + intercept, or ln y = slope * ln x + intercept for power laws.
struct FitResult {
  FitModel model = FitModel::Linear;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;

  double predict(double x) const {
    return model == FitModel::Linear ? slope * x + intercept : std::exp(intercept) * std::pow(x, slope);
  }
};

namespace detail {

inline FitResult least_squares(std::span<const FitPoint> pts, FitModel model) {
  require(pts.size() >= 3, ErrorKind::FitError, "at least 3 points are required");
  const double n = double(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  require(sxx > 0.0, ErrorKind::FitError, "all abscissae are equal");
  FitResult r;
  r.model = model;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (const auto& p : pts) {
    const double res = p.y - (r.slope * p.x + r.intercept);
    r.residuals.push_back(res);
    ss_res += res * res;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return r;
}

}  // namespace detail

inline FitResult fit_linear(std::span<const FitPoint> pts) { return detail::least_squares(pts, FitModel::Linear); }

/// Least squares on (ln x, ln y); slope is the exponent. Residuals are in log space.
inline FitResult fit_power(std::span<const FitPoint> pts) {
  std::vector<FitPoint> logs;
  logs.reserve(pts.size());
  for (const auto& p : pts) {
    require(p.x > 0.0 && p.y > 0.0, ErrorKind::FitError, "power-law fit needs positive coordinates");
    logs.push_back({std::log(p.x), std::log(p.y)});
  }
  return detail::least_squares(logs, FitModel::PowerLaw);
}

struct VarianceSample {
  double z = 0.0;
  double variance = 0.0;
  double end_probability = 0.0;  // max of the two end-site probabilities
};

/// Position variance about the launch site for a walk on path_graph(m).
/// `rate` is the coupling C (quantum) or the hop rate gamma (classical).
inline std::vector<VarianceSample> variance_profile(int m, WalkKind engine, std::span<const double> z_grid,
                                                    double rate = 1.0) {
  require(m >= 3 && m % 2 == 1, ErrorKind::InvalidParameter, "variance analysis needs an odd path length >= 3");
  const Graph g = path_graph(m);
  const auto centre = double(g.entry());
  const auto spectrum = engine == WalkKind::Quantum ? decompose(build_hamiltonian(g, CouplingModel{rate, 0.0}))
                                                    : decompose(ClassicalGenerator(g, rate));
  const auto psi0 = QuantumState::basis(g.size(), g.entry());
  const auto p0 = indicator(g.size(), g.entry());
  std::vector<VarianceSample> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) {
    const ProbabilityVector p = engine == WalkKind::Quantum ? site_probabilities(evolve_quantum(spectrum, psi0, z))
                                                            : evolve_classical(spectrum, p0, z);
    double var = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) var += p(i) * (double(i) - centre) * (double(i) - centre);
    out.push_back({z, var, std::max(std::abs(p(0)), std::abs(p(p.size() - 1)))});
  }
  return out;
}

inline constexpr double kBoundaryGuard = 1e-6;

/// Power-law fit of Var(z) over the samples before the walk reaches the path ends.
inline FitResult variance_slope_1d(int m, WalkKind engine, std::span<const double> z_grid, double rate = 1.0) {
  const auto profile = variance_profile(m, engine, z_grid, rate);
  std::vector<FitPoint> window;
  for (const auto& s : profile) {
    if (s.end_probability >= kBoundaryGuard) break;
    if (s.z > 0.0 && s.variance > 0.0) window.push_back({s.z, s.variance});
  }
  require(window.size() >= 3, ErrorKind::InvalidWindow, "fewer than 3 pre-boundary samples");
  return fit_power(window);
}

}  // namespace qhit
