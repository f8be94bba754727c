#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qhit/error.hpp"
#include "qhit/graph.hpp"
#include "qhit/quantum.hpp"

namespace qhit {

/// Parameters of the omega-interpolated quantum stochastic walk.
struct QswParams {
  double omega = 1.0;  // 0 = coherent, 1 = classical
  double rate = 1.0;   // per-edge hop rate gamma, mm^-1
  double step = 0.005; // RK4 step, mm
  std::size_t max_nodes = 64;

  void validate() const {
    require(omega >= 0.0 && omega <= 1.0, ErrorKind::InvalidParameter, "omega must lie in [0, 1]");
    require(std::isfinite(rate) && rate > 0.0, ErrorKind::InvalidParameter, "rate must be > 0");
    require(std::isfinite(step) && step > 0.0, ErrorKind::InvalidParameter, "step must be > 0");
  }
};

/// K = gamma (A - D). Symmetric, zero column sums, uniform stationary vector.
class ClassicalGenerator {
 public:
  ClassicalGenerator(const Graph& g, double rate) : rate_(rate) {
    require(std::isfinite(rate) && rate > 0.0, ErrorKind::InvalidParameter, "rate must be > 0");
    const auto n = static_cast<Eigen::Index>(g.size());
    matrix_ = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges()) {
      const auto a = Eigen::Index(e.a), b = Eigen::Index(e.b);
      matrix_(a, b) += rate;
      matrix_(b, a) += rate;
      matrix_(a, a) -= rate;
      matrix_(b, b) -= rate;
    }
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double rate() const noexcept { return rate_; }

 private:
  Eigen::MatrixXd matrix_;
  double rate_;
};

inline SpectralDecomposition decompose(const ClassicalGenerator& k) { return SpectralDecomposition::of(k.matrix()); }

/// p(t) = exp(K t) p0 via the symmetric eigendecomposition of K.
inline ProbabilityVector evolve_classical(const SpectralDecomposition& spectrum, const ProbabilityVector& p0, double t) {
  require(static_cast<std::size_t>(p0.size()) == spectrum.size(), ErrorKind::DimensionMismatch,
          "probability vector and generator sizes differ");
  require(std::isfinite(t) && t >= 0.0, ErrorKind::InvalidParameter, "evolution time must be finite and >= 0");
  const Eigen::MatrixXd& v = spectrum.eigenvectors;
  Eigen::VectorXd coeffs = v.transpose() * p0;
  // K is negative semidefinite with exact zero modes (one per component). Eigenvalues within
  // round-off of zero are snapped to it so total probability does not drift at large t.
  const double tol = 1e-12 * std::max(1.0, spectrum.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    const double lambda = spectrum.eigenvalues(k) > -tol ? 0.0 : spectrum.eigenvalues(k);
    coeffs(k) *= std::exp(lambda * t);
  }
  return v * coeffs;
}

inline ProbabilityVector evolve_classical(const ClassicalGenerator& k, const ProbabilityVector& p0, double t) {
  return evolve_classical(decompose(k), p0, t);
}

inline ProbabilityVector indicator(std::size_t n, NodeId site) {
  require(site < n, ErrorKind::InvalidParameter, "site out of range");
  ProbabilityVector p = ProbabilityVector::Zero(Eigen::Index(n));
  p(Eigen::Index(site)) = 1.0;
  return p;
}

struct DensityMatrix {
  Eigen::MatrixXcd rho;

  static DensityMatrix pure(const QuantumState& psi) { return {psi.amplitudes * psi.amplitudes.adjoint()}; }

  static DensityMatrix basis(std::size_t n, NodeId site) { return pure(QuantumState::basis(n, site)); }

  static DensityMatrix diagonal(const ProbabilityVector& p) {
    return {p.cast<Complex>().asDiagonal().toDenseMatrix()};
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(rho.rows()); }
  Complex trace() const { return rho.trace(); }
  ProbabilityVector populations() const { return rho.diagonal().real(); }
  double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }
};

/// Right-hand side of the Lindblad equation with L_ij = sqrt(gamma A_ij) |i><j|,
/// evaluated in closed form:
///   diag:     d rho_ii += w g (sum_j A_ij rho_jj - deg(i) rho_ii)
///   off-diag: d rho_ik += -(w g / 2)(deg(i) + deg(k)) rho_ik
/// plus the coherent term -(1 - w) i [H, rho].
class LindbladOperator {
 public:
  LindbladOperator(const Hamiltonian& h, const QswParams& params)
      : omega_(params.omega), rate_(params.rate), coupling_(h.coupling()), neighbors_(h.size()) {
    params.validate();
    for (const auto& e : h.edges()) {
      neighbors_[e.a].push_back(Eigen::Index(e.b));
      neighbors_[e.b].push_back(Eigen::Index(e.a));
    }
    degree_.resize(Eigen::Index(h.size()));
    for (std::size_t i = 0; i < h.size(); ++i) degree_(Eigen::Index(i)) = double(neighbors_[i].size());
  }

  std::size_t size() const noexcept { return neighbors_.size(); }

  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    const auto n = Eigen::Index(size());
    require(rho.rows() == n && rho.cols() == n, ErrorKind::DimensionMismatch, "density matrix size mismatch");
    out.resize(n, n);
    const Complex coherent(0.0, -(1.0 - omega_) * coupling_);
    const double damping = 0.5 * omega_ * rate_;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        // On-site terms cancel in the commutator.
        Complex comm = 0.0;
        for (Eigen::Index j : neighbors_[std::size_t(i)]) comm += rho(j, k);
        for (Eigen::Index j : neighbors_[std::size_t(k)]) comm -= rho(i, j);
        out(i, k) = coherent * comm - damping * (degree_(i) + degree_(k)) * rho(i, k);
      }
    }
    const double hop = omega_ * rate_;
    for (Eigen::Index i = 0; i < n; ++i) {
      double inflow = 0.0;
      for (Eigen::Index j : neighbors_[std::size_t(i)]) inflow += rho(j, j).real();
      out(i, i) += hop * inflow;
    }
  }

  Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out;
    apply(rho, out);
    return out;
  }

 private:
  double omega_;
  double rate_;
  double coupling_;
  std::vector<std::vector<Eigen::Index>> neighbors_;
  Eigen::VectorXd degree_;
};

inline Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const Hamiltonian& h, const QswParams& params) {
  return LindbladOperator(h, params)(rho.rho);
}

namespace detail {

inline Eigen::MatrixXcd rk4_integrate(const LindbladOperator& op, Eigen::MatrixXcd rho, double t, double max_step) {
  if (t == 0.0) return rho;
  const auto steps = static_cast<long long>(std::ceil(t / max_step));
  const double dt = t / double(steps);
  Eigen::MatrixXcd k1, k2, k3, k4;
  for (long long s = 0; s < steps; ++s) {
    op.apply(rho, k1);
    op.apply(rho + (0.5 * dt) * k1, k2);
    op.apply(rho + (0.5 * dt) * k2, k3);
    op.apply(rho + dt * k3, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

}  // namespace detail

inline constexpr double kQswTraceTolerance = 1e-6;
inline constexpr int kQswMaxHalvings = 4;

/// Fixed-step RK4 integration of the Lindblad equation; the step is halved (up
/// to four times) while the trace drifts by more than 1e-6.
inline DensityMatrix evolve_qsw(const DensityMatrix& rho0, const Hamiltonian& h, const QswParams& params, double t) {
  params.validate();
  require(h.size() <= params.max_nodes, ErrorKind::CapExceeded,
          "stochastic walk limited to " + std::to_string(params.max_nodes) + " nodes, graph has " +
              std::to_string(h.size()));
  require(rho0.size() == h.size(), ErrorKind::DimensionMismatch, "density matrix and Hamiltonian sizes differ");
  require(std::isfinite(t) && t >= 0.0, ErrorKind::InvalidParameter, "evolution time must be finite and >= 0");
  const LindbladOperator op(h, params);
  const Complex trace0 = rho0.trace();
  double step = params.step;
  for (int attempt = 0; attempt <= kQswMaxHalvings; ++attempt, step *= 0.5) {
    Eigen::MatrixXcd rho = detail::rk4_integrate(op, rho0.rho, t, step);
    const double drift = std::abs(rho.trace() - trace0);
    if (rho.allFinite() && drift <= kQswTraceTolerance) return {std::move(rho)};
  }
  fail(ErrorKind::IntegrationFailure, "trace drift persists after step halving");
}

}  // namespace qhit
