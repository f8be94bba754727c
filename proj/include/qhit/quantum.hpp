#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qhit/error.hpp"
#include "qhit/graph.hpp"

namespace qhit {

using Complex = std::complex<double>;
using ProbabilityVector = Eigen::VectorXd;

/// Uniform nearest-neighbour coupling, in mm^-1.
struct CouplingModel {
  double coupling = 1.0;
  double on_site = 0.0;

  void validate() const {
    require(std::isfinite(coupling) && coupling > 0.0, ErrorKind::InvalidParameter, "coupling must be > 0");
    require(std::isfinite(on_site), ErrorKind::InvalidParameter, "on-site term must be finite");
  }
};

/// H_ij = C on edges, H_ii = beta, zero elsewhere.
class Hamiltonian {
 public:
  Hamiltonian(const Graph& g, const CouplingModel& cm)
      : edges_(g.edges()), coupling_(cm.coupling), on_site_(cm.on_site) {
    cm.validate();
    const auto n = static_cast<Eigen::Index>(g.size());
    matrix_ = Eigen::MatrixXd::Zero(n, n);
    matrix_.diagonal().setConstant(cm.on_site);
    for (const auto& e : edges_) {
      matrix_(Eigen::Index(e.a), Eigen::Index(e.b)) = cm.coupling;
      matrix_(Eigen::Index(e.b), Eigen::Index(e.a)) = cm.coupling;
    }
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  double coupling() const noexcept { return coupling_; }
  double on_site() const noexcept { return on_site_; }

 private:
  Eigen::MatrixXd matrix_;
  std::vector<Edge> edges_;
  double coupling_;
  double on_site_;
};

inline Hamiltonian build_hamiltonian(const Graph& g, const CouplingModel& cm) { return Hamiltonian(g, cm); }

/// Eigenpairs of a real symmetric matrix: M = V diag(values) V^T.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  static SpectralDecomposition of(const Eigen::MatrixXd& symmetric) {
    require(symmetric.rows() == symmetric.cols(), ErrorKind::DimensionMismatch, "matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    require(solver.info() == Eigen::Success, ErrorKind::IntegrationFailure, "eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

inline SpectralDecomposition decompose(const Hamiltonian& h) { return SpectralDecomposition::of(h.matrix()); }

/// Single-walker state. Amplitudes are expected to have unit norm.
struct QuantumState {
  Eigen::VectorXcd amplitudes;

  static QuantumState basis(std::size_t n, NodeId site) {
    require(site < n, ErrorKind::InvalidParameter, "basis site out of range");
    QuantumState s{Eigen::VectorXcd::Zero(Eigen::Index(n))};
    s.amplitudes(Eigen::Index(site)) = 1.0;
    return s;
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
};

/// psi(z) = V exp(-i Lambda z) V^T psi(0). Safe to call concurrently on one decomposition.
inline QuantumState evolve_quantum(const SpectralDecomposition& spectrum, const QuantumState& psi0, double z) {
  require(psi0.size() == spectrum.size(), ErrorKind::DimensionMismatch, "state and Hamiltonian sizes differ");
  require(std::isfinite(z), ErrorKind::InvalidParameter, "evolution length must be finite");
  require(z >= 0.0, ErrorKind::InvalidParameter, "evolution length must be >= 0");
  const Eigen::MatrixXd& v = spectrum.eigenvectors;
  Eigen::VectorXcd coeffs = v.transpose().cast<Complex>() * psi0.amplitudes;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs(k) *= std::polar(1.0, -spectrum.eigenvalues(k) * z);
  return {v.cast<Complex>() * coeffs};
}

inline QuantumState evolve_quantum(const Hamiltonian& h, const QuantumState& psi0, double z) {
  return evolve_quantum(decompose(h), psi0, z);
}

/// Precomputed <to|V ... V^T|from> weights so single-amplitude queries cost O(N).
class TransitionAmplitude {
 public:
  TransitionAmplitude(const SpectralDecomposition& spectrum, NodeId from, NodeId to)
      : eigenvalues_(spectrum.eigenvalues) {
    require(from < spectrum.size() && to < spectrum.size(), ErrorKind::InvalidParameter, "node out of range");
    weights_ = spectrum.eigenvectors.row(Eigen::Index(from)).transpose().cwiseProduct(
        spectrum.eigenvectors.row(Eigen::Index(to)).transpose());
  }

  Complex operator()(double z) const {
    Complex sum = 0.0;
    for (Eigen::Index k = 0; k < weights_.size(); ++k) sum += weights_(k) * std::polar(1.0, -eigenvalues_(k) * z);
    return sum;
  }

  double probability(double z) const { return std::norm((*this)(z)); }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd weights_;
};

/// Born rule.
inline ProbabilityVector site_probabilities(const QuantumState& psi) {
  return psi.amplitudes.cwiseAbs2();
}

}  // namespace qhit
