#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "starnoise/tolerances.hpp"

namespace starnoise {

using Complex = std::complex<double>;

// Pauli basis {sigma_x, sigma_y, sigma_z}; qubit order inside a pair is (Alice, Bob).
const std::array<Eigen::Matrix2cd, 3>& pauli_basis();

// Kronecker product, first factor on the most significant index block.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Complex square matrix of power-of-two dimension. The constructor only
/// checks the shape; physical-state invariants (hermiticity, unit trace,
/// positivity) are checked by validate_state so that intermediate
/// unphysical matrices (e.g. from bloch_compose) stay representable.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }

 private:
  Eigen::MatrixXcd mat_;
};

/// Local Bloch vectors a, b and the 3x3 correlation tensor
/// T(j,k) = Tr[rho sigma_j (x) sigma_k] of a two-qubit state.
struct BlochForm {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
};

/// Eigenvalues of T^T T sorted descending; equal to the squared singular
/// values of T.
struct CorrelationSpectrum {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};

struct ValidationReport {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool passed = false;
};

/// Throws std::invalid_argument unless rho is 4x4; std::domain_error unless
/// validate_state passes.
BlochForm bloch_decompose(const DensityMatrix& rho);

/// Inverse of bloch_decompose. The result is Hermitian with unit trace but
/// may be non-positive when the form is unphysical; positivity is not
/// asserted here.
DensityMatrix bloch_compose(const BlochForm& form);

/// Spectrum of T^T T by cyclic Jacobi iteration (no external solver at this
/// size), accurate to kSpectrumTol.
CorrelationSpectrum correlation_spectrum(const Eigen::Matrix3d& t);

ValidationReport validate_state(const DensityMatrix& rho);

}  // namespace starnoise
