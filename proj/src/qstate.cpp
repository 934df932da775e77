#include "starnoise/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace starnoise {

namespace {

bool power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

}  // namespace

const std::array<Eigen::Matrix2cd, 3>& pauli_basis() {
  static const std::array<Eigen::Matrix2cd, 3> basis = [] {
    std::array<Eigen::Matrix2cd, 3> b;
    const Complex i(0.0, 1.0);
    b[0] << 0, 1, 1, 0;
    b[1] << 0, -i, i, 0;
    b[2] << 1, 0, 0, -1;
    return b;
  }();
  return basis;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols())
    throw std::invalid_argument("DensityMatrix: matrix must be square, got " +
                                std::to_string(mat_.rows()) + "x" +
                                std::to_string(mat_.cols()));
  const int d = static_cast<int>(mat_.rows());
  if (d < 2 || !power_of_two(d))
    throw std::invalid_argument("DensityMatrix: dimension must be a power of 2 >= 2, got " +
                                std::to_string(d));
}

BlochForm bloch_decompose(const DensityMatrix& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("bloch_decompose: expected a two-qubit state (dim 4), got dim " +
                                std::to_string(rho.dim()));
  const ValidationReport rep = validate_state(rho);
  if (!rep.passed)
    throw std::domain_error(
        "bloch_decompose: not a valid density matrix (hermiticity defect " +
        std::to_string(rep.hermiticity_defect) + ", trace defect " +
        std::to_string(rep.trace_defect) + ", min eigenvalue " +
        std::to_string(rep.min_eigenvalue) + ")");

  const auto& m = rho.matrix();
  const auto& sigma = pauli_basis();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();

  BlochForm form;
  for (int j = 0; j < 3; ++j) {
    form.a(j) = (m * kron(sigma[j], id)).trace().real();
    form.b(j) = (m * kron(id, sigma[j])).trace().real();
    for (int k = 0; k < 3; ++k)
      form.t(j, k) = (m * kron(sigma[j], sigma[k])).trace().real();
  }
  return form;
}

DensityMatrix bloch_compose(const BlochForm& form) {
  const auto& sigma = pauli_basis();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
  for (int j = 0; j < 3; ++j) {
    m += form.a(j) * kron(sigma[j], id);
    m += form.b(j) * kron(id, sigma[j]);
    for (int k = 0; k < 3; ++k) m += form.t(j, k) * kron(sigma[j], sigma[k]);
  }
  return DensityMatrix(0.25 * m);
}

CorrelationSpectrum correlation_spectrum(const Eigen::Matrix3d& t) {
  Eigen::Matrix3d s = t.transpose() * t;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());

  // Cyclic Jacobi; quadratic convergence makes a few sweeps enough at 3x3.
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    if (off <= 1e-30 * scale * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (s(p, q) == 0.0) continue;
        const double tau = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double tt = std::copysign(1.0, tau) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, tt);
        const double sn = tt * c;
        Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
        g(p, p) = c;
        g(q, q) = c;
        g(p, q) = sn;
        g(q, p) = -sn;
        s = g.transpose() * s * g;
      }
    }
    s = 0.5 * (s + s.transpose().eval());
  }

  std::array<double, 3> ev{s(0, 0), s(1, 1), s(2, 2)};
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return {ev[0], ev[1], ev[2]};
}

ValidationReport validate_state(const DensityMatrix& rho) {
  const auto& m = rho.matrix();
  ValidationReport rep;
  rep.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  rep.trace_defect = std::abs(m.trace() - Complex(1.0, 0.0));

  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();

  rep.passed = rep.hermiticity_defect <= kHermitianTol && rep.trace_defect <= kTraceTol &&
               rep.min_eigenvalue >= -kPsdTol;
  return rep;
}

}  // namespace starnoise
