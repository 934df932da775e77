#include "starnoise/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starnoise {

namespace {

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1], got " +
                                std::to_string(v));
}

Eigen::Matrix2cd direction_observable(const Eigen::Vector3d& dir) {
  const auto& sigma = pauli_basis();
  return dir.x() * sigma[0] + dir.y() * sigma[1] + dir.z() * sigma[2];
}

// Tr over the first qubit of a two-qubit state.
Eigen::Matrix2cd partial_trace_first(const Eigen::MatrixXcd& rho4) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) += rho4(2 * k + i, 2 * k + j);
  return out;
}

}  // namespace

void validate_noise(const SourceNoise& noise) {
  require_unit_interval(noise.alpha, "alpha");
  require_unit_interval(noise.delta, "delta");
  require_unit_interval(noise.mu, "mu");
  require_unit_interval(noise.beta, "beta");
  require_unit_interval(noise.gamma_amp, "gamma_amp");
  require_unit_interval(noise.xi_amp, "xi_amp");
  require_unit_interval(noise.gamma_ph, "gamma_ph");
  require_unit_interval(noise.xi_ph, "xi_ph");
}

PovmPair noisy_projector_pair(const Eigen::Vector3d& direction, double visibility) {
  if (std::abs(direction.norm() - 1.0) > kUnitVectorTol)
    throw std::invalid_argument("noisy_projector_pair: direction must be a unit vector");
  require_unit_interval(visibility, "visibility");

  const Eigen::Matrix2cd obs = direction_observable(direction);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd plus = 0.5 * (id + obs);
  const Eigen::Matrix2cd minus = 0.5 * (id - obs);
  const Eigen::Matrix2cd mix = (1.0 - visibility) / 2.0 * id;
  return {visibility * plus + mix, visibility * minus + mix};
}

DensityMatrix generate_noisy_source(double alpha, double delta) {
  require_unit_interval(alpha, "alpha");
  require_unit_interval(delta, "delta");

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
  rho(2, 2) = 1.0;  // |10><10|

  // Noisy Hadamard on the first qubit.
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const Eigen::MatrixXcd hi = kron(h, Eigen::Matrix2cd::Identity());
  const Eigen::Matrix2cd second = partial_trace_first(rho);
  rho = alpha * (hi * rho * hi.adjoint()) +
        (1.0 - alpha) / 2.0 * kron(Eigen::Matrix2cd::Identity(), second);

  // Noisy CNOT, control on the first qubit.
  Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(4, 4);
  cnot(0, 0) = 1;
  cnot(1, 1) = 1;
  cnot(2, 3) = 1;
  cnot(3, 2) = 1;
  rho = delta * (cnot * rho * cnot.adjoint()) +
        (1.0 - delta) / 4.0 * Eigen::MatrixXcd::Identity(4, 4);

  return DensityMatrix(std::move(rho));
}

KrausPair ad_kraus(double g) {
  require_unit_interval(g, "gamma");
  KrausPair kp;
  kp.k0 = Eigen::Matrix2cd::Zero();
  kp.k0(0, 0) = 1.0;
  kp.k0(1, 1) = std::sqrt(1.0 - g);
  kp.k1 = Eigen::Matrix2cd::Zero();
  kp.k1(0, 1) = std::sqrt(g);
  return kp;
}

KrausPair pd_kraus(double g) {
  require_unit_interval(g, "gamma");
  KrausPair kp;
  kp.k0 = Eigen::Matrix2cd::Zero();
  kp.k0(0, 0) = 1.0;
  kp.k0(1, 1) = std::sqrt(1.0 - g);
  kp.k1 = Eigen::Matrix2cd::Zero();
  kp.k1(1, 1) = std::sqrt(g);
  return kp;
}

DensityMatrix apply_channel_pair(const DensityMatrix& rho, const KrausPair& alice_ch,
                                 const KrausPair& bob_ch) {
  if (rho.dim() != 4)
    throw std::invalid_argument("apply_channel_pair: expected a two-qubit state");
  const ValidationReport rep = validate_state(rho);
  if (!rep.passed)
    throw std::domain_error("apply_channel_pair: input is not a valid density matrix");

  const std::array<const Eigen::Matrix2cd*, 2> ka{&alice_ch.k0, &alice_ch.k1};
  const std::array<const Eigen::Matrix2cd*, 2> kb{&bob_ch.k0, &bob_ch.k1};
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(4, 4);
  for (const auto* a : ka)
    for (const auto* b : kb) {
      const Eigen::MatrixXcd op = kron(*a, *b);
      out += op * rho.matrix() * op.adjoint();
    }
  return DensityMatrix(std::move(out));
}

DensityMatrix effective_source_state(const SourceNoise& noise, ChannelKind kind) {
  validate_noise(noise);
  const bool amp_set = noise.gamma_amp != 0.0 || noise.xi_amp != 0.0;
  const bool ph_set = noise.gamma_ph != 0.0 || noise.xi_ph != 0.0;

  switch (kind) {
    case ChannelKind::none:
      if (amp_set || ph_set)
        throw std::invalid_argument(
            "effective_source_state: channel parameters set but channel kind is none");
      return generate_noisy_source(noise.alpha, noise.delta);
    case ChannelKind::amp:
      if (ph_set)
        throw std::invalid_argument(
            "effective_source_state: phase-damping parameters set on an amplitude-damping "
            "evaluation; the channel kinds are mutually exclusive");
      return apply_channel_pair(generate_noisy_source(noise.alpha, noise.delta),
                                ad_kraus(noise.gamma_amp), ad_kraus(noise.xi_amp));
    case ChannelKind::ph:
      if (amp_set)
        throw std::invalid_argument(
            "effective_source_state: amplitude-damping parameters set on a phase-damping "
            "evaluation; the channel kinds are mutually exclusive");
      return apply_channel_pair(generate_noisy_source(noise.alpha, noise.delta),
                                pd_kraus(noise.gamma_ph), pd_kraus(noise.xi_ph));
  }
  throw std::logic_error("effective_source_state: unknown channel kind");
}

}  // namespace starnoise
