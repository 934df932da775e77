#pragma once

#include <Eigen/Dense>

#include "starnoise/qstate.hpp"

namespace starnoise {

enum class ChannelKind { none, amp, ph };

/// Per-source noise parameters, all in [0,1].
///   alpha, delta     Hadamard / CNOT gate imperfections of the source.
///   mu, beta         detector visibilities of Alice_i and of Bob's branch i.
///   gamma_*, xi_*    damping strengths of the channel toward A_i and toward
///                    B, for the amplitude (amp) and phase (ph) channels.
struct SourceNoise {
  double alpha = 1.0;
  double delta = 1.0;
  double mu = 1.0;
  double beta = 1.0;
  double gamma_amp = 0.0;
  double xi_amp = 0.0;
  double gamma_ph = 0.0;
  double xi_ph = 0.0;

  static SourceNoise ideal() { return {}; }
};

/// Throws std::invalid_argument when any field leaves [0,1].
void validate_noise(const SourceNoise& noise);

/// Two-element POVM; e0 carries outcome +1, e1 outcome -1.
struct PovmPair {
  Eigen::Matrix2cd e0;
  Eigen::Matrix2cd e1;
};

struct KrausPair {
  Eigen::Matrix2cd k0;
  Eigen::Matrix2cd k1;
};

/// e = v * P_ideal + (1-v)/2 * I with P_ideal the +-1 eigenprojectors of
/// direction . sigma. Used for Alice devices (v = mu) and Bob branch
/// devices (v = beta) alike.
PovmPair noisy_projector_pair(const Eigen::Vector3d& direction, double visibility);

/// Source pipeline: |10><10|, noisy Hadamard on the first qubit (mixing with
/// (1-alpha)/2 I (x) Tr_1 rho), then noisy CNOT (mixing with (1-delta)/4 I).
/// Correlation tensor of the result is diag(-alpha*delta, alpha*delta, delta).
DensityMatrix generate_noisy_source(double alpha, double delta);

// Amplitude damping: k0 = diag(1, sqrt(1-g)), k1 = sqrt(g) |0><1|.
KrausPair ad_kraus(double g);
// Phase damping: k0 = diag(1, sqrt(1-g)), k1 = sqrt(g) |1><1|.
KrausPair pd_kraus(double g);

/// rho_out = sum_ij (K_i^A (x) K_j^B) rho (K_i^A (x) K_j^B)^dagger on a
/// two-qubit state; the first qubit goes through alice_ch.
DensityMatrix apply_channel_pair(const DensityMatrix& rho, const KrausPair& alice_ch,
                                 const KrausPair& bob_ch);

/// generate_noisy_source followed by the selected damping channel pair.
/// AD and PD are mutually exclusive: the parameters of the non-selected
/// channel kind must be zero (kind none requires all four to be zero),
/// otherwise std::invalid_argument.
DensityMatrix effective_source_state(const SourceNoise& noise, ChannelKind kind);

}  // namespace starnoise
