#pragma once

#include <optional>
#include <span>
#include <vector>

#include "starnoise/noise.hpp"
#include "starnoise/qstate.hpp"

namespace starnoise {

/// Star network: n independent sources, each shared between one branch
/// party (Alice_i) and the central party (Bob).
struct StarConfig {
  int n = 1;
  std::vector<SourceNoise> sources;
  ChannelKind channel_kind = ChannelKind::none;

  static StarConfig consistent(int n, const SourceNoise& noise,
                               ChannelKind kind = ChannelKind::none);
};

/// Criterion value S with its I/J constituents where a path computes them.
/// Closed-form paths leave i_term/j_term absent; only the oracle populates
/// them. Violation is strict: S must exceed 1, the boundary S = 1 counts
/// as non-violating.
struct CriterionResult {
  double s = 0.0;
  std::optional<double> i_term;
  std::optional<double> j_term;
  bool violated = false;

  static CriterionResult from_s(double s);
  static CriterionResult from_ij(double i, double j, int n);
};

/// Noiseless star inequality: S = sqrt((prod t1)^(1/n) + (prod t2)^(1/n)).
CriterionResult s_star_noiseless(std::span<const CorrelationSpectrum> spectra, int n);

/// Imperfect measurements on arbitrary sources:
/// S = (prod mu_i beta_i)^(1/n) sqrt((prod t1)^(1/n) + (prod t2)^(1/n)).
CriterionResult s_star_noisy(const StarConfig& config,
                             std::span<const CorrelationSpectrum> spectra);

/// Gate-noise sources, no channels:
/// S = (prod beta_i mu_i delta_i)^(1/n) sqrt((prod alpha_i)^(2/n) + 1).
/// Any nonzero channel parameter is rejected (wrong closed form).
CriterionResult s_star_gate_noise(const StarConfig& config);

/// Gate-noise sources through amplitude-damping channels:
/// S = (prod beta_i mu_i)^(1/n) sqrt(Max(F1, F2)) with
/// F1 = 2 (prod a^2 d^2 D)^(1/n),
/// F2 = (prod a^2 d^2 D)^(1/n) + (prod (d D + g x))^(2/n),
/// D_i = (1 - gamma_i)(1 - xi_i). F1/F2 are whole-network products,
/// not a per-source max.
CriterionResult s_star_ad(const StarConfig& config);

/// Gate-noise sources through phase-damping channels:
/// S = (prod beta_i mu_i)^(1/n) sqrt((prod a^2 d^2 D)^(1/n) + (prod d)^(2/n)).
CriterionResult s_star_pd(const StarConfig& config);

/// Noncyclic-network bound with p_n sources in the last layer; p_n = n
/// reproduces s_star_noisy exactly and the value never exceeds it.
CriterionResult s_noncyclic(const StarConfig& config,
                            std::span<const CorrelationSpectrum> spectra, int p_n);

// Consistent-noise closed forms; the network size drops out, so these are
// also the n -> infinity limits used by the region scans.
double consistent_gate_value(double alpha, double delta, double mu, double beta);
double consistent_ad_value(double alpha, double delta, double mu, double beta,
                           double gamma, double xi);
double consistent_pd_value(double alpha, double delta, double mu, double beta,
                           double gamma, double xi);

}  // namespace starnoise
