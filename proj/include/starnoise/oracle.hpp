#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "starnoise/criteria.hpp"

namespace starnoise {

/// Measurement directions: alice[i][x] for Alice_i with input x, bob[i][y]
/// for Bob's branch qubit i with input y. All unit vectors.
struct MeasurementSettings {
  std::vector<std::array<Eigen::Vector3d, 2>> alice;
  std::vector<std::array<Eigen::Vector3d, 2>> bob;

  int n() const { return static_cast<int>(alice.size()); }
  static MeasurementSettings random(int n, std::mt19937_64& rng);
};

struct StarInputs {
  std::vector<int> x;  // one bit per Alice
  int y = 0;
};

/// p(a_1..a_n, b | inputs). Bob announces the parity of his n single-qubit
/// branch outcomes. Index layout: a_1 is the most significant bit of
/// a_bits, b the least significant bit of the flat index.
struct OutcomeDistribution {
  int n_sources = 0;
  std::vector<double> p;  // size 2^(n+1)

  double probability(std::uint32_t a_bits, int b) const;
  double sum() const;
};

/// Tensor product of the sources with qubit ordering
/// (A_1, B_1, A_2, B_2, ...); A_1 is the most significant qubit.
/// Guarded to n <= 6 (dim 4096).
DensityMatrix build_star_state(std::span<const DensityMatrix> sources);

OutcomeDistribution joint_probability(const DensityMatrix& state,
                                      const MeasurementSettings& settings,
                                      std::span<const SourceNoise> noise,
                                      const StarInputs& inputs);

/// <A^1_{x_1} ... A^n_{x_n} B_y> = sum (-1)^(b + sum a_i) p(a, b | x, y).
double correlator(const DensityMatrix& state, const MeasurementSettings& settings,
                  std::span<const SourceNoise> noise, const StarInputs& inputs);

/// I = 2^-n sum_x <A...B_0>, J = 2^-n sum_x (-1)^(sum x_i) <A...B_1>,
/// S = |I|^(1/n) + |J|^(1/n); evaluated through joint_probability.
CriterionResult compute_I_J(const DensityMatrix& state,
                            const MeasurementSettings& settings,
                            std::span<const SourceNoise> noise);

struct OptimizeResult {
  MeasurementSettings settings;
  CriterionResult result;
  int sweeps = 0;        // sweeps spent by the best restart
  bool converged = false;
};

/// Coordinate ascent over all 4n direction vectors with random restarts.
/// Each vector is updated by exact maximization on the circle spanned by
/// the gradients of I and J (both are affine in any single direction).
/// The reported result is re-evaluated through compute_I_J.
OptimizeResult optimize_settings(std::span<const DensityMatrix> sources,
                                 std::span<const SourceNoise> noise,
                                 int restarts = 20, std::uint64_t seed = 1);

namespace detail {
// Same (I, J) as compute_I_J, via single product-observable traces instead
// of outcome enumeration. Accepts non-unit (even zero) direction vectors;
// used by the optimizer's affine probes.
std::pair<double, double> ij_via_observables(const DensityMatrix& state,
                                             const MeasurementSettings& settings,
                                             std::span<const SourceNoise> noise);
}  // namespace detail

}  // namespace starnoise
