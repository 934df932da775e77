#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "starnoise/criteria.hpp"

namespace starnoise {

enum class PartialCase {
  state_only,        // (alpha, delta) / (alpha', delta')
  measurement_only,  // (beta, mu) / (beta', mu')
  pd_only,           // (gamma, xi) / (gamma', xi')
  pd_state,          // alpha=delta, gamma_ph=xi_ph: (alpha, gamma) / primed
  pd_measure         // mu=beta, gamma_ph=xi_ph:    (mu, xi) / primed
};

/// Partially consistent noise: the first k sources carry the unprimed
/// parameter pair, the remaining n-k sources the primed pair.
struct PartialNoiseCase {
  PartialCase id = PartialCase::state_only;
  int k = 1;
  std::array<double, 2> unprimed{1.0, 1.0};
  std::array<double, 2> primed{1.0, 1.0};
  // Set by k1_preset: maps re-derive unprimed from primed per cell.
  bool sqrt_preset = false;

  /// Presentation preset: k = 1 with unprimed = sqrt(primed)
  /// for visibility-like parameters and 1 - unprimed = sqrt(1 - primed)
  /// for damping-like ones.
  static PartialNoiseCase k1_preset(PartialCase id, double primed_first,
                                    double primed_second);
};

struct PersistencyResult {
  enum class Kind { no_violation, finite, infinite };
  Kind kind = Kind::no_violation;
  int n_max = 0;       // meaningful when kind == finite
  double s_limit = 0;  // S at n -> infinity
  // S(k), S(k+1), ... for the dense prefix of the scan (finite case only).
  std::vector<double> s_values;
};

/// S(n) of the partially consistent closed form; n >= k required.
double s_of_n(const PartialNoiseCase& c, int n);

/// n -> infinity limit of s_of_n (closed form, primed parameters only).
double limit_value(const PartialNoiseCase& c);

/// INFINITE iff limit_value > 1; otherwise scans n = k, k+1, ... for the
/// last n with S(n) > 1 (monotone decrease verified on the evaluated
/// points; a non-monotone detection throws). A crossing beyond cap raises
/// a numerical-resolution error.
PersistencyResult n_max(const PartialNoiseCase& c, int cap = 10000);

/// Consistent-noise parameter scans of the infinite-persistency regions.
enum class RegionCase {
  mu_beta,             // (mu, beta), everything else ideal
  alpha_delta,         // (alpha, delta)
  gamma_xi_amp,        // (gamma_amp, xi_amp)
  gamma_xi_ph,         // (gamma_ph, xi_ph)
  alpha_mu,            // (alpha=delta, mu=beta)
  alpha_gamma_amp,     // (alpha=delta, gamma_amp=xi_amp)
  alpha_gamma_ph,      // (alpha=delta, gamma_ph=xi_ph)
  mu_gamma_amp,        // (mu=beta, gamma_amp=xi_amp)
  mu_gamma_ph,         // (mu=beta, gamma_ph=xi_ph)
  alpha_gamma_amp_mu,  // (alpha=delta, gamma_amp=xi_amp, mu=beta), 3D
  alpha_gamma_ph_mu    // (alpha=delta, gamma_ph=xi_ph, mu=beta), 3D
};

struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int resolution = 200;
};

int region_dimension(RegionCase c);

/// Axis names matching the case, range [0,1].
std::vector<GridAxis> default_axes(RegionCase c, int resolution);

/// Row-major grid, last axis fastest. Boolean cells hold 0/1 membership;
/// n_max cells hold the persistency number with 0 for "no violation" and
/// kInfinite for infinite persistency.
struct RegionGrid {
  enum class CellKind { boolean, n_max };
  static constexpr long long kInfinite = -1;

  std::vector<GridAxis> axes;
  CellKind kind = CellKind::boolean;
  std::vector<long long> values;

  std::size_t cell_count() const;
  double coordinate(int axis, int index) const;
};

/// Consistent closed-form S at a grid point of the given case.
double consistent_region_value(RegionCase c, std::span<const double> coords);

/// Membership grid of the infinite-persistency region (value > 1, strict;
/// boundary cells are outside). threads <= 0 picks the hardware count,
/// capped by STARNOISE_THREADS. Output is deterministic regardless of the
/// evaluation order.
RegionGrid region_scan(RegionCase c, std::span<const GridAxis> axes, int threads = 0);

/// Staircase map of n_max over the primed parameters of a partial case.
/// Presets re-derive the unprimed pair per cell.
RegionGrid nmax_map(const PartialNoiseCase& templ, std::span<const GridAxis> axes,
                    int cap = 10000, int threads = 0);

struct Table1Row {
  std::string noise_type;
  std::array<std::string, 2> param_names;
  std::array<double, 2> params;
  int star_psn = 0;
  // Prior-literature value for the linear network, stored as reference
  // data only; no formula for it is implemented here.
  int linear_psn_reference = 0;
};

/// The k=1 persistency table: star PSN computed via n_max, linear PSN from
/// stored reference constants.
std::vector<Table1Row> table1();

// CSV / JSON emission. Reals are printed with shortest round-trip
// formatting (<= 17 significant digits); orderings are deterministic.
// Infinite persistency serializes as the string "infinite", never a number.
std::string grid_to_csv(const RegionGrid& grid);
std::string grid_to_json(const RegionGrid& grid,
                         const nlohmann::ordered_json& meta = nlohmann::ordered_json::object());
std::string table1_to_csv(const std::vector<Table1Row>& rows);
std::string table1_to_json(const std::vector<Table1Row>& rows);

std::string format_real(double v);

}  // namespace starnoise
