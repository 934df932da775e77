#include "starnoise/persistency.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace starnoise {

namespace {

constexpr int kDenseScanWindow = 512;       // dense prefix kept in s_values
constexpr double kMonotoneSlack = 1e-12;

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " +
                                std::to_string(v));
}

void validate_case(const PartialNoiseCase& c) {
  if (c.k < 1)
    throw std::invalid_argument("PartialNoiseCase: k must be >= 1, got " + std::to_string(c.k));
  require_unit_interval(c.unprimed[0], "unprimed[0]");
  require_unit_interval(c.unprimed[1], "unprimed[1]");
  require_unit_interval(c.primed[0], "primed[0]");
  require_unit_interval(c.primed[1], "primed[1]");
}

// Whether a parameter slot is damping-like (larger = noisier) for the case.
std::array<bool, 2> damping_slots(PartialCase id) {
  switch (id) {
    case PartialCase::state_only:
    case PartialCase::measurement_only:
      return {false, false};
    case PartialCase::pd_only:
      return {true, true};
    case PartialCase::pd_state:
    case PartialCase::pd_measure:
      return {false, true};
  }
  throw std::logic_error("damping_slots: unknown case");
}

std::array<double, 2> preset_unprimed(PartialCase id, const std::array<double, 2>& primed) {
  const std::array<bool, 2> damp = damping_slots(id);
  std::array<double, 2> u;
  for (int i = 0; i < 2; ++i)
    u[i] = damp[i] ? 1.0 - std::sqrt(1.0 - primed[i]) : std::sqrt(primed[i]);
  return u;
}

}  // namespace

PartialNoiseCase PartialNoiseCase::k1_preset(PartialCase id, double primed_first,
                                             double primed_second) {
  PartialNoiseCase c;
  c.id = id;
  c.k = 1;
  c.primed = {primed_first, primed_second};
  require_unit_interval(primed_first, "primed[0]");
  require_unit_interval(primed_second, "primed[1]");
  c.unprimed = preset_unprimed(id, c.primed);
  c.sqrt_preset = true;
  return c;
}

double s_of_n(const PartialNoiseCase& c, int n) {
  validate_case(c);
  if (n < c.k)
    throw std::invalid_argument("s_of_n: n must be >= k, got n=" + std::to_string(n) +
                                " with k=" + std::to_string(c.k));
  const double eu = static_cast<double>(c.k) / n;          // unprimed exponent, k/n
  const double ep = static_cast<double>(n - c.k) / n;      // primed exponent, (n-k)/n
  const double u0 = c.unprimed[0], u1 = c.unprimed[1];
  const double p0 = c.primed[0], p1 = c.primed[1];

  switch (c.id) {
    case PartialCase::state_only:
      // delta^(k/n) delta'^((n-k)/n) sqrt(alpha^(2k/n) alpha'^((2n-2k)/n) + 1)
      return std::pow(u1, eu) * std::pow(p1, ep) *
             std::sqrt(std::pow(u0, 2 * eu) * std::pow(p0, 2 * ep) + 1.0);
    case PartialCase::measurement_only:
      // sqrt(2) beta^(k/n) beta'^((n-k)/n) mu^(k/n) mu'^((n-k)/n)
      return std::sqrt(2.0) * std::pow(u0, eu) * std::pow(p0, ep) * std::pow(u1, eu) *
             std::pow(p1, ep);
    case PartialCase::pd_only:
      // sqrt([(1-g)(1-x)]^(k/n) [(1-g')(1-x')]^((n-k)/n) + 1)
      return std::sqrt(std::pow((1.0 - u0) * (1.0 - u1), eu) *
                           std::pow((1.0 - p0) * (1.0 - p1), ep) +
                       1.0);
    case PartialCase::pd_state:
      // sqrt(a^(4k/n) a'^((4n-4k)/n) (1-g)^(2k/n) (1-g')^((2n-2k)/n)
      //      + a^(2k/n) a'^((2n-2k)/n))
      return std::sqrt(std::pow(u0, 4 * eu) * std::pow(p0, 4 * ep) *
                           std::pow(1.0 - u1, 2 * eu) * std::pow(1.0 - p1, 2 * ep) +
                       std::pow(u0, 2 * eu) * std::pow(p0, 2 * ep));
    case PartialCase::pd_measure:
      // mu^(2k/n) mu'^((2n-2k)/n) sqrt((1-x)^(2k/n) (1-x')^((2n-2k)/n) + 1)
      return std::pow(u0, 2 * eu) * std::pow(p0, 2 * ep) *
             std::sqrt(std::pow(1.0 - u1, 2 * eu) * std::pow(1.0 - p1, 2 * ep) + 1.0);
  }
  throw std::logic_error("s_of_n: unknown case");
}

double limit_value(const PartialNoiseCase& c) {
  validate_case(c);
  const double p0 = c.primed[0], p1 = c.primed[1];
  switch (c.id) {
    case PartialCase::state_only:
      return p1 * std::sqrt(p0 * p0 + 1.0);
    case PartialCase::measurement_only:
      return std::sqrt(2.0) * p0 * p1;
    case PartialCase::pd_only:
      return std::sqrt((1.0 - p0) * (1.0 - p1) + 1.0);
    case PartialCase::pd_state:
      return std::sqrt(std::pow(p0, 4) * (1.0 - p1) * (1.0 - p1) + p0 * p0);
    case PartialCase::pd_measure:
      return p0 * p0 * std::sqrt((1.0 - p1) * (1.0 - p1) + 1.0);
  }
  throw std::logic_error("limit_value: unknown case");
}

PersistencyResult n_max(const PartialNoiseCase& c, int cap) {
  validate_case(c);
  if (cap < 1) throw std::invalid_argument("n_max: cap must be >= 1");
  if (cap < c.k)
    throw std::invalid_argument("n_max: cap (" + std::to_string(cap) +
                                ") must be >= k (" + std::to_string(c.k) + ")");

  PersistencyResult res;
  res.s_limit = limit_value(c);
  if (res.s_limit > 1.0) {
    res.kind = PersistencyResult::Kind::infinite;
    return res;
  }

  // Dense scan over a prefix window; this covers every realistic staircase
  // cell and fills s_values.
  double prev = std::numeric_limits<double>::infinity();
  int last_violating = c.k - 1;
  const int dense_end = (cap - c.k < kDenseScanWindow) ? cap : c.k + kDenseScanWindow - 1;
  for (int n = c.k; n <= dense_end; ++n) {
    const double s = s_of_n(c, n);
    if (s > prev + kMonotoneSlack)
      throw std::runtime_error("n_max: S(n) increased from " + std::to_string(prev) + " to " +
                               std::to_string(s) + " at n=" + std::to_string(n) +
                               "; the scan relies on monotone decrease");
    res.s_values.push_back(s);
    if (s > 1.0) {
      last_violating = n;
      prev = s;
    } else {
      if (last_violating < c.k) {
        res.kind = PersistencyResult::Kind::no_violation;
        return res;
      }
      res.kind = PersistencyResult::Kind::finite;
      res.n_max = last_violating;
      return res;
    }
  }

  // Still violating past the dense window: gallop then bisect for the last
  // violating n; monotone decrease is spot-checked on the evaluated pairs.
  res.s_values.clear();
  int lo = dense_end;        // S(lo) > 1
  double s_lo = prev;
  int hi = lo;
  while (hi < cap) {
    hi = static_cast<int>(std::min<long long>(2LL * hi, cap));
    const double s_hi = s_of_n(c, hi);
    if (s_hi > s_lo + kMonotoneSlack)
      throw std::runtime_error("n_max: non-monotone S detected between n=" + std::to_string(lo) +
                               " and n=" + std::to_string(hi));
    if (s_hi <= 1.0) {
      // last violating n lies in (lo, hi)
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        const double s_mid = s_of_n(c, mid);
        if (s_mid > s_lo + kMonotoneSlack)
          throw std::runtime_error("n_max: non-monotone S detected at n=" + std::to_string(mid));
        if (s_mid > 1.0) {
          lo = mid;
          s_lo = s_mid;
        } else {
          hi = mid;
        }
      }
      res.kind = PersistencyResult::Kind::finite;
      res.n_max = lo;
      return res;
    }
    lo = hi;
    s_lo = s_hi;
  }
  throw std::runtime_error(
      "n_max: still violating at the cap (n=" + std::to_string(cap) + ", S=" +
      std::to_string(s_lo) + ") while the n->infinity limit " + std::to_string(res.s_limit) +
      " is <= 1; raise the cap to resolve the crossing");
}

int region_dimension(RegionCase c) {
  switch (c) {
    case RegionCase::alpha_gamma_amp_mu:
    case RegionCase::alpha_gamma_ph_mu:
      return 3;
    default:
      return 2;
  }
}

std::vector<GridAxis> default_axes(RegionCase c, int resolution) {
  auto ax = [resolution](const char* name) { return GridAxis{name, 0.0, 1.0, resolution}; };
  switch (c) {
    case RegionCase::mu_beta:
      return {ax("mu"), ax("beta")};
    case RegionCase::alpha_delta:
      return {ax("alpha"), ax("delta")};
    case RegionCase::gamma_xi_amp:
      return {ax("gamma_amp"), ax("xi_amp")};
    case RegionCase::gamma_xi_ph:
      return {ax("gamma_ph"), ax("xi_ph")};
    case RegionCase::alpha_mu:
      return {ax("alpha"), ax("mu")};
    case RegionCase::alpha_gamma_amp:
      return {ax("alpha"), ax("gamma_amp")};
    case RegionCase::alpha_gamma_ph:
      return {ax("alpha"), ax("gamma_ph")};
    case RegionCase::mu_gamma_amp:
      return {ax("mu"), ax("gamma_amp")};
    case RegionCase::mu_gamma_ph:
      return {ax("mu"), ax("gamma_ph")};
    case RegionCase::alpha_gamma_amp_mu:
      return {ax("alpha"), ax("gamma_amp"), ax("mu")};
    case RegionCase::alpha_gamma_ph_mu:
      return {ax("alpha"), ax("gamma_ph"), ax("mu")};
  }
  throw std::logic_error("default_axes: unknown case");
}

double consistent_region_value(RegionCase c, std::span<const double> coords) {
  if (static_cast<int>(coords.size()) != region_dimension(c))
    throw std::invalid_argument("consistent_region_value: expected " +
                                std::to_string(region_dimension(c)) + " coordinates, got " +
                                std::to_string(coords.size()));
  switch (c) {
    case RegionCase::mu_beta:
      return consistent_gate_value(1.0, 1.0, coords[0], coords[1]);
    case RegionCase::alpha_delta:
      return consistent_gate_value(coords[0], coords[1], 1.0, 1.0);
    case RegionCase::gamma_xi_amp:
      return consistent_ad_value(1.0, 1.0, 1.0, 1.0, coords[0], coords[1]);
    case RegionCase::gamma_xi_ph:
      return consistent_pd_value(1.0, 1.0, 1.0, 1.0, coords[0], coords[1]);
    case RegionCase::alpha_mu:
      return consistent_gate_value(coords[0], coords[0], coords[1], coords[1]);
    case RegionCase::alpha_gamma_amp:
      return consistent_ad_value(coords[0], coords[0], 1.0, 1.0, coords[1], coords[1]);
    case RegionCase::alpha_gamma_ph:
      return consistent_pd_value(coords[0], coords[0], 1.0, 1.0, coords[1], coords[1]);
    case RegionCase::mu_gamma_amp:
      return consistent_ad_value(1.0, 1.0, coords[0], coords[0], coords[1], coords[1]);
    case RegionCase::mu_gamma_ph:
      return consistent_pd_value(1.0, 1.0, coords[0], coords[0], coords[1], coords[1]);
    case RegionCase::alpha_gamma_amp_mu:
      return consistent_ad_value(coords[0], coords[0], coords[2], coords[2], coords[1],
                                 coords[1]);
    case RegionCase::alpha_gamma_ph_mu:
      return consistent_pd_value(coords[0], coords[0], coords[2], coords[2], coords[1],
                                 coords[1]);
  }
  throw std::logic_error("consistent_region_value: unknown case");
}

std::size_t RegionGrid::cell_count() const {
  std::size_t count = 1;
  for (const GridAxis& a : axes) count *= static_cast<std::size_t>(a.resolution);
  return count;
}

double RegionGrid::coordinate(int axis, int index) const {
  const GridAxis& a = axes.at(static_cast<std::size_t>(axis));
  if (a.resolution == 1) return a.lo;
  return a.lo + (a.hi - a.lo) * static_cast<double>(index) / (a.resolution - 1);
}

namespace {

void validate_axes(std::span<const GridAxis> axes, int expected_dim) {
  if (static_cast<int>(axes.size()) != expected_dim)
    throw std::invalid_argument("grid: expected " + std::to_string(expected_dim) +
                                " axes, got " + std::to_string(axes.size()));
  for (const GridAxis& a : axes) {
    if (a.resolution < 2)
      throw std::invalid_argument("grid: axis '" + a.name + "' resolution must be >= 2");
    if (!(a.lo >= 0.0 && a.hi <= 1.0 && a.lo <= a.hi))
      throw std::invalid_argument("grid: axis '" + a.name + "' range must lie within [0,1]");
  }
}

int resolve_threads(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int threads = requested > 0 ? requested : hw;
  if (const char* env = std::getenv("STARNOISE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

// Evaluates fn(cell) for every cell index; each worker writes disjoint
// slots so the assembled output is deterministic.
template <typename Fn>
void for_each_cell(std::size_t count, int threads, Fn&& fn) {
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    constexpr std::size_t kChunk = 256;
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= count) return;
      const std::size_t end = std::min(begin + kChunk, count);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> cell_coords(const RegionGrid& grid, std::size_t index) {
  const int dims = static_cast<int>(grid.axes.size());
  std::vector<double> coords(static_cast<std::size_t>(dims));
  std::size_t rest = index;
  for (int a = dims - 1; a >= 0; --a) {
    const std::size_t res = static_cast<std::size_t>(grid.axes[a].resolution);
    coords[a] = grid.coordinate(a, static_cast<int>(rest % res));
    rest /= res;
  }
  return coords;
}

}  // namespace

RegionGrid region_scan(RegionCase c, std::span<const GridAxis> axes, int threads) {
  validate_axes(axes, region_dimension(c));
  RegionGrid grid;
  grid.axes.assign(axes.begin(), axes.end());
  grid.kind = RegionGrid::CellKind::boolean;
  grid.values.assign(grid.cell_count(), 0);

  for_each_cell(grid.values.size(), resolve_threads(threads), [&](std::size_t i) {
    const std::vector<double> coords = cell_coords(grid, i);
    grid.values[i] = consistent_region_value(c, coords) > 1.0 ? 1 : 0;
  });
  return grid;
}

RegionGrid nmax_map(const PartialNoiseCase& templ, std::span<const GridAxis> axes, int cap,
                    int threads) {
  validate_axes(axes, 2);
  validate_case(templ);
  RegionGrid grid;
  grid.axes.assign(axes.begin(), axes.end());
  grid.kind = RegionGrid::CellKind::n_max;
  grid.values.assign(grid.cell_count(), 0);

  for_each_cell(grid.values.size(), resolve_threads(threads), [&](std::size_t i) {
    const std::vector<double> coords = cell_coords(grid, i);
    PartialNoiseCase cell = templ;
    cell.primed = {coords[0], coords[1]};
    if (cell.sqrt_preset) cell.unprimed = preset_unprimed(cell.id, cell.primed);
    const PersistencyResult r = n_max(cell, cap);
    switch (r.kind) {
      case PersistencyResult::Kind::infinite:
        grid.values[i] = RegionGrid::kInfinite;
        break;
      case PersistencyResult::Kind::finite:
        grid.values[i] = r.n_max;
        break;
      case PersistencyResult::Kind::no_violation:
        grid.values[i] = 0;
        break;
    }
  });
  return grid;
}

std::vector<Table1Row> table1() {
  struct RowSpec {
    const char* type;
    PartialCase id;
    std::array<const char*, 2> names;
    std::array<double, 2> primed;
    int linear_ref;
  };
  const std::array<RowSpec, 4> specs{{
      {"state noises only", PartialCase::state_only, {"alpha'", "delta'"}, {0.95, 0.7}, 2},
      {"measurement noises only", PartialCase::measurement_only, {"beta'", "mu'"}, {0.83, 0.83}, 3},
      {"PD channel and state noises", PartialCase::pd_state, {"alpha'", "gamma'"}, {0.83, 0.3}, 2},
      {"PD channel and measure noises", PartialCase::pd_measure, {"mu'", "xi'"}, {0.9, 0.35}, 2},
  }};

  std::vector<Table1Row> rows;
  rows.reserve(specs.size());
  for (const RowSpec& sp : specs) {
    const PartialNoiseCase c = PartialNoiseCase::k1_preset(sp.id, sp.primed[0], sp.primed[1]);
    const PersistencyResult r = n_max(c);
    if (r.kind != PersistencyResult::Kind::finite)
      throw std::runtime_error(std::string("table1: expected a finite persistency for '") +
                               sp.type + "'");
    Table1Row row;
    row.noise_type = sp.type;
    row.param_names = {sp.names[0], sp.names[1]};
    row.params = sp.primed;
    row.star_psn = r.n_max;
    row.linear_psn_reference = sp.linear_ref;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace starnoise
