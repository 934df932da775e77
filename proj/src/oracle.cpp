#include "starnoise/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace starnoise {

namespace {

constexpr int kMaxSources = 6;  // dim 4^6 = 4096
constexpr int kMaxSweeps = 80;
constexpr double kSweepTol = 1e-10;

Eigen::Matrix2cd observable(const Eigen::Vector3d& dir) {
  const auto& sigma = pauli_basis();
  return dir.x() * sigma[0] + dir.y() * sigma[1] + dir.z() * sigma[2];
}

Eigen::Matrix4cd kron22(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// Tr over the first source block after applying w to it:
// out = sum_{s,s'} w(s,s') m.block(s' q, s q), q = dim/4.
Eigen::MatrixXcd peel_first(const Eigen::MatrixXcd& m, const Eigen::Matrix4cd& w) {
  const Eigen::Index q = m.rows() / 4;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q, q);
  for (int s = 0; s < 4; ++s)
    for (int sp = 0; sp < 4; ++sp) {
      const Complex c = w(s, sp);
      if (c != Complex(0.0, 0.0)) out.noalias() += c * m.block(sp * q, s * q, q, q);
    }
  return out;
}

// Tr[(w_1 (x) ... (x) w_n) state].
Complex product_trace(const Eigen::MatrixXcd& state, std::span<const Eigen::Matrix4cd> ws) {
  Eigen::MatrixXcd cur = state;
  for (const auto& w : ws) cur = peel_first(cur, w);
  return cur(0, 0);
}

void validate_shapes(int state_dim, const MeasurementSettings& settings,
                     std::span<const SourceNoise> noise) {
  const int n = settings.n();
  if (n < 1 || n > kMaxSources)
    throw std::invalid_argument("oracle: source count must lie in [1, 6], got " +
                                std::to_string(n));
  if (static_cast<int>(settings.bob.size()) != n)
    throw std::invalid_argument("oracle: settings have " + std::to_string(settings.bob.size()) +
                                " Bob branches for " + std::to_string(n) + " sources");
  if (static_cast<int>(noise.size()) != n)
    throw std::invalid_argument("oracle: expected " + std::to_string(n) + " noise records, got " +
                                std::to_string(noise.size()));
  int expected_dim = 1;
  for (int i = 0; i < n; ++i) expected_dim *= 4;
  if (state_dim != expected_dim)
    throw std::invalid_argument("oracle: state dim " + std::to_string(state_dim) +
                                " does not match " + std::to_string(n) + " sources");
}

void fill_outcomes(const Eigen::MatrixXcd& m, int level, int n, std::uint32_t prefix,
                   std::span<const std::array<Eigen::Matrix4cd, 4>> w, std::vector<double>& out) {
  if (level == n) {
    out[prefix] = m(0, 0).real();
    return;
  }
  for (std::uint32_t combo = 0; combo < 4; ++combo)
    fill_outcomes(peel_first(m, w[level][combo]), level + 1, n, prefix * 4 + combo, w, out);
}

// No-validation (I, J) evaluation used by compute paths and the optimizer.
// Direction vectors may be non-unit or zero here; the observables are
// linear in them.
std::pair<double, double> ij_fast(const Eigen::MatrixXcd& state,
                                  const MeasurementSettings& settings,
                                  std::span<const SourceNoise> noise) {
  const int n = settings.n();
  std::vector<Eigen::Matrix4cd> wi(n), wj(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Matrix2cd a0 = noise[i].mu * observable(settings.alice[i][0]);
    const Eigen::Matrix2cd a1 = noise[i].mu * observable(settings.alice[i][1]);
    const Eigen::Matrix2cd b0 = noise[i].beta * observable(settings.bob[i][0]);
    const Eigen::Matrix2cd b1 = noise[i].beta * observable(settings.bob[i][1]);
    wi[i] = kron22(0.5 * (a0 + a1), b0);
    wj[i] = kron22(0.5 * (a0 - a1), b1);
  }
  return {product_trace(state, wi).real(), product_trace(state, wj).real()};
}

}  // namespace

MeasurementSettings MeasurementSettings::random(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto unit = [&] {
    Eigen::Vector3d v;
    do {
      v = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    } while (v.norm() < 1e-8);
    return Eigen::Vector3d(v.normalized());
  };
  MeasurementSettings s;
  s.alice.resize(n);
  s.bob.resize(n);
  for (int i = 0; i < n; ++i) {
    s.alice[i] = {unit(), unit()};
    s.bob[i] = {unit(), unit()};
  }
  return s;
}

double OutcomeDistribution::probability(std::uint32_t a_bits, int b) const {
  return p.at((static_cast<std::size_t>(a_bits) << 1) | static_cast<std::size_t>(b & 1));
}

double OutcomeDistribution::sum() const {
  double acc = 0.0;
  for (double v : p) acc += v;
  return acc;
}

DensityMatrix build_star_state(std::span<const DensityMatrix> sources) {
  const int n = static_cast<int>(sources.size());
  if (n < 1) throw std::invalid_argument("build_star_state: need at least one source");
  if (n > kMaxSources)
    throw std::invalid_argument("build_star_state: at most 6 sources supported (dim 4096), got " +
                                std::to_string(n));
  for (const DensityMatrix& s : sources)
    if (s.dim() != 4)
      throw std::invalid_argument("build_star_state: sources must be two-qubit states");
  Eigen::MatrixXcd acc = sources[0].matrix();
  for (int i = 1; i < n; ++i) acc = kron(acc, sources[i].matrix());
  return DensityMatrix(std::move(acc));
}

OutcomeDistribution joint_probability(const DensityMatrix& state,
                                      const MeasurementSettings& settings,
                                      std::span<const SourceNoise> noise,
                                      const StarInputs& inputs) {
  validate_shapes(state.dim(), settings, noise);
  const int n = settings.n();
  if (static_cast<int>(inputs.x.size()) != n)
    throw std::invalid_argument("joint_probability: expected " + std::to_string(n) +
                                " Alice inputs");
  if (inputs.y != 0 && inputs.y != 1)
    throw std::invalid_argument("joint_probability: y must be a bit");

  std::vector<std::array<Eigen::Matrix4cd, 4>> w(n);
  for (int i = 0; i < n; ++i) {
    const int xi = inputs.x[i];
    if (xi != 0 && xi != 1)
      throw std::invalid_argument("joint_probability: x_" + std::to_string(i + 1) +
                                  " must be a bit");
    const PovmPair ea = noisy_projector_pair(settings.alice[i][xi], noise[i].mu);
    const PovmPair mh = noisy_projector_pair(settings.bob[i][inputs.y], noise[i].beta);
    const std::array<const Eigen::Matrix2cd*, 2> es{&ea.e0, &ea.e1};
    const std::array<const Eigen::Matrix2cd*, 2> ms{&mh.e0, &mh.e1};
    for (int a = 0; a < 2; ++a)
      for (int h = 0; h < 2; ++h) w[i][2 * a + h] = kron22(*es[a], *ms[h]);
  }

  std::vector<double> p_ah(static_cast<std::size_t>(1) << (2 * n), 0.0);
  fill_outcomes(state.matrix(), 0, n, 0, w, p_ah);

  OutcomeDistribution dist;
  dist.n_sources = n;
  dist.p.assign(static_cast<std::size_t>(1) << (n + 1), 0.0);
  for (std::size_t idx = 0; idx < p_ah.size(); ++idx) {
    std::uint32_t a_bits = 0;
    int h_parity = 0;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t combo = (idx >> (2 * (n - 1 - i))) & 3u;
      a_bits = (a_bits << 1) | (combo >> 1);
      h_parity ^= static_cast<int>(combo & 1u);
    }
    dist.p[(static_cast<std::size_t>(a_bits) << 1) | static_cast<std::size_t>(h_parity)] +=
        p_ah[idx];
  }

  double total = 0.0;
  for (double& v : dist.p) {
    if (v < kProbabilityFloor)
      throw std::runtime_error("joint_probability: probability " + std::to_string(v) +
                               " below the clipping floor; POVM or channel is broken");
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (std::abs(total - 1.0) > kDistributionSumTol)
    throw std::runtime_error("joint_probability: outcome distribution sums to " +
                             std::to_string(total));
  for (double& v : dist.p) v /= total;
  return dist;
}

double correlator(const DensityMatrix& state, const MeasurementSettings& settings,
                  std::span<const SourceNoise> noise, const StarInputs& inputs) {
  const OutcomeDistribution dist = joint_probability(state, settings, noise, inputs);
  const int n = dist.n_sources;
  double acc = 0.0;
  for (std::uint32_t a_bits = 0; a_bits < (1u << n); ++a_bits) {
    const int a_parity = std::popcount(a_bits) & 1;
    for (int b = 0; b < 2; ++b) {
      const double sign = ((a_parity + b) & 1) ? -1.0 : 1.0;
      acc += sign * dist.probability(a_bits, b);
    }
  }
  return acc;
}

CriterionResult compute_I_J(const DensityMatrix& state, const MeasurementSettings& settings,
                            std::span<const SourceNoise> noise) {
  validate_shapes(state.dim(), settings, noise);
  const int n = settings.n();
  double isum = 0.0, jsum = 0.0;
  StarInputs in;
  in.x.assign(n, 0);
  for (std::uint32_t x = 0; x < (1u << n); ++x) {
    for (int i = 0; i < n; ++i) in.x[i] = static_cast<int>((x >> (n - 1 - i)) & 1u);
    in.y = 0;
    isum += correlator(state, settings, noise, in);
    in.y = 1;
    const double sign = (std::popcount(x) & 1) ? -1.0 : 1.0;
    jsum += sign * correlator(state, settings, noise, in);
  }
  const double norm = static_cast<double>(1u << n);
  return CriterionResult::from_ij(isum / norm, jsum / norm, n);
}

namespace detail {

std::pair<double, double> ij_via_observables(const DensityMatrix& state,
                                             const MeasurementSettings& settings,
                                             std::span<const SourceNoise> noise) {
  validate_shapes(state.dim(), settings, noise);
  return ij_fast(state.matrix(), settings, noise);
}

}  // namespace detail

namespace {

// I and J are affine in any single direction vector v. The coefficients
// come from 4x4 traces against the state reduced to the vector's source;
// the maximizer of |I|^(1/n) + |J|^(1/n) over the unit sphere then lies on
// the circle spanned by the two gradients.
struct AffineProbe {
  Eigen::Vector3d gi = Eigen::Vector3d::Zero();
  Eigen::Vector3d gj = Eigen::Vector3d::Zero();
  double ci = 0.0;
  double cj = 0.0;
};

// Tr over the last source block after applying w to it.
Eigen::MatrixXcd peel_last(const Eigen::MatrixXcd& m, const Eigen::Matrix4cd& w) {
  const Eigen::Index q = m.rows() / 4;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q, q);
  for (Eigen::Index r = 0; r < q; ++r)
    for (Eigen::Index c = 0; c < q; ++c) {
      Complex acc(0.0, 0.0);
      for (int s = 0; s < 4; ++s)
        for (int sp = 0; sp < 4; ++sp) acc += w(s, sp) * m(r * 4 + sp, c * 4 + s);
      out(r, c) = acc;
    }
  return out;
}

// State reduced to source keep: every other source contracted with its
// current product-observable block.
Eigen::Matrix4cd reduce_to_source(const Eigen::MatrixXcd& state,
                                  std::span<const Eigen::Matrix4cd> ops, int keep) {
  const int n = static_cast<int>(ops.size());
  Eigen::MatrixXcd cur = state;
  for (int j = n - 1; j > keep; --j) cur = peel_last(cur, ops[j]);
  for (int j = 0; j < keep; ++j) cur = peel_first(cur, ops[j]);
  return cur;
}

// Tr[(a (x) b) r] for 2x2 factors on a 4x4 reduced state.
double trace_kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b,
                  const Eigen::Matrix4cd& r) {
  Complex acc(0.0, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) acc += a(i, j) * b(k, l) * r(j * 2 + l, i * 2 + k);
  return acc.real();
}

double circle_objective(const AffineProbe& pr, const Eigen::Vector3d& e1,
                        const Eigen::Vector3d& e2, double phi, int n) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double ui = pr.gi.dot(e1) * c + pr.gi.dot(e2) * s + pr.ci;
  const double uj = pr.gj.dot(e1) * c + pr.gj.dot(e2) * s + pr.cj;
  return std::pow(std::abs(ui), 1.0 / n) + std::pow(std::abs(uj), 1.0 / n);
}

bool maximize_direction(const AffineProbe& pr, int n, Eigen::Vector3d* slot) {
  Eigen::Vector3d e1;
  if (pr.gi.norm() > 1e-14) {
    e1 = pr.gi.normalized();
  } else if (pr.gj.norm() > 1e-14) {
    e1 = pr.gj.normalized();
  } else {
    return false;  // objective does not depend on this direction
  }
  const Eigen::Vector3d rest = pr.gj - pr.gj.dot(e1) * e1;
  const Eigen::Vector3d e2 = rest.norm() > 1e-14 ? rest.normalized() : e1.unitOrthogonal();

  constexpr int kCoarse = 512;
  double best_phi = 0.0, best_val = -1.0;
  for (int i = 0; i < kCoarse; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / kCoarse;
    const double v = circle_objective(pr, e1, e2, phi, n);
    if (v > best_val) {
      best_val = v;
      best_phi = phi;
    }
  }
  double lo = best_phi - 2.0 * std::numbers::pi / kCoarse;
  double hi = best_phi + 2.0 * std::numbers::pi / kCoarse;
  for (int it = 0; it < 90; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (circle_objective(pr, e1, e2, m1, n) < circle_objective(pr, e1, e2, m2, n))
      lo = m1;
    else
      hi = m2;
  }
  const double phi = 0.5 * (lo + hi);
  *slot = std::cos(phi) * e1 + std::sin(phi) * e2;
  return true;
}

struct AscentOutcome {
  double s = 0.0;
  int sweeps = 0;
  bool converged = false;
};

AscentOutcome ascend(const Eigen::MatrixXcd& state, MeasurementSettings& settings,
                     std::span<const SourceNoise> noise) {
  const int n = settings.n();
  std::vector<Eigen::Matrix4cd> wi(n), wj(n);
  auto refresh_blocks = [&](int i) {
    const Eigen::Matrix2cd a0 = noise[i].mu * observable(settings.alice[i][0]);
    const Eigen::Matrix2cd a1 = noise[i].mu * observable(settings.alice[i][1]);
    wi[i] = kron22(0.5 * (a0 + a1), noise[i].beta * observable(settings.bob[i][0]));
    wj[i] = kron22(0.5 * (a0 - a1), noise[i].beta * observable(settings.bob[i][1]));
  };
  for (int i = 0; i < n; ++i) refresh_blocks(i);

  const auto& sigma = pauli_basis();
  auto eval = [&] {
    const auto [i, j] = ij_fast(state, settings, noise);
    return std::pow(std::abs(i), 1.0 / n) + std::pow(std::abs(j), 1.0 / n);
  };

  AscentOutcome out;
  double current = eval();
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    out.sweeps = sweep;
    const double before = current;
    for (int i = 0; i < n; ++i) {
      // 4x4 state blocks seen by source i under everyone else's current
      // observables; they do not depend on source i's own settings.
      const Eigen::Matrix4cd ri = reduce_to_source(state, wi, i);
      const Eigen::Matrix4cd rj = reduce_to_source(state, wj, i);
      const double mu = noise[i].mu, beta = noise[i].beta;

      for (int slot = 0; slot < 4; ++slot) {
        AffineProbe pr;
        if (slot < 2) {
          // Alice slot x: I = Tr[(mu (a_0+a_1)/2 . s (x) beta b_0 . s) R_I],
          // J = Tr[(mu (a_0-a_1)/2 . s (x) beta b_1 . s) R_J]; the fixed
          // partner direction enters J with the opposite sign of a_1.
          const Eigen::Matrix2cd other_obs = mu * observable(settings.alice[i][1 - slot]);
          const Eigen::Matrix2cd b0 = beta * observable(settings.bob[i][0]);
          const Eigen::Matrix2cd b1 = beta * observable(settings.bob[i][1]);
          const double jsign = slot == 0 ? 1.0 : -1.0;
          for (int k = 0; k < 3; ++k) {
            pr.gi(k) = 0.5 * mu * trace_kron(sigma[k], b0, ri);
            pr.gj(k) = jsign * 0.5 * mu * trace_kron(sigma[k], b1, rj);
          }
          pr.ci = 0.5 * trace_kron(other_obs, b0, ri);
          pr.cj = -jsign * 0.5 * trace_kron(other_obs, b1, rj);
        } else {
          // Bob slot y = slot - 2; exactly one of I/J depends on it.
          const Eigen::Matrix2cd a0 = mu * observable(settings.alice[i][0]);
          const Eigen::Matrix2cd a1 = mu * observable(settings.alice[i][1]);
          if (slot == 2) {
            const Eigen::Matrix2cd abar = 0.5 * (a0 + a1);
            for (int k = 0; k < 3; ++k) pr.gi(k) = beta * trace_kron(abar, sigma[k], ri);
            const Eigen::Matrix2cd adiff = 0.5 * (a0 - a1);
            pr.cj = trace_kron(adiff, beta * observable(settings.bob[i][1]), rj);
          } else {
            const Eigen::Matrix2cd adiff = 0.5 * (a0 - a1);
            for (int k = 0; k < 3; ++k) pr.gj(k) = beta * trace_kron(adiff, sigma[k], rj);
            const Eigen::Matrix2cd abar = 0.5 * (a0 + a1);
            pr.ci = trace_kron(abar, beta * observable(settings.bob[i][0]), ri);
          }
        }

        Eigen::Vector3d* target = slot < 2 ? &settings.alice[i][slot] : &settings.bob[i][slot - 2];
        if (maximize_direction(pr, n, target)) refresh_blocks(i);
      }
    }
    current = eval();
    if (current - before < kSweepTol) {
      out.converged = true;
      break;
    }
  }
  out.s = current;
  return out;
}

}  // namespace

OptimizeResult optimize_settings(std::span<const DensityMatrix> sources,
                                 std::span<const SourceNoise> noise, int restarts,
                                 std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("optimize_settings: restarts must be >= 1");
  const int n = static_cast<int>(sources.size());
  const DensityMatrix state = build_star_state(sources);
  if (static_cast<int>(noise.size()) != n)
    throw std::invalid_argument("optimize_settings: noise record count mismatch");

  MeasurementSettings best_settings;
  AscentOutcome best_out;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r));
    MeasurementSettings settings = MeasurementSettings::random(n, rng);
    const AscentOutcome out = ascend(state.matrix(), settings, noise);
    if (!have_best || out.s > best_out.s) {
      best_settings = std::move(settings);
      best_out = out;
      have_best = true;
    }
  }

  OptimizeResult res;
  res.settings = best_settings;
  res.result = compute_I_J(state, best_settings, noise);
  res.sweeps = best_out.sweeps;
  res.converged = best_out.converged;
  return res;
}

}  // namespace starnoise
