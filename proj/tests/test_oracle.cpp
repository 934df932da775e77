#include <doctest.h>

#include <random>

#include "starnoise/oracle.hpp"
#include "test_util.hpp"

using namespace starnoise;
using namespace starnoise::testing;

namespace {

DensityMatrix singlet() {
  Eigen::Vector4cd psi;
  psi << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
  return DensityMatrix(psi * psi.adjoint());
}

MeasurementSettings all_z(int n) {
  MeasurementSettings s;
  const Eigen::Vector3d z(0, 0, 1);
  s.alice.assign(n, {z, z});
  s.bob.assign(n, {z, z});
  return s;
}

// Independent brute-force evaluation for n = 2: explicit tensor-product
// POVMs, one trace per branch-outcome combination.
std::vector<double> brute_force_n2(const DensityMatrix& state, const MeasurementSettings& st,
                                   std::span<const SourceNoise> noise, const StarInputs& in) {
  std::vector<double> p(8, 0.0);
  const PovmPair e1 = noisy_projector_pair(st.alice[0][in.x[0]], noise[0].mu);
  const PovmPair e2 = noisy_projector_pair(st.alice[1][in.x[1]], noise[1].mu);
  const PovmPair m1 = noisy_projector_pair(st.bob[0][in.y], noise[0].beta);
  const PovmPair m2 = noisy_projector_pair(st.bob[1][in.y], noise[1].beta);
  const std::array<const Eigen::Matrix2cd*, 2> es1{&e1.e0, &e1.e1}, es2{&e2.e0, &e2.e1};
  const std::array<const Eigen::Matrix2cd*, 2> ms1{&m1.e0, &m1.e1}, ms2{&m2.e0, &m2.e1};
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int h1 = 0; h1 < 2; ++h1)
        for (int h2 = 0; h2 < 2; ++h2) {
          const Eigen::MatrixXcd op =
              kron(kron(*es1[a1], *ms1[h1]), kron(*es2[a2], *ms2[h2]));
          const double val = (op * state.matrix()).trace().real();
          const int b = h1 ^ h2;
          p[static_cast<std::size_t>((((a1 << 1) | a2) << 1) | b)] += val;
        }
  return p;
}

}  // namespace

TEST_CASE("build_star_state shapes and guard") {
  const auto one = build_star_state(std::vector<DensityMatrix>{singlet()});
  CHECK(one.dim() == 4);
  CHECK(max_abs_diff(one.matrix(), singlet().matrix()) < 1e-15);

  const auto two = build_star_state(std::vector<DensityMatrix>{singlet(), singlet()});
  CHECK(two.dim() == 16);
  CHECK(std::abs(two.matrix().trace().real() - 1.0) < 1e-14);
  // Rank-1 projector: idempotent.
  CHECK(max_abs_diff(two.matrix() * two.matrix(), two.matrix()) < 1e-14);

  std::mt19937_64 rng(kTestSeed);
  const auto three = build_star_state(
      std::vector<DensityMatrix>{random_state(4, rng), random_state(4, rng),
                                 random_state(4, rng)});
  CHECK(three.dim() == 64);
  CHECK(validate_state(three).passed);

  const std::vector<DensityMatrix> seven(7, singlet());
  CHECK_THROWS_AS(build_star_state(seven), std::invalid_argument);
  CHECK_THROWS_AS(build_star_state(std::vector<DensityMatrix>{}), std::invalid_argument);
}

TEST_CASE("joint_probability on the singlet") {
  const auto state = singlet();
  const std::vector<SourceNoise> ideal{SourceNoise::ideal()};
  StarInputs in;
  in.x = {0};
  in.y = 0;
  const auto dist = joint_probability(state, all_z(1), ideal, in);
  CHECK(dist.probability(0, 0) < 1e-13);
  CHECK(dist.probability(1, 1) < 1e-13);
  CHECK(dist.probability(0, 1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(dist.probability(1, 0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("joint_probability with a blind Alice is uniform on her outcome") {
  std::mt19937_64 rng(kTestSeed + 1);
  SourceNoise blind;
  blind.mu = 0.0;
  const std::vector<SourceNoise> noise{blind};
  MeasurementSettings st;
  st.alice = {{random_unit(rng), random_unit(rng)}};
  st.bob = {{random_unit(rng), random_unit(rng)}};
  StarInputs in;
  in.x = {1};
  in.y = 1;
  const auto dist = joint_probability(random_state(4, rng), st, noise, in);
  const double a0 = dist.probability(0, 0) + dist.probability(0, 1);
  const double a1 = dist.probability(1, 0) + dist.probability(1, 1);
  CHECK(a0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a1 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("joint_probability factorizes over two singlet pairs") {
  const auto state = build_star_state(std::vector<DensityMatrix>{singlet(), singlet()});
  const std::vector<SourceNoise> ideal(2, SourceNoise::ideal());
  StarInputs in;
  in.x = {0, 0};
  in.y = 0;
  const auto dist = joint_probability(state, all_z(2), ideal, in);
  // Each pair anti-correlates; h_i = 1 - a_i, so b = parity(h) = parity(a).
  for (std::uint32_t a = 0; a < 4; ++a) {
    const int parity = ((a >> 1) ^ (a & 1)) & 1;
    CHECK(dist.probability(a, parity) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(dist.probability(a, 1 - parity) < 1e-12);
  }
}

TEST_CASE("joint_probability matches a brute-force construction at n=2") {
  std::mt19937_64 rng(kTestSeed + 2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const DensityMatrix state = random_state(16, rng);
    MeasurementSettings st;
    st.alice = {{random_unit(rng), random_unit(rng)}, {random_unit(rng), random_unit(rng)}};
    st.bob = {{random_unit(rng), random_unit(rng)}, {random_unit(rng), random_unit(rng)}};
    std::vector<SourceNoise> noise(2);
    for (auto& s : noise) {
      s.mu = uni(rng);
      s.beta = uni(rng);
    }
    StarInputs in;
    in.x = {static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
    in.y = static_cast<int>(rng() % 2);

    const auto dist = joint_probability(state, st, noise, in);
    const auto brute = brute_force_n2(state, st, noise, in);
    CHECK(std::abs(dist.sum() - 1.0) < 1e-10);
    for (std::uint32_t a = 0; a < 4; ++a)
      for (int b = 0; b < 2; ++b)
        CHECK(std::abs(dist.probability(a, b) - brute[(a << 1) | b]) < 1e-12);
  }
}

TEST_CASE("no-signaling: Alice marginals ignore the other inputs") {
  std::mt19937_64 rng(kTestSeed + 3);
  std::uniform_real_distribution<double> uni(0.3, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix state = random_state(16, rng);
    MeasurementSettings st;
    st.alice = {{random_unit(rng), random_unit(rng)}, {random_unit(rng), random_unit(rng)}};
    st.bob = {{random_unit(rng), random_unit(rng)}, {random_unit(rng), random_unit(rng)}};
    std::vector<SourceNoise> noise(2);
    for (auto& s : noise) {
      s.mu = uni(rng);
      s.beta = uni(rng);
    }

    auto alice1_marginal = [&](int x1, int x2, int y) {
      StarInputs in;
      in.x = {x1, x2};
      in.y = y;
      const auto dist = joint_probability(state, st, noise, in);
      double m = 0.0;
      for (std::uint32_t a = 0; a < 4; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a >> 1) == 0) m += dist.probability(a, b);
      return m;
    };
    const double base = alice1_marginal(0, 0, 0);
    CHECK(std::abs(alice1_marginal(0, 1, 0) - base) < 1e-10);
    CHECK(std::abs(alice1_marginal(0, 0, 1) - base) < 1e-10);
    CHECK(std::abs(alice1_marginal(0, 1, 1) - base) < 1e-10);
  }
}

TEST_CASE("joint_probability rejects malformed inputs") {
  const std::vector<SourceNoise> ideal{SourceNoise::ideal()};
  StarInputs in;
  in.x = {0};
  in.y = 2;
  CHECK_THROWS_AS(joint_probability(singlet(), all_z(1), ideal, in), std::invalid_argument);
  in.y = 0;
  in.x = {0, 1};
  CHECK_THROWS_AS(joint_probability(singlet(), all_z(1), ideal, in), std::invalid_argument);
  in.x = {3};
  CHECK_THROWS_AS(joint_probability(singlet(), all_z(1), ideal, in), std::invalid_argument);
  in.x = {0};
  const std::vector<SourceNoise> two(2, SourceNoise::ideal());
  CHECK_THROWS_AS(joint_probability(singlet(), all_z(1), two, in), std::invalid_argument);
  CHECK_THROWS_AS(joint_probability(singlet(), all_z(2), two, in), std::invalid_argument);
}

TEST_CASE("correlator on the singlet along z") {
  const std::vector<SourceNoise> ideal{SourceNoise::ideal()};
  StarInputs in;
  in.x = {0};
  in.y = 0;
  CHECK(correlator(singlet(), all_z(1), ideal, in) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("correlator scales by mu * beta through the full pipeline") {
  std::mt19937_64 rng(kTestSeed + 4);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix state = random_state(4, rng);
    MeasurementSettings st;
    st.alice = {{random_unit(rng), random_unit(rng)}};
    st.bob = {{random_unit(rng), random_unit(rng)}};
    StarInputs in;
    in.x = {static_cast<int>(rng() % 2)};
    in.y = static_cast<int>(rng() % 2);

    SourceNoise noisy;
    noisy.mu = uni(rng);
    noisy.beta = uni(rng);
    const double with_noise =
        correlator(state, st, std::vector<SourceNoise>{noisy}, in);
    const double ideal =
        correlator(state, st, std::vector<SourceNoise>{SourceNoise::ideal()}, in);
    CHECK(std::abs(with_noise - noisy.mu * noisy.beta * ideal) < 1e-12);
  }
}

TEST_CASE("correlator factorizes over product sources at n=3") {
  std::mt19937_64 rng(kTestSeed + 5);
  std::uniform_real_distribution<double> uni(0.5, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<DensityMatrix> sources{random_state(4, rng), random_state(4, rng),
                                       random_state(4, rng)};
    const auto state = build_star_state(sources);
    MeasurementSettings st;
    std::vector<SourceNoise> noise(3);
    for (int i = 0; i < 3; ++i) {
      st.alice.push_back({random_unit(rng), random_unit(rng)});
      st.bob.push_back({random_unit(rng), random_unit(rng)});
      noise[i].mu = uni(rng);
      noise[i].beta = uni(rng);
    }
    StarInputs in;
    in.x = {static_cast<int>(rng() % 2), static_cast<int>(rng() % 2),
            static_cast<int>(rng() % 2)};
    in.y = static_cast<int>(rng() % 2);

    double product = 1.0;
    for (int i = 0; i < 3; ++i) {
      MeasurementSettings single;
      single.alice = {st.alice[i]};
      single.bob = {st.bob[i]};
      StarInputs sin;
      sin.x = {in.x[i]};
      sin.y = in.y;
      product *= correlator(sources[i], single, std::vector<SourceNoise>{noise[i]}, sin);
    }
    CHECK(std::abs(correlator(state, st, noise, in) - product) < 1e-10);
  }
}

TEST_CASE("compute_I_J at the analytic CHSH settings of the singlet") {
  const double r = 1.0 / std::sqrt(2.0);
  MeasurementSettings st;
  st.alice = {{Eigen::Vector3d(r, 0, r), Eigen::Vector3d(-r, 0, r)}};
  st.bob = {{Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0)}};
  const auto res =
      compute_I_J(singlet(), st, std::vector<SourceNoise>{SourceNoise::ideal()});
  CHECK(res.s == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(res.i_term.has_value());
  CHECK(res.j_term.has_value());
  CHECK(std::abs(*res.i_term) == doctest::Approx(r).epsilon(1e-12));
  CHECK(std::abs(*res.j_term) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("equal Alice settings cancel J") {
  std::mt19937_64 rng(kTestSeed + 6);
  const Eigen::Vector3d a = random_unit(rng);
  MeasurementSettings st;
  st.alice = {{a, a}};
  st.bob = {{random_unit(rng), random_unit(rng)}};
  const auto res = compute_I_J(random_state(4, rng), st,
                               std::vector<SourceNoise>{SourceNoise::ideal()});
  CHECK(std::abs(*res.j_term) < 1e-13);
}

TEST_CASE("observable fast path equals the distribution path") {
  std::mt19937_64 rng(kTestSeed + 7);
  std::uniform_real_distribution<double> uni(0.2, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<DensityMatrix> sources;
    std::vector<SourceNoise> noise(n);
    MeasurementSettings st;
    for (int i = 0; i < n; ++i) {
      sources.push_back(random_state(4, rng));
      st.alice.push_back({random_unit(rng), random_unit(rng)});
      st.bob.push_back({random_unit(rng), random_unit(rng)});
      noise[i].mu = uni(rng);
      noise[i].beta = uni(rng);
    }
    const auto state = build_star_state(sources);
    const auto slow = compute_I_J(state, st, noise);
    const auto [fi, fj] = detail::ij_via_observables(state, st, noise);
    CHECK(std::abs(*slow.i_term - fi) < 1e-12);
    CHECK(std::abs(*slow.j_term - fj) < 1e-12);
  }
}

TEST_CASE("optimize_settings reaches sqrt(2) on the singlet") {
  const std::vector<DensityMatrix> sources{singlet()};
  const std::vector<SourceNoise> ideal{SourceNoise::ideal()};
  const auto res = optimize_settings(sources, ideal, 4, kTestSeed);
  CHECK(std::abs(res.result.s - std::sqrt(2.0)) < 1e-9);
  CHECK(res.result.s <= std::sqrt(2.0) + 1e-9);
  CHECK(res.converged);
}

TEST_CASE("optimized I/J reach the consistent closed form for the n=2 gate-noise pair") {
  SourceNoise gate;
  gate.alpha = 0.95;
  gate.delta = 0.97;
  gate.mu = 0.98;
  gate.beta = 0.98;
  const std::vector<DensityMatrix> sources(2, generate_noisy_source(0.95, 0.97));
  const std::vector<SourceNoise> noise(2, gate);
  const auto res = optimize_settings(sources, noise, 4, kTestSeed);
  const double closed = consistent_gate_value(0.95, 0.97, 0.98, 0.98);
  CHECK(std::abs(res.result.s - closed) < 1e-3);
  CHECK(res.result.s <= closed + 1e-9);
  // The reported result carries the I/J constituents from the honest path.
  CHECK(res.result.i_term.has_value());
  CHECK(res.result.j_term.has_value());
  const double check = std::pow(std::abs(*res.result.i_term), 0.5) +
                       std::pow(std::abs(*res.result.j_term), 0.5);
  CHECK(res.result.s == doctest::Approx(check).epsilon(1e-14));
}

TEST_CASE("optimize_settings matches the gate-noise closed form at n=2") {
  SourceNoise gate;
  gate.alpha = 0.9;
  gate.delta = 0.9;
  const std::vector<DensityMatrix> sources(2, generate_noisy_source(0.9, 0.9));
  const std::vector<SourceNoise> noise(2, gate);
  const auto res = optimize_settings(sources, noise, 4, kTestSeed);
  const double closed = 1.2108261642366339;  // delta sqrt(alpha^2 + 1)
  CHECK(std::abs(res.result.s - closed) < 1e-3);
  CHECK(res.result.s <= closed + 1e-9);
}

TEST_CASE("heterogeneous spectra: oracle reaches the proportional-split maximum") {
  // When t1/t2 ratios differ across sources, the product closed form is a
  // strict lower bound; the achievable maximum is
  // (prod mu beta)^(1/n) prod (t1_i + t2_i)^(1/(2n)), attained by splitting
  // each source's correlation budget proportionally between I and J.
  SourceNoise s1;
  s1.alpha = 0.92;
  s1.delta = 0.77;
  s1.mu = 0.86;
  s1.beta = 0.74;
  s1.gamma_amp = 0.24;
  s1.xi_amp = 0.07;
  SourceNoise s2;
  s2.alpha = 0.73;
  s2.delta = 0.97;
  s2.mu = 0.84;
  s2.beta = 0.73;
  s2.gamma_amp = 0.21;
  s2.xi_amp = 0.04;

  const std::vector<SourceNoise> noise{s1, s2};
  const std::vector<DensityMatrix> sources{effective_source_state(s1, ChannelKind::amp),
                                           effective_source_state(s2, ChannelKind::amp)};
  const auto sp1 = correlation_spectrum(bloch_decompose(sources[0]).t);
  const auto sp2 = correlation_spectrum(bloch_decompose(sources[1]).t);
  REQUIRE(sp1.t1 / sp1.t2 != doctest::Approx(sp2.t1 / sp2.t2).epsilon(1e-3));

  StarConfig config;
  config.n = 2;
  config.sources = noise;
  config.channel_kind = ChannelKind::amp;
  const double product_form =
      s_star_noisy(config, std::vector<CorrelationSpectrum>{sp1, sp2}).s;
  const double vis = std::sqrt(s1.mu * s1.beta * s2.mu * s2.beta);
  const double split_max = vis * std::pow((sp1.t1 + sp1.t2) * (sp2.t1 + sp2.t2), 0.25);
  REQUIRE(split_max > product_form);

  const auto res = optimize_settings(sources, noise, 6, kTestSeed);
  CHECK(res.result.s >= product_form - 1e-9);
  CHECK(std::abs(res.result.s - split_max) < 1e-3);
  CHECK(res.result.s <= split_max + 1e-9);
}

TEST_CASE("optimize_settings matches the AD closed form at n=3") {
  SourceNoise ad;
  ad.gamma_amp = 0.1;
  ad.xi_amp = 0.1;
  const std::vector<DensityMatrix> sources(3, effective_source_state(ad, ChannelKind::amp));
  const std::vector<SourceNoise> noise(3, ad);
  const auto res = optimize_settings(sources, noise, 4, kTestSeed);
  const double closed = s_star_ad(StarConfig::consistent(3, ad, ChannelKind::amp)).s;
  CHECK(std::abs(res.result.s - closed) < 1e-3);
  CHECK(res.result.s <= closed + 1e-9);
}
