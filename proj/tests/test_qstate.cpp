#include <doctest.h>

#include <random>

#include "starnoise/noise.hpp"
#include "starnoise/qstate.hpp"
#include "test_util.hpp"

using namespace starnoise;
using namespace starnoise::testing;

namespace {

DensityMatrix singlet() {
  Eigen::Vector4cd psi;
  psi << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
  return DensityMatrix(psi * psi.adjoint());
}

}  // namespace

TEST_CASE("DensityMatrix shape checks") {
  CHECK_THROWS_AS(DensityMatrix(Eigen::MatrixXcd::Identity(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(Eigen::MatrixXcd::Identity(4, 2)), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(Eigen::MatrixXcd::Identity(6, 6)), std::invalid_argument);
  CHECK(DensityMatrix(Eigen::MatrixXcd::Identity(4, 4) / 4.0).dim() == 4);
}

TEST_CASE("bloch_decompose on the maximally mixed state") {
  const auto form = bloch_decompose(DensityMatrix(Eigen::MatrixXcd::Identity(4, 4) / 4.0));
  CHECK(form.a.norm() < 1e-15);
  CHECK(form.b.norm() < 1e-15);
  CHECK(form.t.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("bloch_decompose on the singlet") {
  const auto form = bloch_decompose(singlet());
  CHECK(form.a.norm() < 1e-12);
  CHECK(form.b.norm() < 1e-12);
  const Eigen::Matrix3d expected = Eigen::Vector3d(-1, -1, -1).asDiagonal();
  CHECK((form.t - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bloch_decompose of the gate-noise source matches diag(-ad, ad, d)") {
  const auto form = bloch_decompose(generate_noisy_source(0.9, 0.8));
  const Eigen::Matrix3d expected = Eigen::Vector3d(-0.72, 0.72, 0.8).asDiagonal();
  CHECK((form.t - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(form.a.norm() < 1e-12);
  CHECK(form.b.norm() < 1e-12);
}

TEST_CASE("bloch_decompose rejects wrong dimension and invalid states") {
  CHECK_THROWS_AS(bloch_decompose(DensityMatrix(Eigen::MatrixXcd::Identity(2, 2) / 2.0)),
                  std::invalid_argument);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(4, 4);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(bloch_decompose(DensityMatrix(bad)), std::domain_error);
}

TEST_CASE("bloch_compose inverts the tabulated forms") {
  BlochForm zero;
  CHECK(max_abs_diff(bloch_compose(zero).matrix(), Eigen::MatrixXcd::Identity(4, 4) / 4.0) <
        1e-15);

  BlochForm sing;
  sing.t = Eigen::Vector3d(-1, -1, -1).asDiagonal();
  CHECK(max_abs_diff(bloch_compose(sing).matrix(), singlet().matrix()) < 1e-15);
}

TEST_CASE("bloch round trip on random valid states") {
  std::mt19937_64 rng(kTestSeed);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho = random_state(4, rng);
    const DensityMatrix back = bloch_compose(bloch_decompose(rho));
    CHECK(max_abs_diff(rho.matrix(), back.matrix()) < kRoundTripTol);
  }
}

TEST_CASE("correlation_spectrum of the gate-noise diagonal") {
  const double a = 0.95, d = 0.97;
  const Eigen::Matrix3d t = Eigen::Vector3d(-a * d, a * d, d).asDiagonal();
  const auto sp = correlation_spectrum(t);
  CHECK(sp.t1 == doctest::Approx(d * d).epsilon(1e-14));
  CHECK(sp.t2 == doctest::Approx(a * a * d * d).epsilon(1e-14));
  CHECK(sp.t3 == doctest::Approx(a * a * d * d).epsilon(1e-14));
  CHECK(sp.t1 >= sp.t2);
  CHECK(sp.t2 >= sp.t3);
}

TEST_CASE("correlation_spectrum of zero is zero") {
  const auto sp = correlation_spectrum(Eigen::Matrix3d::Zero());
  CHECK(sp.t1 == 0.0);
  CHECK(sp.t2 == 0.0);
  CHECK(sp.t3 == 0.0);
}

TEST_CASE("correlation_spectrum matches an independent SVD oracle") {
  std::mt19937_64 rng(kTestSeed + 1);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = uni(rng);
    const auto sp = correlation_spectrum(t);
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
    const auto sv = svd.singularValues();
    CHECK(std::abs(sp.t1 - sv(0) * sv(0)) < 1e-10);
    CHECK(std::abs(sp.t2 - sv(1) * sv(1)) < 1e-10);
    CHECK(std::abs(sp.t3 - sv(2) * sv(2)) < 1e-10);
  }
}

TEST_CASE("correlation_spectrum is invariant under rotations") {
  std::mt19937_64 rng(kTestSeed + 2);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = uni(rng);
    const Eigen::Matrix3d rotated = random_rotation(rng) * t * random_rotation(rng);
    const auto sp = correlation_spectrum(t);
    const auto sp_rot = correlation_spectrum(rotated);
    CHECK(std::abs(sp.t1 - sp_rot.t1) < 1e-10);
    CHECK(std::abs(sp.t2 - sp_rot.t2) < 1e-10);
    CHECK(std::abs(sp.t3 - sp_rot.t3) < 1e-10);
  }
}

TEST_CASE("validate_state verdicts") {
  CHECK(validate_state(DensityMatrix(Eigen::MatrixXcd::Identity(4, 4) / 4.0)).passed);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(4, 4);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  const auto rep = validate_state(DensityMatrix(bad));
  CHECK_FALSE(rep.passed);
  CHECK(rep.min_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("spectrum bound t1 <= 1 on noise-module states") {
  std::mt19937_64 rng(kTestSeed + 3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    SourceNoise noise;
    noise.alpha = uni(rng);
    noise.delta = uni(rng);
    const ChannelKind kind = trial % 2 ? ChannelKind::amp : ChannelKind::ph;
    if (kind == ChannelKind::amp) {
      noise.gamma_amp = uni(rng);
      noise.xi_amp = uni(rng);
    } else {
      noise.gamma_ph = uni(rng);
      noise.xi_ph = uni(rng);
    }
    const auto form = bloch_decompose(effective_source_state(noise, kind));
    const auto sp = correlation_spectrum(form.t);
    CHECK(sp.t1 <= 1.0 + 1e-10);
    CHECK(sp.t3 >= -1e-12);
  }
}
