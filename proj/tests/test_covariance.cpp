#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lrdfield/covariance.hpp"
#include "lrdfield/errors.hpp"

using namespace lrdfield;

TEST_CASE("evaluate examples") {
  CHECK(evaluate(CovarianceModel::cauchy(0.5), 0.0) == 1.0);
  CHECK(evaluate(CovarianceModel::bessel(0.0), 0.0) == 1.0);
  CHECK(evaluate(CovarianceModel::cauchy(0.5), 1.0) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-14));
  CHECK(evaluate(CovarianceModel::squared_exponential(), 0.5) == doctest::Approx(std::exp(-0.25)));
  CHECK_THROWS_AS(evaluate(CovarianceModel::cauchy(0.5), -1.0), DomainError);
}

TEST_CASE("bessel model matches 2^nu Gamma(nu+1) J_nu(r) / r^nu") {
  const double nu = 0.3;
  const auto model = CovarianceModel::bessel(nu);
  for (double r : {0.5, 2.0, 7.0, 40.0}) {
    const double ref = std::pow(2.0, nu) * boost::math::tgamma(nu + 1.0) *
                       boost::math::cyl_bessel_j(nu, r) / std::pow(r, nu);
    CHECK(evaluate(model, r) == doctest::Approx(ref).epsilon(1e-10));
  }
  CHECK_THROWS_AS(CovarianceModel::bessel(0.5), DomainError);
  CHECK_THROWS_AS(CovarianceModel::bessel(-0.1), DomainError);
  CHECK_THROWS_AS(CovarianceModel::cauchy(0.0), DomainError);
}

TEST_CASE("continuity at zero and bound by one") {
  const CovarianceModel models[] = {
      CovarianceModel::cauchy(0.3), CovarianceModel::cauchy(1.7), CovarianceModel::bessel(0.0),
      CovarianceModel::bessel(0.45), CovarianceModel::squared_exponential(),
      CovarianceModel::powerlaw_sv(0.5, SlowlyVaryingKind::LogOscillating)};
  for (const auto& m : models) {
    CHECK(evaluate(m, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    int violations = 0;
    for (double r = 0.0; r <= 1000.0; r += 0.01) {
      if (std::abs(evaluate(m, r)) > 1.0) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("cauchy tail r^alpha B(r) -> 1") {
  for (double alpha : {0.1, 0.65, 0.9, 1.5}) {
    for (double r : {1e2, 1e3, 1e4}) {
      CHECK(evaluate(CovarianceModel::cauchy(alpha), r) * std::pow(r, alpha) ==
            doctest::Approx(1.0).epsilon(0.02));
    }
  }
}

TEST_CASE("bessel tail envelope") {
  const auto model = CovarianceModel::bessel(0.0);
  double worst = 0.0;
  for (double r = 50.0; r < 5000.0; r += 0.05) {
    worst = std::max(worst, std::abs(evaluate(model, r)) * std::sqrt(std::numbers::pi * r / 2.0));
  }
  CHECK(worst <= 1.05);
}

TEST_CASE("slowly varying factors") {
  CHECK(slowly_varying(SlowlyVaryingKind::ConstantOne, 100.0) == 1.0);
  CHECK(slowly_varying(SlowlyVaryingKind::LogOscillating, 1.0) == 1.0);
  CHECK(slowly_varying(SlowlyVaryingKind::LogOscillating, 0.3) == 1.0);
  CHECK(slowly_varying(SlowlyVaryingKind::LogOscillating, std::exp(1.0)) ==
        doctest::Approx(std::exp(std::cos(1.0))).epsilon(1e-13));
  CHECK_THROWS_AS(slowly_varying(SlowlyVaryingKind::ConstantOne, 0.0), DomainError);
}

TEST_CASE("oscillating factor ratios shrink towards one") {
  // sup |log L(lambda r) / L(r)| over r in [10^K, 10^2K]; with u = (log r)^{1/3}
  // it decays like log(lambda) / (3u), so only far out does it get small.
  auto sup_log_ratio = [](double lambda, double k) {
    double worst = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double r = std::pow(10.0, k + k * i / 4000.0);
      const double q = slowly_varying(SlowlyVaryingKind::LogOscillating, lambda * r) /
                       slowly_varying(SlowlyVaryingKind::LogOscillating, r);
      worst = std::max(worst, std::abs(std::log(q)));
    }
    return worst;
  };
  for (double lambda : {2.0, 10.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double k : {2.0, 6.0, 20.0, 60.0, 150.0}) {
      const double s = sup_log_ratio(lambda, k);
      MESSAGE("lambda=" << lambda << " K=" << k << " sup|log ratio|=" << s);
      CHECK(s < prev);
      // mean value bound: |d/du (u cos u)| <= 1 + u
      const double u_hi = std::cbrt(2.0 * k * std::log(10.0) + std::log(lambda));
      const double du = std::cbrt(k * std::log(10.0) + std::log(lambda)) - std::cbrt(k * std::log(10.0));
      CHECK(s <= (1.0 + u_hi) * du + 1e-12);
      prev = s;
    }
  }
  CHECK(sup_log_ratio(2.0, 150.0) < std::log(1.1));
}

TEST_CASE("c2 constant") {
  CHECK(c2(2, 1.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-13));
  CHECK(c2(1, 0.5) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-13));
  const double ref = boost::math::tgamma((2.0 - 0.65) / 2.0) /
                     (std::pow(2.0, 0.65) * std::numbers::pi * boost::math::tgamma(0.65 / 2.0));
  CHECK(c2(2, 0.65) == doctest::Approx(ref).epsilon(1e-12));
  CHECK_THROWS_AS(c2(2, 2.0), DomainError);
  CHECK_THROWS_AS(c2(2, 0.0), DomainError);
}

TEST_CASE("long-range flags and parameters") {
  CHECK(lrd_flag(CovarianceModel::cauchy(0.5), 2));
  CHECK_FALSE(lrd_flag(CovarianceModel::cauchy(2.5), 2));
  CHECK_FALSE(lrd_flag(CovarianceModel::squared_exponential(), 2));
  CHECK(lrd_flag(CovarianceModel::bessel(0.0), 2));
  const auto p = lrd_params(CovarianceModel::cauchy(0.65));
  CHECK(p.alpha == 0.65);
  CHECK(p.sv_kind == SlowlyVaryingKind::ConstantOne);
  CHECK_THROWS_AS(lrd_params(CovarianceModel::bessel(0.0)), DomainError);
  CHECK_THROWS_AS(lrd_params(CovarianceModel::squared_exponential()), DomainError);
}

TEST_CASE("model text round trip") {
  const CovarianceModel models[] = {
      CovarianceModel::cauchy(0.65), CovarianceModel::bessel(0.0),
      CovarianceModel::squared_exponential(),
      CovarianceModel::powerlaw_sv(0.5, SlowlyVaryingKind::LogOscillating)};
  for (const auto& m : models) CHECK(CovarianceModel::parse(m.to_string()) == m);
  CHECK(CovarianceModel::cauchy(0.65).to_string() == "kind=cauchy alpha=0.65");
  CHECK(CovarianceModel::parse("kind=bessel nu=0.0") == CovarianceModel::bessel(0.0));
  CHECK_THROWS_AS(CovarianceModel::parse("kind=matern nu=1"), ConfigError);
  CHECK_THROWS_AS(CovarianceModel::parse("kind=cauchy alpha=abc"), ConfigError);
  CHECK_THROWS_AS(CovarianceModel::parse("kind=cauchy"), ConfigError);
}
