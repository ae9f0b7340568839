#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lrdfield/errors.hpp"
#include "lrdfield/specialfuns.hpp"

namespace sf = lrdfield::special;

TEST_CASE("gamma examples and domain") {
  CHECK(sf::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sf::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(sf::gamma(1.5) == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK_THROWS_AS(sf::gamma(0.0), lrdfield::DomainError);
  CHECK_THROWS_AS(sf::gamma(-1.5), lrdfield::DomainError);
}

TEST_CASE("gamma agrees with boost to 1e-12 relative") {
  for (double x = 0.01; x < 60.0; x *= 1.37) {
    const double ref = boost::math::tgamma(x);
    CHECK(std::abs(sf::gamma(x) - ref) <= 1e-12 * std::abs(ref));
    CHECK(sf::log_gamma(x) == doctest::Approx(boost::math::lgamma(x)).epsilon(1e-12));
  }
}

TEST_CASE("incomplete beta examples") {
  CHECK(sf::incomplete_beta(1.0, 2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sf::incomplete_beta(1.0 / 3.0, 0.5, 1.0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-11));
  CHECK(sf::incomplete_beta(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(sf::incomplete_beta(0.0, 1.0, 1.0), lrdfield::DomainError);
  CHECK_THROWS_AS(sf::incomplete_beta(1.5, 1.0, 1.0), lrdfield::DomainError);
  CHECK_THROWS_AS(sf::incomplete_beta(0.5, 0.0, 1.0), lrdfield::DomainError);
  CHECK_THROWS_AS(sf::incomplete_beta(0.5, 1.0, -2.0), lrdfield::DomainError);
}

TEST_CASE("incomplete beta agrees with boost and is monotone in mu") {
  const double ps[] = {0.5, 1.0, 1.5, 2.5, 7.0};
  for (double p : ps) {
    for (double q : ps) {
      double prev = 0.0;
      for (int i = 1; i <= 100; ++i) {
        const double mu = i / 100.0;
        const double v = sf::incomplete_beta(mu, p, q);
        CHECK(std::abs(v - boost::math::ibeta(p, q, mu)) <= 1e-10);
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
  }
}

TEST_CASE("bessel J examples") {
  CHECK(sf::bessel_j(0.0, 0.0) == 1.0);
  CHECK(sf::bessel_j(1.0, 0.0) == 0.0);
  CHECK(std::abs(sf::bessel_j(0.0, 2.404825557695773)) <= 1e-9);
  CHECK_THROWS_AS(sf::bessel_j(0.0, -1.0), lrdfield::DomainError);
}

TEST_CASE("bessel J agrees with boost on [0, 1e4] to 1e-10") {
  const double nus[] = {0.0, 0.1, 0.25, 0.4, 0.5, 1.0, 1.5, 2.0, 3.3};
  for (double nu : nus) {
    for (double x = 0.0; x <= 1e4; x = x < 1 ? x + 0.173 : x * 1.031 + 0.11) {
      INFO("nu=" << nu << " x=" << x);
      CHECK(std::abs(sf::bessel_j(nu, x) - boost::math::cyl_bessel_j(nu, x)) <= 1e-10);
    }
  }
}

TEST_CASE("bessel recurrence J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu") {
  const double nus[] = {1.0, 1.3, 2.0, 2.7};
  const double xs[] = {0.3, 1.0, 5.5, 11.9, 12.1, 30.0, 75.0, 500.0};
  for (double nu : nus) {
    for (double x : xs) {
      const double lhs = sf::bessel_j(nu - 1.0, x) + sf::bessel_j(nu + 1.0, x);
      CHECK(std::abs(lhs - 2.0 * nu / x * sf::bessel_j(nu, x)) <= 1e-8);
    }
  }
}

TEST_CASE("hermite examples and degree bound") {
  CHECK(sf::hermite(2, 3.0) == 8.0);
  CHECK(sf::hermite(0, -7.5) == 1.0);
  CHECK(sf::hermite(3, 2.0) == 2.0);
  CHECK_NOTHROW(sf::hermite(sf::kMaxHermiteDegree, 0.5));
  CHECK_THROWS_AS(sf::hermite(sf::kMaxHermiteDegree + 1, 0.5), lrdfield::DomainError);
  CHECK_THROWS_AS(sf::hermite(-1, 0.5), lrdfield::DomainError);
}

TEST_CASE("hermite orthogonality against the normal density") {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (int j = 0; j <= 8; ++j) {
    for (int k = 0; k <= 8; ++k) {
      auto f = [&](double x) { return sf::hermite(j, x) * sf::hermite(k, x) * sf::std_normal_pdf(x); };
      const double v = Rule::integrate(f, -40.0, 40.0, 20, 1e-14);
      const double expected = j == k ? sf::factorial(k) : 0.0;
      INFO("j=" << j << " k=" << k);
      CHECK(std::abs(v - expected) <= 1e-8);
    }
  }
}

TEST_CASE("normal pdf and cdf") {
  CHECK(sf::std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(sf::std_normal_cdf(0.0) == 0.5);
  CHECK(std::abs(sf::std_normal_cdf(1.959963985) - 0.975) <= 1e-9);
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    CHECK(sf::std_normal_cdf(x) + sf::std_normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(sf::std_normal_cdf(x) - 0.5 * boost::math::erfc(-x / std::numbers::sqrt2)) <= 1e-15);
  }
}
