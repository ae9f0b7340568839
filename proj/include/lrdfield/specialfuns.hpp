#pragma once

// Special-function kernel used by the covariance models, the
// Fisher-Snedecor marginals and the normalisation constants.
// Every routine is a pure function and may be called concurrently.

namespace lrdfield::special {

/// Highest Hermite degree accepted; above this the three-term recurrence in
/// double precision no longer carries enough digits to be useful.
inline constexpr int kMaxHermiteDegree = 60;

/// Gamma function for x > 0 (Lanczos, relative error ~1e-15).
double gamma(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Regularized incomplete beta I_mu(p, q) for 0 < mu <= 1, p, q > 0.
///
/// Continued fraction (modified Lentz) evaluated on whichever side of
/// mu = (p + 1) / (p + q + 2) converges fast, using
/// I_mu(p, q) = 1 - I_{1-mu}(q, p) on the other side.
double incomplete_beta(double mu, double p, double q);

/// Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0.
///
/// Power series below x = 12, Schlaefli's integral representation with
/// panelled Gauss-Legendre in the mid range, Hankel's asymptotic
/// expansion once x >= max(60, 2 nu^2). Absolute error stays below 1e-10
/// up to x = 1e4 (checked in the tests against an independent library).
double bessel_j(double nu, double x);

/// Probabilists' Hermite polynomial He_k(x): He_0 = 1, He_1 = x,
/// He_{k+1} = x He_k - k He_{k-1}. Throws DomainError for k < 0 or
/// k > kMaxHermiteDegree.
double hermite(int k, double x);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// k! as a double (exact for k <= 22).
double factorial(int k);

}  // namespace lrdfield::special
