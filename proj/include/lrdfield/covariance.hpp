#pragma once

#include <string>
#include <string_view>

namespace lrdfield {

enum class SlowlyVaryingKind { ConstantOne, LogOscillating };

enum class CovarianceKind { Cauchy, Bessel, SquaredExponential, PowerLawSV };

/// Isotropic correlation function B(r) with B(0) = 1.
///
///   Cauchy(alpha)          (1 + r^2)^(-alpha/2)
///   Bessel(nu)             2^nu Gamma(nu+1) J_nu(r) / r^nu,  0 <= nu < 1/2
///   SquaredExponential     exp(-r^2)
///   PowerLawSV(alpha, L)   min(1, (1 + r^2)^(-alpha/2) L(r))
///
/// PowerLawSV is an analytic model: it has the regularly varying tail
/// r^-alpha L(r) but is not guaranteed to be positive definite, so
/// simulating it may fail with EmbeddingNotPD.
class CovarianceModel {
 public:
  static CovarianceModel cauchy(double alpha);
  static CovarianceModel bessel(double nu);
  static CovarianceModel squared_exponential();
  static CovarianceModel powerlaw_sv(double alpha, SlowlyVaryingKind sv);

  /// Parses "kind=cauchy alpha=0.65", "kind=bessel nu=0",
  /// "kind=sqexp", "kind=powerlaw_sv alpha=0.5 sv=log_oscillating".
  /// Throws ConfigError on malformed input.
  static CovarianceModel parse(std::string_view text);

  CovarianceKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double nu() const noexcept { return nu_; }
  SlowlyVaryingKind sv_kind() const noexcept { return sv_; }

  /// Canonical text form; parse(to_string()) reproduces the model.
  std::string to_string() const;

  friend bool operator==(const CovarianceModel&, const CovarianceModel&) = default;

 private:
  CovarianceModel(CovarianceKind kind, double alpha, double nu, SlowlyVaryingKind sv)
      : kind_(kind), alpha_(alpha), nu_(nu), sv_(sv) {}

  CovarianceKind kind_;
  double alpha_ = 0.0;
  double nu_ = 0.0;
  SlowlyVaryingKind sv_ = SlowlyVaryingKind::ConstantOne;
};

/// Long-range parameters of a model written as r^-alpha L(r) at infinity.
struct LrdParams {
  double alpha;
  SlowlyVaryingKind sv_kind;
};

double evaluate(const CovarianceModel& model, double r);

/// L(r). LogOscillating is exp((log r)^(1/3) cos((log r)^(1/3))) for r > 1
/// and 1 on (0, 1].
double slowly_varying(SlowlyVaryingKind kind, double r);

/// Spectral constant Gamma((d-alpha)/2) / (2^alpha pi^(d/2) Gamma(alpha/2)).
double c2(int d, double alpha);

/// True when the model's parameters make B non-integrable over R^d.
bool lrd_flag(const CovarianceModel& model, int d);

/// (alpha, L) decomposition. Cauchy reports L == 1 (tail constant 1).
/// Bessel and squared-exponential models have none; DomainError.
LrdParams lrd_params(const CovarianceModel& model);

std::string to_string(SlowlyVaryingKind kind);

}  // namespace lrdfield
