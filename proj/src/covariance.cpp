#include "lrdfield/covariance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "lrdfield/errors.hpp"
#include "lrdfield/specialfuns.hpp"

namespace lrdfield {

namespace {

std::map<std::string, std::string> split_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
      throw ConfigError("covariance model: expected key=value, got '" + token + "'");
    }
    out[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return out;
}

double parse_number(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("covariance model: missing '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("covariance model: bad number for '" + key + "': " + it->second);
  }
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

CovarianceModel CovarianceModel::cauchy(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("Cauchy model needs alpha > 0");
  }
  return {CovarianceKind::Cauchy, alpha, 0.0, SlowlyVaryingKind::ConstantOne};
}

CovarianceModel CovarianceModel::bessel(double nu) {
  if (!(nu >= 0.0 && nu < 0.5)) throw DomainError("Bessel model needs 0 <= nu < 1/2");
  return {CovarianceKind::Bessel, 0.0, nu, SlowlyVaryingKind::ConstantOne};
}

CovarianceModel CovarianceModel::squared_exponential() {
  return {CovarianceKind::SquaredExponential, 0.0, 0.0, SlowlyVaryingKind::ConstantOne};
}

CovarianceModel CovarianceModel::powerlaw_sv(double alpha, SlowlyVaryingKind sv) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("power-law model needs alpha > 0");
  }
  return {CovarianceKind::PowerLawSV, alpha, 0.0, sv};
}

CovarianceModel CovarianceModel::parse(std::string_view text) {
  const auto kv = split_key_values(text);
  const auto kind = kv.find("kind");
  if (kind == kv.end()) throw ConfigError("covariance model: missing 'kind'");
  const std::string& k = kind->second;
  try {
    if (k == "cauchy") return cauchy(parse_number(kv, "alpha"));
    if (k == "bessel") return bessel(parse_number(kv, "nu"));
    if (k == "sqexp") return squared_exponential();
    if (k == "powerlaw_sv") {
      SlowlyVaryingKind sv = SlowlyVaryingKind::ConstantOne;
      if (auto it = kv.find("sv"); it != kv.end()) {
        if (it->second == "log_oscillating") sv = SlowlyVaryingKind::LogOscillating;
        else if (it->second != "one") throw ConfigError("unknown sv kind '" + it->second + "'");
      }
      return powerlaw_sv(parse_number(kv, "alpha"), sv);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("covariance model: ") + e.what());
  }
  throw ConfigError("covariance model: unknown kind '" + k + "'");
}

std::string CovarianceModel::to_string() const {
  switch (kind_) {
    case CovarianceKind::Cauchy:
      return "kind=cauchy alpha=" + format_double(alpha_);
    case CovarianceKind::Bessel:
      return "kind=bessel nu=" + format_double(nu_);
    case CovarianceKind::SquaredExponential:
      return "kind=sqexp";
    case CovarianceKind::PowerLawSV:
      return "kind=powerlaw_sv alpha=" + format_double(alpha_) +
             " sv=" + lrdfield::to_string(sv_);
  }
  return {};
}

std::string to_string(SlowlyVaryingKind kind) {
  return kind == SlowlyVaryingKind::ConstantOne ? "one" : "log_oscillating";
}

double slowly_varying(SlowlyVaryingKind kind, double r) {
  if (!(r > 0.0)) throw DomainError("slowly_varying: r must be positive");
  if (kind == SlowlyVaryingKind::ConstantOne || r <= 1.0) return 1.0;
  const double t = std::cbrt(std::log(r));
  return std::exp(t * std::cos(t));
}

double evaluate(const CovarianceModel& model, double r) {
  if (!(r >= 0.0)) throw DomainError("evaluate: distance must be >= 0");
  switch (model.kind()) {
    case CovarianceKind::Cauchy:
      return std::pow(1.0 + r * r, -0.5 * model.alpha());
    case CovarianceKind::Bessel: {
      if (r == 0.0) return 1.0;
      const double nu = model.nu();
      return std::pow(2.0, nu) * special::gamma(nu + 1.0) * special::bessel_j(nu, r) /
             std::pow(r, nu);
    }
    case CovarianceKind::SquaredExponential:
      return std::exp(-r * r);
    case CovarianceKind::PowerLawSV: {
      if (r == 0.0) return 1.0;
      const double v = std::pow(1.0 + r * r, -0.5 * model.alpha()) *
                       slowly_varying(model.sv_kind(), r);
      return std::min(1.0, v);
    }
  }
  return 0.0;
}

double c2(int d, double alpha) {
  if (d < 1 || !(alpha > 0.0 && alpha < d)) {
    throw DomainError("c2: need d >= 1 and 0 < alpha < d");
  }
  return special::gamma(0.5 * (d - alpha)) /
         (std::pow(2.0, alpha) * std::pow(std::numbers::pi, 0.5 * d) *
          special::gamma(0.5 * alpha));
}

bool lrd_flag(const CovarianceModel& model, int d) {
  switch (model.kind()) {
    case CovarianceKind::Cauchy:
    case CovarianceKind::PowerLawSV:
      return model.alpha() > 0.0 && model.alpha() < d;
    case CovarianceKind::Bessel:
      // |J_nu(r)/r^nu| ~ r^-(nu + 1/2) is not integrable over R^2 for nu < 1/2.
      return d == 2;
    case CovarianceKind::SquaredExponential:
      return false;
  }
  return false;
}

LrdParams lrd_params(const CovarianceModel& model) {
  switch (model.kind()) {
    case CovarianceKind::Cauchy:
      return {model.alpha(), SlowlyVaryingKind::ConstantOne};
    case CovarianceKind::PowerLawSV:
      return {model.alpha(), model.sv_kind()};
    default:
      throw DomainError("model '" + model.to_string() +
                        "' has no power-law times slowly-varying form");
  }
}

}  // namespace lrdfield
