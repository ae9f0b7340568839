#include "lrdfield/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "lrdfield/errors.hpp"
#include "lrdfield/log.hpp"

namespace lrdfield {

namespace {

void require_sorted(std::span<const double> x, const char* name) {
  if (x.empty()) throw DomainError(std::string(name) + ": empty sample");
  if (!std::is_sorted(x.begin(), x.end())) {
    throw DomainError(std::string(name) + ": sample must be sorted ascending");
  }
}

}  // namespace

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * sum) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  require_sorted(x, "ks_two_sample");
  require_sorted(y, "ks_two_sample");
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  KsResult res;
  res.statistic = d;
  const double ne = std::sqrt(nx * ny / (nx + ny));
  res.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  return res;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("ks_critical_value: bad arguments");
  }
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return c * std::sqrt((nd + md) / (nd * md));
}

double sample_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("sample_quantile: empty sample");
  const double h = p * static_cast<double>(sorted.size()) - 0.5;
  if (h <= 0.0) return sorted.front();
  const double last = static_cast<double>(sorted.size() - 1);
  if (h >= last) return sorted.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double w = h - static_cast<double>(lo);
  return w == 0.0 ? sorted[lo] : sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::pair<double, double>> qq_data(std::span<const double> x,
                                               std::span<const double> y) {
  require_sorted(x, "qq_data");
  require_sorted(y, "qq_data");
  const std::size_t n = std::min(x.size(), y.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  // p_i = (i - 1/2)/n, so h = p_i N - 1/2 = ((2i - 1) N - n) / (2n); kept in
  // integers so that order statistics of the shorter sample come out exactly.
  auto at = [n](std::span<const double> s, std::size_t i) {
    const auto num = static_cast<std::int64_t>((2 * i - 1) * s.size()) - static_cast<std::int64_t>(n);
    const auto den = static_cast<std::int64_t>(2 * n);
    if (num <= 0) return s.front();
    const auto lo = static_cast<std::size_t>(num / den);
    if (lo >= s.size() - 1) return s.back();
    const std::int64_t rem = num % den;
    if (rem == 0) return s[lo];
    const double w = static_cast<double>(rem) / static_cast<double>(den);
    return s[lo] + w * (s[lo + 1] - s[lo]);
  };
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back(at(x, i), at(y, i));
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

NormalQQ normal_qq_data(std::span<const double> x) {
  require_sorted(x, "normal_qq_data");
  NormalQQ out;
  const double mu = mean(x);
  const double sd = x.size() > 1 ? std::sqrt(variance(x)) : 0.0;
  out.zero_variance = !(sd > 0.0);
  if (out.zero_variance) log_warning("normal_qq_data: zero-variance sample, quantiles set to 0");
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = normal_quantile((static_cast<double>(i) + 0.5) / n);
    out.points.emplace_back(z, out.zero_variance ? 0.0 : (x[i] - mu) / sd);
  }
  return out;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance: need at least two values");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("pearson_correlation: need two samples of equal length >= 2");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> standardize(std::span<const double> x) {
  const double mu = mean(x);
  const double sd = std::sqrt(variance(x));
  if (!(sd > 0.0)) throw DomainError("standardize: zero-variance sample");
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return (v - mu) / sd; });
  return out;
}

JackknifeEstimate jackknife(std::size_t n,
                            const std::function<double(std::span<const std::size_t>)>& stat) {
  if (n < 3) throw DomainError("jackknife: need at least three observations");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  JackknifeEstimate est;
  est.value = stat(all);
  std::vector<std::size_t> kept(n - 1);
  std::vector<double> partial(n);
  for (std::size_t drop = 0; drop < n; ++drop) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != drop) kept[w++] = i;
    }
    partial[drop] = stat(kept);
  }
  const double pm = mean(partial);
  double ss = 0.0;
  for (double v : partial) ss += (v - pm) * (v - pm);
  est.std_error = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
  return est;
}

}  // namespace lrdfield
