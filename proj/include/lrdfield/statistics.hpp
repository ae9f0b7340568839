#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace lrdfield {

struct KsResult {
  double statistic = 0.0;
  /// Asymptotic Kolmogorov-series p-value, descriptive only.
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov on ascending samples. DomainError if either
/// is empty or unsorted.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// c(alpha) sqrt((n + m) / (n m)), c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.05);

/// Empirical quantile of an ascending sample at probability p, by linear
/// interpolation between order statistics placed at (i - 0.5) / N.
double sample_quantile(std::span<const double> sorted, double p);

/// Matched quantiles at (i - 0.5) / N, N = min(|x|, |y|).
std::vector<std::pair<double, double>> qq_data(std::span<const double> x,
                                               std::span<const double> y);

struct NormalQQ {
  std::vector<std::pair<double, double>> points;  // (theoretical z, standardized quantile)
  bool zero_variance = false;
};

/// Standard-normal quantiles against standardized order statistics. A
/// constant sample gives all sample quantiles 0, sets zero_variance and
/// logs a warning.
NormalQQ normal_qq_data(std::span<const double> x);

double normal_quantile(double p);

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double pearson_correlation(std::span<const double> x, std::span<const double> y);
/// (x - mean) / sd, ascending order preserved.
std::vector<double> standardize(std::span<const double> x);

struct JackknifeEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Delete-one jackknife over n paired observations; `stat` receives the
/// indices kept.
JackknifeEstimate jackknife(std::size_t n,
                            const std::function<double(std::span<const std::size_t>)>& stat);

}  // namespace lrdfield
