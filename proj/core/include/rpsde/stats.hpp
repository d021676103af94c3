#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rpsde {

/// Monte-Carlo point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

double mean(std::span<const double> xs);

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than two values.
double sample_variance(std::span<const double> xs);

/// Mean with standard error sd / sqrt(n).
Estimate mean_estimate(std::span<const double> xs);

/// Sample variance with the normal-theory standard error
/// s^2 * sqrt(2 / (n - 1)).
Estimate variance_estimate(std::span<const double> xs);

/// Mean of a serially correlated series with a batch-means standard error
/// (floor(sqrt(n)) batches of equal length; the remainder goes to the mean
/// but not to the batches).
Estimate batch_means(std::span<const double> xs);

double normal_cdf(double x);
double normal_quantile(double p);

/// Kolmogorov-Smirnov statistic of a sample against N(mu, sigma^2).
double ks_statistic_normal(std::span<const double> xs, double mu, double sigma);

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Residual-based standard error of the slope; 0 with two points.
  double slope_se = 0.0;
  std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with known per-point standard deviations of y;
/// `slope_se` is the propagated (not residual-based) standard error.
LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> y_sd);

/// Type-7 (linear interpolation) sample quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double p);

}  // namespace rpsde
