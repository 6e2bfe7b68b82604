#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lqgv::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);

/// Quantile with linear interpolation between order statistics (type 7).
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

struct Interval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Mean with a normal-approximation 95% interval.
Interval mean_ci(std::span<const double> x);

/// Sample median with a distribution-free 95% interval from order statistics.
Interval median_ci(std::vector<double> x);

/// sup |F_n - F| for the given continuous cdf.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf);
/// Against the uniform law on [lo, hi).
double ks_uniform(std::vector<double> x, double lo, double hi);

struct AndersonDarling {
  double statistic = 0.0;   // A^2 with estimated mean and variance
  double adjusted = 0.0;    // A^2 (1 + 0.75/n + 2.25/n^2)
  double p_value = 1.0;
};
/// Composite normality test (mean and variance estimated).
AndersonDarling anderson_darling_normal(std::vector<double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double normal_cdf(double z);

}  // namespace lqgv::stats
