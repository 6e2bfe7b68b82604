#include "lqgv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqgv::stats {

namespace {
constexpr double kZ975 = 1.959963984540054;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

Interval mean_ci(std::span<const double> x) {
  const double m = mean(x);
  const double se = standard_error(x);
  return {m, m - kZ975 * se, m + kZ975 * se};
}

Interval median_ci(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  const double half = kZ975 * std::sqrt(n) / 2.0;
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(n / 2.0 - half)));
  const auto hi = static_cast<std::size_t>(std::min(n - 1.0, std::ceil(n / 2.0 + half)));
  return {quantile(x, 0.5), x[lo], x[hi]};
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_uniform(std::vector<double> x, double lo, double hi) {
  return ks_statistic(std::move(x), [lo, hi](double v) { return std::clamp((v - lo) / (hi - lo), 0.0, 1.0); });
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

AndersonDarling anderson_darling_normal(std::vector<double> x) {
  if (x.size() < 8) throw std::invalid_argument("Anderson-Darling needs at least 8 samples");
  const double m = mean(x);
  const double sd = std::sqrt(variance(x));
  if (!(sd > 0.0)) throw std::invalid_argument("Anderson-Darling: zero variance");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const auto nd = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = (x[i] - m) / sd;
    const double zr = (x[n - 1 - i] - m) / sd;
    // log Phi(zi) + log(1 - Phi(zr)), via erfc for accuracy in the tails.
    const double log_f = std::log(0.5 * std::erfc(-zi / std::sqrt(2.0)));
    const double log_g = std::log(0.5 * std::erfc(zr / std::sqrt(2.0)));
    s += (2.0 * static_cast<double>(i) + 1.0) * (log_f + log_g);
  }
  AndersonDarling out;
  out.statistic = -nd - s / nd;
  const double a = out.statistic * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
  out.adjusted = a;
  // D'Agostino & Stephens piecewise approximation of the p-value.
  if (a >= 0.6) {
    out.p_value = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    out.p_value = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a >= 0.2) {
    out.p_value = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    out.p_value = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  out.p_value = std::clamp(out.p_value, 0.0, 1.0);
  return out;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      rss += e * e;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return f;
}

}  // namespace lqgv::stats
