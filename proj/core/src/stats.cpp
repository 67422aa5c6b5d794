#include "orthomart/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "orthomart/errors.hpp"
#include "orthomart/numerics.hpp"

namespace orthomart::stats {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  CompensatedSum s;
  for (double v : x) s += v;
  return s.value() / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  CompensatedSum s;
  for (double v : x) s += (v - m) * (v - m);
  return s.value() / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double ks_statistic_normal(std::span<const double> samples, double sigma) {
  if (samples.empty()) throw DomainError("KS statistic of an empty sample");
  if (!(sigma > 0.0)) throw DomainError("KS reference needs sigma > 0");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const boost::math::normal_distribution<double> ref(0.0, sigma);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = boost::math::cdf(ref, s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_p_value(double statistic, std::size_t n) {
  if (n == 0) throw DomainError("Kolmogorov p-value needs n >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double chi_square_uniformity_p_value(std::span<const double> values, std::size_t bins) {
  if (bins < 2) throw DomainError("chi-square test needs at least two bins");
  if (values.empty()) throw DomainError("chi-square test of an empty sample");
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double expected = static_cast<double>(values.size()) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

}  // namespace orthomart::stats
