#pragma once

#include <cstddef>
#include <span>

namespace orthomart::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two points.
double variance(std::span<const double> x);
/// Standard error of the mean.
double standard_error(std::span<const double> x);

/// sup_t |F_n(t) - Phi(t / sigma)|.
double ks_statistic_normal(std::span<const double> samples, double sigma);
/// Asymptotic Kolmogorov tail P(K > sqrt(n) D), with the usual small-sample
/// correction (sqrt(n) + 0.12 + 0.11 / sqrt(n)).
double kolmogorov_p_value(double statistic, std::size_t n);

/// Pearson chi-square test of uniformity on [0, 1] with equal-width bins.
double chi_square_uniformity_p_value(std::span<const double> values, std::size_t bins);

/// log(sum exp(x_i)); -infinity for an empty span.
double log_sum_exp(std::span<const double> x);

}  // namespace orthomart::stats
