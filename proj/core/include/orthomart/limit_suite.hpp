#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orthomart/coefficient_field.hpp"
#include "orthomart/decomposition.hpp"
#include "orthomart/fieldsim.hpp"
#include "orthomart/numerics.hpp"

namespace orthomart {

inline constexpr std::size_t kMinVerdictReplications = 500;

struct WipReport {
  MultiIndex n;
  std::size_t replications = 0;
  double empirical_variance = 0.0;  ///< of S_n / |n|^{1/2}
  double predicted_variance = 0.0;  ///< sum_k (sum_j a_{k,j})^2
  double variance_ratio = 0.0;      ///< empirical / predicted, 0 when degenerate
  std::optional<double> ks_statistic;
  std::optional<double> ks_p_value;
  bool degenerate = false;          ///< predicted variance is zero; KS skipped
  bool sufficient = false;          ///< replications >= kMinVerdictReplications
  std::string notice;
};

WipReport wip_experiment(const CoefficientField& field, InnovationLaw law, const MultiIndex& n,
                         std::size_t replications, std::uint64_t seed, unsigned workers = 1);

/// An empirical quantity compared against a closed-form bound.
struct BoundReport {
  std::string quantity;
  double order = 0.0;  ///< moment order p or Orlicz exponent q
  MultiIndex n;
  double x = 0.0;      ///< level, for tail bounds
  double empirical = 0.0;
  double standard_error = 0.0;
  std::optional<double> exact;
  double bound = 0.0;
  double margin_ratio = 0.0;  ///< empirical / bound
  bool holds = false;
  std::string provenance;
};

/// E|sum_t c_t e_t|^p for independent innovations and even integer p, by
/// binomial convolution of the innovation moments.
double exact_even_moment(std::span<const double> coefficients, InnovationLaw law, int p);
/// E|e|^r of one innovation for even r.
double innovation_even_moment(InnovationLaw law, int r);

/// ||Y||_p^p for Y = sum_k sum_j c_{k,j} e_k(-j): exact for even integer p,
/// otherwise a Monte Carlo mean over `draws` draws with its standard error.
struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  bool exact = false;
};
MomentEstimate field_moment(const CoefficientField& field, InnovationLaw law, double p, std::uint64_t seed,
                            std::size_t draws = 100000);

/// The weights w_{k,s} = sum_j a_{k,j} 1{1 <= s + j <= n}, so that S_n = sum w_{k,s} e_k(s).
std::vector<double> partial_sum_weights(const CoefficientField& field, const MultiIndex& n);

/// Empirical E|S_n|^p against (2p)^{dp/2} |n|^{p/2} ||X||_p^p for a field
/// supported at the origin (an orthomartingale difference). Requires p >= 2.
BoundReport moment_inequality(const CoefficientField& field, InnovationLaw law, const MultiIndex& n, double p,
                              std::size_t replications, std::uint64_t seed, unsigned workers = 1);

struct TailBoundReports {
  BoundReport norm;  ///< ||S_n||_p <= 2^{2d} p^{d/2} |n|^{1/2} sum_S ||g_S||_p
  BoundReport tail;  ///< P(S_n > x|n|) <= 2^{2dp} p^{dp/2} (sum_S ||g_S||_p)^p x^{-p} |n|^{-p/2}
  double g_norm_sum = 0.0;
};

/// ||g_S||_p is inflated by two standard errors when estimated by Monte Carlo.
TailBoundReports tail_bound_check(const CoefficientField& field, const Decomposition& dec, InnovationLaw law,
                                  const MultiIndex& n, double x, double p, std::size_t replications,
                                  std::uint64_t seed, unsigned workers = 1);

/// psi(x) = exp((x + h)^alpha) - exp(h^alpha), h = ((1 - alpha)/alpha)^{1/alpha} for alpha < 1, else 0.
struct YoungFunction {
  double alpha = 1.0;
  double h = 0.0;

  static YoungFunction with_exponent(double alpha);
  double operator()(double x) const;
  /// log(psi(x) + exp(h^alpha)) = (x + h)^alpha
  double log_shifted(double x) const { return std::pow(x + h, alpha); }
  /// Closed-form inverse on [0, infinity).
  double inverse(double y) const;
};

struct OrliczParams {
  double q = 2.0 / 3.0;
  std::size_t dimension = 1;
  double beta = 0.0;  ///< 2q / (2 - dq)

  /// Requires 0 < q < 2/d.
  static OrliczParams make(double q, std::size_t dimension);
  YoungFunction psi_q() const { return YoungFunction::with_exponent(q); }
  YoungFunction psi_beta() const { return YoungFunction::with_exponent(beta); }
};

/// inf{c > 0 : mean psi(|Z_i| / c) <= 1} by bisection to relative tolerance
/// `tolerance`; 0 for an all-zero sample.
double luxemburg_norm(std::span<const double> samples, const YoungFunction& psi, double tolerance = 1e-10);

/// P(S > x) for S = sum_t w_t e_t by exponential tilting. Returns the log of
/// the estimate and the relative standard error.
struct TailEstimate {
  double x = 0.0;
  double log_probability = 0.0;  ///< -infinity when no tilted draw exceeds x
  double relative_error = 0.0;
  double tilt = 0.0;
};
TailEstimate tilted_tail(std::span<const double> weights, InnovationLaw law, double x, std::size_t replications,
                         std::uint64_t seed, unsigned workers = 1);

struct OrliczTailPoint {
  double x = 0.0;
  TailEstimate estimate;
  double bound_at_unit_constant = 0.0;  ///< the tail bound with C = 1
  double minimal_constant = 0.0;        ///< smallest C for which the bound covers the estimate
};

struct OrliczReport {
  OrliczParams params;
  MultiIndex n;
  std::vector<double> g_norms;  ///< Luxemburg norms in psi_beta, one per nonempty part
  double g_norm_sum = 0.0;
  std::vector<OrliczTailPoint> points;
  double calibrated_constant = 0.0;  ///< max of the minimal constants
  std::string provenance;
};

/// Compares tilted tail estimates of S_n at each level with
/// (1 + e^{h^q}) exp(-(x / (C |n|^{1/2} G) + h)^q), G = sum_S ||g_S||_{psi_beta}.
/// Luxemburg norms use `draws` simulated values of g_S at the origin.
OrliczReport orlicz_tail_bound(const CoefficientField& field, const Decomposition& dec, InnovationLaw law,
                               const OrliczParams& params, const MultiIndex& n, std::span<const double> levels,
                               std::size_t replications, std::uint64_t seed, unsigned workers = 1,
                               std::size_t draws = 20000);

/// Tail decay at x = |n| over a list of sizes (d = 1 block lengths or cube sides).
struct DecayReport {
  double q = 0.0;
  std::vector<std::int64_t> sizes;
  std::vector<TailEstimate> estimates;
  LinearFit fit;               ///< log(-log P) against log |n|
  double required_slope = 0.0; ///< q / 4: the bound's rate |n|^{q/2} with factor-2 slack
  bool consistent = false;
  bool vacuous = false;        ///< every estimate is exactly zero (x = |n| beyond the law's reach)
};
DecayReport orlicz_decay(const CoefficientField& field, InnovationLaw law, double q, std::span<const std::int64_t> sizes,
                         std::size_t replications, std::uint64_t seed, unsigned workers = 1);

}  // namespace orthomart
