#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orthomart/coefficient_field.hpp"
#include "orthomart/generator.hpp"
#include "orthomart/numerics.hpp"

namespace orthomart {

enum class ConditionId {
  heyde_orthant,              ///< two-sided orthant tail squares, general regular fields
  heyde_adapted,              ///< the same sum specialized to adapted fields
  gordin_norm,                ///< sum_j ||E(U_j f | F_0)||_2 for adapted f
  weighted_projection,        ///< sum_i (prod_q ibar_q^2) ||P_i f||_2^2
  conditional_series,         ///< sum_{0<=i<=N} E(U_i f | F_0)
  conditional_series_shifted, ///< sum_{0<=i<=N} E(U_i f | F_{-1})
  hannan,                     ///< sum_i ||P_i f||_2
};

/// Stable report identifiers (HEYDE_4B, GORDIN_9, ...).
std::string to_string(ConditionId id);

enum class Verdict { converged, diverging, inconclusive };
std::string to_string(Verdict verdict);

/// Evidence behind a verdict.
struct GrowthDiagnostics {
  LinearFit power;      ///< log partial vs log cutoff
  LinearFit log_power;  ///< log partial vs log log cutoff
  LinearFit increments; ///< log increment vs log log cutoff
  double last_relative_change = 0.0;
};

struct VerdictOptions {
  double relative_tolerance = 1e-6;
  double min_r_squared = 0.9;
  /// Increments between ladder rungs decaying like (log N)^s with s above this
  /// are treated as non-summable.
  double increment_exponent_threshold = -0.75;
};

/// "converged" when the last two partials differ by less than the relative
/// tolerance (or `last_change` when given, for Cauchy-style checks);
/// "diverging" when a growth model fits with positive slope and R^2 above the
/// threshold and the rung-to-rung increments do not decay summably;
/// "inconclusive" otherwise.
Verdict classify(std::span<const std::int64_t> cutoffs, std::span<const double> partials,
                 std::optional<double> last_change = std::nullopt, GrowthDiagnostics* diagnostics = nullptr,
                 const VerdictOptions& options = {});

struct ConditionReport {
  ConditionId id = ConditionId::heyde_orthant;
  std::vector<std::int64_t> cutoffs;
  std::vector<double> partials;
  Verdict verdict = Verdict::inconclusive;
  GrowthDiagnostics diagnostics;
  /// Per-subset contribution at the last cutoff (Heyde reports only).
  std::map<SubsetMask, double> by_subset;
  /// A second sequence evaluated on the same ladder: the subset-pair form for
  /// Heyde reports, squared Cauchy increments for the conditional series.
  std::vector<double> companion;
  std::string companion_label;
};

/// Both finite-support forms of the Heyde-type condition.
struct HeydeTotals {
  /// sum over S of sum_{j_S >= 0, j_{S^c} <= -1} (orthant tail)^2, summed over channels.
  double orthant_form = 0.0;
  std::map<SubsetMask, double> orthant_by_subset;
  /// sum over S and S' subset S^c of the marginalized (S) / upper (S', j >= 1) /
  /// lower (rest, j <= -1) tail squares. Per S this equals ||g_S||^2.
  double pair_form = 0.0;
  std::map<SubsetMask, double> pair_by_subset;
};

HeydeTotals heyde_totals(const CoefficientField& field);
/// Requires an adapted field (DomainError otherwise).
double gordin_total(const CoefficientField& field);
double weighted_projection_total(const CoefficientField& field);
double hannan_total(const CoefficientField& field);

/// Which sigma-field the partial sums of conditional expectations condition on.
enum class Conditioning { present, strict_past };

/// Coefficients of sum_{0 <= i <= N} E(U_i f | F), where F = F_0 keeps indices
/// l >= 0 and F = F_{-1} keeps l >= 1 on every axis. Requires an adapted field.
CoefficientField conditional_series(const CoefficientField& field, Conditioning conditioning, std::int64_t cutoff);

/// The same totals for a log-scaled adapted series (d = 1).
struct LogScaledTotals {
  double heyde_orthant = 0.0;
  double heyde_pair = 0.0;
  double gordin = 0.0;
  double weighted_projection = 0.0;
  double hannan = 0.0;
};
LogScaledTotals log_scaled_totals(const LogScaledSeries& series);

ConditionReport heyde_condition(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs);
ConditionReport gordin_norm_series(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs);
ConditionReport weighted_projection_sum(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs);
ConditionReport conditional_series_report(const GeneratorRule& rule, Conditioning conditioning,
                                          std::span<const std::int64_t> cutoffs);
ConditionReport hannan_sum(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs);

/// Tail-sum square inequality on the positive orthant:
/// lhs = sum_{j >= 1} (sum_{i >= j} a_i)^2, rhs = sum_{i >= 1} prod_q i_q^2 a_i^2.
struct TailSquareCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  ///< lhs / rhs, and 0 when both vanish
};
/// Requires nonnegative weights supported in {i >= 1}.
TailSquareCheck tail_square_check(const CoefficientField& weights);

/// The inequality chain tying the Gordin-type sum to the weighted sum in d = 1.
struct GordinChainReport {
  double weighted_tail = 0.0;      ///< sum_k (k+1) b_k^2
  double weighted_squares = 0.0;   ///< sum_i (i+1)^2 a_i^2
  bool weighted_holds = false;     ///< weighted_tail >= weighted_squares / 2
  double cauchy_schwarz_lhs = 0.0; ///< sum_k (k+1) b_k^2
  double cauchy_schwarz_rhs = 0.0; ///< sqrt(sum (k+1)^2 b_k^3) sqrt(sum b_k)
  bool cauchy_schwarz_holds = false;
  double max_scaled_tail = 0.0;    ///< max_{n>=1} n b_n
  double tail_bound = 0.0;         ///< 4 sum_{k>=1} b_k
  bool scaled_tail_holds = false;
  bool all_hold() const { return weighted_holds && cauchy_schwarz_holds && scaled_tail_holds; }
};
/// b_k = sqrt(sum_{i >= k} a_i^2).
std::vector<double> tail_roots(std::span<const double> a);
/// Requires b nonnegative and nonincreasing with b_k^2 = sum_{i>=k} a_i^2
/// (relative tolerance 1e-9); DomainError otherwise.
GordinChainReport gordin_chain_inequalities(std::span<const double> b, std::span<const double> a);

}  // namespace orthomart
