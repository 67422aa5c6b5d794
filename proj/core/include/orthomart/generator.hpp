#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orthomart/coefficient_field.hpp"

namespace orthomart {

/// A one-dimensional adapted series with positive coefficients whose support
/// is too spread out for integer indices: both the index and the value are
/// kept as base-2 logarithms. Index 0 is encoded as log2_index = -infinity.
struct LogScaledSeries {
  struct Term {
    double log2_index;
    double log2_value;
  };
  /// Strictly increasing in log2_index.
  std::vector<Term> terms;
};

enum class GeneratorKind {
  explicit_field,  ///< a fixed finite field, truncated to |i_q| <= N
  geometric,       ///< a_i = prod_q rate_q^{i_q} on [0, N]^d
  power,           ///< a_i = prod_q (i_q + 1)^{-exponent_q} on [0, N]^d
  dyadic_spikes,   ///< d = 1, a_{2^k} = 2^{-k}/k (k >= 1), a_1 = 1; cutoff N is the level count K
  harmonic_edge,   ///< d = 2, a_{0,j} = 1/j for 1 <= j <= N, zero elsewhere
};

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

/// A rule producing finite-support fields at an explicit cutoff. Materializing
/// at N < N' yields the restriction of the N' field to the smaller support.
class GeneratorRule {
 public:
  static GeneratorRule explicit_field(CoefficientField field);
  /// Requires 0 < rate < 1 on every axis.
  static GeneratorRule geometric(std::vector<double> rates);
  /// Requires exponent > 1/2 on every axis (square summability).
  static GeneratorRule power(std::vector<double> exponents);
  static GeneratorRule dyadic_spikes();
  static GeneratorRule harmonic_edge();

  GeneratorKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<double>& parameters() const noexcept { return parameters_; }

  /// The finite field at `cutoff`. Throws DomainError for a negative cutoff or
  /// when the support would not fit 64-bit indices.
  CoefficientField materialize(std::int64_t cutoff) const;

  /// Available for dyadic_spikes at any level count (including ones whose
  /// indices overflow 64 bits); nullopt for the other kinds.
  std::optional<LogScaledSeries> log_scaled(std::int64_t cutoff) const;

  /// Why sum_k sum_j a_{k,j}^2 is finite for the untruncated rule.
  std::string summability_certificate() const;
  /// What the cutoff parameter counts for this kind.
  std::string cutoff_meaning() const;

 private:
  GeneratorKind kind_ = GeneratorKind::explicit_field;
  std::size_t dimension_ = 0;
  std::vector<double> parameters_;
  CoefficientField field_;
};

}  // namespace orthomart
