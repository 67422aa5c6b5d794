#include "orthomart/generator.hpp"

#include <cmath>
#include <limits>

#include "orthomart/errors.hpp"

namespace orthomart {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::explicit_field: return "explicit";
    case GeneratorKind::geometric: return "geometric";
    case GeneratorKind::power: return "power";
    case GeneratorKind::dyadic_spikes: return "dyadic-spikes";
    case GeneratorKind::harmonic_edge: return "harmonic-edge";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "explicit") return GeneratorKind::explicit_field;
  if (name == "geometric") return GeneratorKind::geometric;
  if (name == "power") return GeneratorKind::power;
  if (name == "dyadic-spikes") return GeneratorKind::dyadic_spikes;
  if (name == "harmonic-edge") return GeneratorKind::harmonic_edge;
  throw DomainError("unknown generator kind '" + name + "'");
}

GeneratorRule GeneratorRule::explicit_field(CoefficientField field) {
  if (field.dimension() == 0) throw DomainError("explicit generator needs a field with a dimension");
  GeneratorRule rule;
  rule.kind_ = GeneratorKind::explicit_field;
  rule.dimension_ = field.dimension();
  rule.field_ = std::move(field);
  return rule;
}

GeneratorRule GeneratorRule::geometric(std::vector<double> rates) {
  if (rates.empty() || rates.size() > kMaxDimension) throw DimensionError("geometric generator: bad dimension");
  for (double r : rates) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("geometric generator requires 0 < rate < 1 on every axis");
  }
  GeneratorRule rule;
  rule.kind_ = GeneratorKind::geometric;
  rule.dimension_ = rates.size();
  rule.parameters_ = std::move(rates);
  return rule;
}

GeneratorRule GeneratorRule::power(std::vector<double> exponents) {
  if (exponents.empty() || exponents.size() > kMaxDimension) throw DimensionError("power generator: bad dimension");
  for (double a : exponents) {
    if (!(a > 0.5)) throw DomainError("power generator requires exponent > 1/2 on every axis");
  }
  GeneratorRule rule;
  rule.kind_ = GeneratorKind::power;
  rule.dimension_ = exponents.size();
  rule.parameters_ = std::move(exponents);
  return rule;
}

GeneratorRule GeneratorRule::dyadic_spikes() {
  GeneratorRule rule;
  rule.kind_ = GeneratorKind::dyadic_spikes;
  rule.dimension_ = 1;
  return rule;
}

GeneratorRule GeneratorRule::harmonic_edge() {
  GeneratorRule rule;
  rule.kind_ = GeneratorKind::harmonic_edge;
  rule.dimension_ = 2;
  return rule;
}

namespace {

// Fills the box [0, cutoff]^d with prod_q weight(q, i_q).
template <class Weight>
CoefficientField product_field(std::size_t d, std::int64_t cutoff, Weight weight) {
  CoefficientField field(d);
  Box box{MultiIndex::zero(d), MultiIndex::filled(d, cutoff)};
  const auto volume = box.volume();
  for (std::uint64_t off = 0; off < volume; ++off) {
    const auto site = box.site_at(off);
    double value = 1.0;
    for (std::size_t q = 0; q < d; ++q) value *= weight(q, site[q]);
    field.add(0, site, value);
  }
  return field;
}

}  // namespace

CoefficientField GeneratorRule::materialize(std::int64_t cutoff) const {
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  switch (kind_) {
    case GeneratorKind::explicit_field:
      return field_.truncated(cutoff);
    case GeneratorKind::geometric:
      return product_field(dimension_, cutoff, [&](std::size_t q, std::int64_t i) {
        return std::pow(parameters_[q], static_cast<double>(i));
      });
    case GeneratorKind::power:
      return product_field(dimension_, cutoff, [&](std::size_t q, std::int64_t i) {
        return std::pow(static_cast<double>(i + 1), -parameters_[q]);
      });
    case GeneratorKind::dyadic_spikes: {
      if (cutoff > 62) throw DomainError("dyadic-spikes indices overflow 64 bits beyond level 62; use log_scaled");
      CoefficientField field(1);
      field.add(0, MultiIndex{1}, 1.0);
      for (std::int64_t k = 1; k <= cutoff; ++k) {
        field.add(0, MultiIndex{std::int64_t{1} << k}, std::ldexp(1.0, static_cast<int>(-k)) / static_cast<double>(k));
      }
      return field;
    }
    case GeneratorKind::harmonic_edge: {
      CoefficientField field(2);
      for (std::int64_t j = 1; j <= cutoff; ++j) field.add(0, MultiIndex{0, j}, 1.0 / static_cast<double>(j));
      return field;
    }
  }
  throw DomainError("unknown generator kind");
}

std::optional<LogScaledSeries> GeneratorRule::log_scaled(std::int64_t cutoff) const {
  if (kind_ != GeneratorKind::dyadic_spikes) return std::nullopt;
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  LogScaledSeries series;
  series.terms.reserve(static_cast<std::size_t>(cutoff) + 1);
  series.terms.push_back({0.0, 0.0});
  for (std::int64_t k = 1; k <= cutoff; ++k) {
    const double kd = static_cast<double>(k);
    series.terms.push_back({kd, -kd - std::log2(kd)});
  }
  return series;
}

std::string GeneratorRule::summability_certificate() const {
  switch (kind_) {
    case GeneratorKind::explicit_field: return "finite support";
    case GeneratorKind::geometric: return "product of geometric series with rate < 1";
    case GeneratorKind::power: return "product of p-series with 2*exponent > 1";
    case GeneratorKind::dyadic_spikes: return "sum_k 4^-k / k^2 < infinity";
    case GeneratorKind::harmonic_edge: return "sum_j 1/j^2 = pi^2/6";
  }
  return {};
}

std::string GeneratorRule::cutoff_meaning() const {
  switch (kind_) {
    case GeneratorKind::explicit_field: return "entries with |i_q| <= N are kept";
    case GeneratorKind::geometric:
    case GeneratorKind::power: return "support is the box [0, N]^d";
    case GeneratorKind::dyadic_spikes: return "N is the number of dyadic levels K; support {2^k : 0 <= k <= K}";
    case GeneratorKind::harmonic_edge: return "support {(0, j) : 1 <= j <= N}";
  }
  return {};
}

}  // namespace orthomart
