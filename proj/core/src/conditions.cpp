#include "orthomart/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "orthomart/errors.hpp"
#include "orthomart/orthant_table.hpp"

namespace orthomart {

std::string to_string(ConditionId id) {
  switch (id) {
    case ConditionId::heyde_orthant: return "HEYDE_4B";
    case ConditionId::heyde_adapted: return "HEYDE_4E";
    case ConditionId::gordin_norm: return "GORDIN_9";
    case ConditionId::weighted_projection: return "VOLNY_10";
    case ConditionId::conditional_series: return "SERIES_3B";
    case ConditionId::conditional_series_shifted: return "SERIES_3B_SHIFTED";
    case ConditionId::hannan: return "HANNAN";
  }
  return "UNKNOWN";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::converged: return "converged";
    case Verdict::diverging: return "diverging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict classify(std::span<const std::int64_t> cutoffs, std::span<const double> partials,
                 std::optional<double> last_change, GrowthDiagnostics* diagnostics, const VerdictOptions& options) {
  if (cutoffs.size() != partials.size()) throw DimensionError("classify: cutoffs and partials differ in length");
  GrowthDiagnostics local;
  GrowthDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = {};
  const std::size_t n = partials.size();
  if (n == 0) return Verdict::inconclusive;
  for (double p : partials) {
    if (!std::isfinite(p)) return Verdict::diverging;
  }
  if (n == 1) return partials[0] == 0.0 ? Verdict::converged : Verdict::inconclusive;

  const double last = partials[n - 1];
  const double prev = partials[n - 2];
  const double change = last_change ? *last_change : std::abs(last - prev);
  const double scale = std::max(std::abs(last), std::abs(prev));
  diag.last_relative_change = scale == 0.0 ? 0.0 : change / scale;
  if (change <= options.relative_tolerance * scale) return Verdict::converged;

  std::vector<double> lc, llc, lp;
  for (std::size_t t = 0; t < n; ++t) {
    if (cutoffs[t] < 2 || !(partials[t] > 0.0)) continue;
    const double c = static_cast<double>(cutoffs[t]);
    lc.push_back(std::log(c));
    llc.push_back(std::log(std::log(c)));
    lp.push_back(std::log(partials[t]));
  }
  if (lp.size() < 3) return Verdict::inconclusive;
  diag.power = fit_line(lc, lp);
  diag.log_power = fit_line(llc, lp);
  const LinearFit& best = diag.power.r_squared >= diag.log_power.r_squared ? diag.power : diag.log_power;
  const bool grows = best.slope > 0.0 && best.r_squared > options.min_r_squared;

  std::vector<double> ix, iy;
  for (std::size_t t = 1; t < n; ++t) {
    const double delta = partials[t] - partials[t - 1];
    if (cutoffs[t] < 2 || !(delta > 0.0)) continue;
    ix.push_back(std::log(std::log(static_cast<double>(cutoffs[t]))));
    iy.push_back(std::log(delta));
  }
  if (ix.size() < 2) return Verdict::inconclusive;
  diag.increments = fit_line(ix, iy);
  const bool unsummable = diag.increments.slope > options.increment_exponent_threshold;
  return grows && unsummable ? Verdict::diverging : Verdict::inconclusive;
}

HeydeTotals heyde_totals(const CoefficientField& field) {
  const std::size_t d = field.dimension();
  HeydeTotals totals;
  auto squares = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  };
  std::vector<AxisMode> modes(d);
  std::vector<IndexRange> ranges(d);
  for (const auto& s : SubsetMask::all(d)) {
    for (std::size_t q = 0; q < d; ++q) {
      modes[q] = s.contains(q) ? AxisMode::at_least : AxisMode::at_most;
      ranges[q] = s.contains(q) ? IndexRange::from(0) : IndexRange::up_to(-1);
    }
    const OrthantTable table(field, modes);
    const double v = table.accumulate(ranges, squares);
    totals.orthant_by_subset[s] = v;
    totals.orthant_form += v;

    double pair = 0.0;
    for (const auto& upper : s.complement().subsets()) {
      for (std::size_t q = 0; q < d; ++q) {
        if (s.contains(q)) {
          modes[q] = AxisMode::marginal;
          ranges[q] = IndexRange::everything();
        } else if (upper.contains(q)) {
          modes[q] = AxisMode::at_least;
          ranges[q] = IndexRange::from(1);
        } else {
          modes[q] = AxisMode::at_most;
          ranges[q] = IndexRange::up_to(-1);
        }
      }
      const OrthantTable marg(field, modes);
      pair += marg.accumulate(ranges, squares);
    }
    totals.pair_by_subset[s] = pair;
    totals.pair_form += pair;
  }
  return totals;
}

double gordin_total(const CoefficientField& field) {
  if (!field.adapted()) throw DomainError("Gordin-type sum needs an adapted field");
  const std::size_t d = field.dimension();
  const std::vector<AxisMode> modes(d, AxisMode::at_least);
  const std::vector<IndexRange> ranges(d, IndexRange::from(0));
  const OrthantTable table(field, modes, TableValues::pooled_squares);
  return table.accumulate(ranges, [](std::span<const double> v) { return std::sqrt(std::max(v[0], 0.0)); });
}

double weighted_projection_total(const CoefficientField& field) {
  CompensatedSum total;
  for (const auto& ch : field.channels()) {
    for (const auto& [i, a] : ch) {
      double w = a * a;
      for (std::size_t q = 0; q < i.dimension(); ++q) {
        const double bar = i[q] <= -1 ? static_cast<double>(i[q]) : static_cast<double>(i[q]) + 1.0;
        w *= bar * bar;
      }
      total += w;
    }
  }
  return total.value();
}

double hannan_total(const CoefficientField& field) {
  std::map<MultiIndex, double> pooled;
  for (const auto& ch : field.channels()) {
    for (const auto& [i, a] : ch) pooled[i] += a * a;
  }
  CompensatedSum total;
  for (const auto& [i, s] : pooled) total += std::sqrt(s);
  return total.value();
}

CoefficientField conditional_series(const CoefficientField& field, Conditioning conditioning, std::int64_t cutoff) {
  if (cutoff < 0) throw DomainError("conditional series cutoff must be nonnegative");
  if (!field.adapted()) throw DomainError("conditional series needs an adapted field");
  const std::int64_t lower = conditioning == Conditioning::present ? 0 : 1;
  const std::size_t d = field.dimension();
  CoefficientField current = field;
  // The window sum factorizes over axes: apply the 1-D map
  // c'_l = sum_{l <= m <= l + N} c_m (for l >= lower) one axis at a time.
  for (std::size_t q = 0; q < d; ++q) {
    CoefficientField next(d, current.channel_count());
    for (std::size_t k = 0; k < current.channel_count(); ++k) {
      std::map<MultiIndex, std::vector<std::pair<std::int64_t, double>>> lines;
      for (const auto& [i, a] : current.channel(k)) {
        MultiIndex key = i;
        key[q] = 0;
        lines[key].emplace_back(i[q], a);
      }
      for (auto& [key, entries] : lines) {
        std::sort(entries.begin(), entries.end());
        std::vector<double> prefix(entries.size() + 1, 0.0);
        for (std::size_t t = 0; t < entries.size(); ++t) prefix[t + 1] = prefix[t] + entries[t].second;
        const std::int64_t first = std::max(lower, entries.front().first - cutoff);
        const std::int64_t last = entries.back().first;
        std::size_t lo = 0, hi = 0;  // window [lo, hi) of entries with coord in [l, l + N]
        for (std::int64_t l = first; l <= last; ++l) {
          while (lo < entries.size() && entries[lo].first < l) ++lo;
          while (hi < entries.size() && entries[hi].first <= l + cutoff) ++hi;
          if (hi <= lo) continue;
          const double v = prefix[hi] - prefix[lo];
          if (v == 0.0) continue;
          MultiIndex at = key;
          at[q] = l;
          next.add(k, at, v);
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log2(2^x + 1)
double log2_plus_one(double x) {
  if (x == kNegInf) return 0.0;
  return x > 0.0 ? x + std::log1p(std::exp2(-x)) / std::log(2.0) : std::log1p(std::exp2(x)) / std::log(2.0);
}

// log2 of the number of integers j with first <= j <= index_t and j > index_{t-1}.
std::vector<double> log2_counts(const LogScaledSeries& s, int first) {
  std::vector<double> out(s.terms.size());
  for (std::size_t t = 0; t < s.terms.size(); ++t) {
    const double cur = s.terms[t].log2_index;
    if (t == 0) {
      // index_0 + 1 points when first = 0, index_0 points when first = 1
      out[t] = first == 0 ? log2_plus_one(cur) : (cur == kNegInf ? kNegInf : cur);
    } else {
      const double delta = s.terms[t - 1].log2_index - cur;
      out[t] = cur + std::log1p(-std::exp2(delta)) / std::log(2.0);
    }
  }
  return out;
}

}  // namespace

LogScaledTotals log_scaled_totals(const LogScaledSeries& series) {
  const auto& terms = series.terms;
  const std::size_t m = terms.size();
  for (std::size_t t = 1; t < m; ++t) {
    if (!(terms[t].log2_index > terms[t - 1].log2_index)) throw DomainError("log-scaled series indices must increase");
  }
  LogScaledTotals out;
  if (m == 0) return out;
  std::vector<double> suffix_lin(m + 1, kNegInf), suffix_sq(m + 1, kNegInf);
  for (std::size_t t = m; t-- > 0;) {
    suffix_lin[t] = log2_add(suffix_lin[t + 1], terms[t].log2_value);
    suffix_sq[t] = log2_add(suffix_sq[t + 1], 2.0 * terms[t].log2_value);
  }
  const auto from_zero = log2_counts(series, 0);
  const auto from_one = log2_counts(series, 1);
  CompensatedSum heyde, pair, gordin, weighted, hannan;
  pair += std::exp2(2.0 * suffix_lin[0]);
  for (std::size_t t = 0; t < m; ++t) {
    heyde += std::exp2(from_zero[t] + 2.0 * suffix_lin[t]);
    pair += std::exp2(from_one[t] + 2.0 * suffix_lin[t]);
    gordin += std::exp2(from_zero[t] + 0.5 * suffix_sq[t]);
    weighted += std::exp2(2.0 * log2_plus_one(terms[t].log2_index) + 2.0 * terms[t].log2_value);
    hannan += std::exp2(terms[t].log2_value);
  }
  out.heyde_orthant = heyde.value();
  out.heyde_pair = pair.value();
  out.gordin = gordin.value();
  out.weighted_projection = weighted.value();
  out.hannan = hannan.value();
  return out;
}

namespace {

void check_ladder(std::span<const std::int64_t> cutoffs) {
  if (cutoffs.empty()) throw DomainError("cutoff ladder is empty");
  for (std::size_t t = 0; t < cutoffs.size(); ++t) {
    if (cutoffs[t] < 0) throw DomainError("cutoffs must be nonnegative");
    if (t > 0 && cutoffs[t] <= cutoffs[t - 1]) throw DomainError("cutoffs must be strictly increasing");
  }
}

template <class Eval>
ConditionReport ladder_report(ConditionId id, std::span<const std::int64_t> cutoffs, Eval eval) {
  check_ladder(cutoffs);
  ConditionReport report;
  report.id = id;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  for (auto c : cutoffs) report.partials.push_back(eval(c));
  report.verdict = classify(report.cutoffs, report.partials, std::nullopt, &report.diagnostics);
  return report;
}

}  // namespace

ConditionReport heyde_condition(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs) {
  check_ladder(cutoffs);
  ConditionReport report;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  report.companion_label = "subset-pair form";
  bool adapted = true;
  for (auto c : cutoffs) {
    if (auto series = rule.log_scaled(c)) {
      const auto totals = log_scaled_totals(*series);
      report.partials.push_back(totals.heyde_orthant);
      report.companion.push_back(totals.heyde_pair);
      report.by_subset.clear();
      report.by_subset[SubsetMask::full(1)] = totals.heyde_orthant;
      report.by_subset[SubsetMask::empty(1)] = 0.0;
      continue;
    }
    const auto field = rule.materialize(c);
    adapted = adapted && field.adapted();
    auto totals = heyde_totals(field);
    report.partials.push_back(totals.orthant_form);
    report.companion.push_back(totals.pair_form);
    report.by_subset = std::move(totals.orthant_by_subset);
  }
  report.id = adapted ? ConditionId::heyde_adapted : ConditionId::heyde_orthant;
  report.verdict = classify(report.cutoffs, report.partials, std::nullopt, &report.diagnostics);
  return report;
}

ConditionReport gordin_norm_series(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs) {
  return ladder_report(ConditionId::gordin_norm, cutoffs, [&](std::int64_t c) {
    if (auto series = rule.log_scaled(c)) return log_scaled_totals(*series).gordin;
    return gordin_total(rule.materialize(c));
  });
}

ConditionReport weighted_projection_sum(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs) {
  return ladder_report(ConditionId::weighted_projection, cutoffs, [&](std::int64_t c) {
    if (auto series = rule.log_scaled(c)) return log_scaled_totals(*series).weighted_projection;
    return weighted_projection_total(rule.materialize(c));
  });
}

ConditionReport hannan_sum(const GeneratorRule& rule, std::span<const std::int64_t> cutoffs) {
  return ladder_report(ConditionId::hannan, cutoffs, [&](std::int64_t c) {
    if (auto series = rule.log_scaled(c)) return log_scaled_totals(*series).hannan;
    return hannan_total(rule.materialize(c));
  });
}

ConditionReport conditional_series_report(const GeneratorRule& rule, Conditioning conditioning,
                                          std::span<const std::int64_t> cutoffs) {
  check_ladder(cutoffs);
  ConditionReport report;
  report.id = conditioning == Conditioning::present ? ConditionId::conditional_series
                                                    : ConditionId::conditional_series_shifted;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  report.companion_label = "squared change from previous cutoff";
  CoefficientField previous;
  for (std::size_t t = 0; t < cutoffs.size(); ++t) {
    auto partial = conditional_series(rule.materialize(cutoffs[t]), conditioning, cutoffs[t]);
    report.partials.push_back(partial.squared_norm());
    report.companion.push_back(t == 0 ? partial.squared_norm() : (partial - previous).squared_norm());
    previous = std::move(partial);
  }
  // Cauchy check on the series itself, not on its norm.
  std::optional<double> change;
  if (cutoffs.size() >= 2) change = std::sqrt(report.companion.back());
  std::vector<double> norms;
  for (double p : report.partials) norms.push_back(std::sqrt(std::max(p, 0.0)));
  GrowthDiagnostics norm_diag;
  const Verdict by_norm = classify(report.cutoffs, norms, change, &norm_diag);
  report.verdict = by_norm == Verdict::converged
                       ? Verdict::converged
                       : classify(report.cutoffs, report.partials, std::nullopt, &report.diagnostics);
  if (by_norm == Verdict::converged) report.diagnostics = norm_diag;
  return report;
}

TailSquareCheck tail_square_check(const CoefficientField& weights) {
  const std::size_t d = weights.dimension();
  for (const auto& ch : weights.channels()) {
    for (const auto& [i, a] : ch) {
      if (a < 0.0) throw DomainError("tail-square check needs nonnegative weights");
      for (std::size_t q = 0; q < d; ++q) {
        if (i[q] < 1) throw DomainError("tail-square check needs support in {i >= 1}");
      }
    }
  }
  TailSquareCheck out;
  const std::vector<AxisMode> modes(d, AxisMode::at_least);
  const std::vector<IndexRange> ranges(d, IndexRange::from(1));
  const OrthantTable table(weights, modes);
  out.lhs = table.accumulate(ranges, [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  });
  CompensatedSum rhs;
  for (const auto& ch : weights.channels()) {
    for (const auto& [i, a] : ch) {
      double w = a * a;
      for (std::size_t q = 0; q < d; ++q) w *= static_cast<double>(i[q]) * static_cast<double>(i[q]);
      rhs += w;
    }
  }
  out.rhs = rhs.value();
  out.ratio = out.rhs == 0.0 ? 0.0 : out.lhs / out.rhs;
  return out;
}

std::vector<double> tail_roots(std::span<const double> a) {
  std::vector<double> b(a.size());
  double tail = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) {
    tail += a[k] * a[k];
    b[k] = std::sqrt(tail);
  }
  return b;
}

GordinChainReport gordin_chain_inequalities(std::span<const double> b, std::span<const double> a) {
  if (b.size() != a.size()) throw DimensionError("b and a must have the same length");
  constexpr double tol = 1e-9;
  double tail = 0.0;
  for (std::size_t k = b.size(); k-- > 0;) {
    tail += a[k] * a[k];
    if (!(b[k] >= 0.0)) throw DomainError("b must be nonnegative");
    if (k + 1 < b.size() && b[k + 1] > b[k] * (1.0 + tol)) throw DomainError("b must be nonincreasing");
    if (std::abs(b[k] * b[k] - tail) > tol * std::max(tail, 1e-300) + 1e-300) {
      throw DomainError("b_k^2 must equal the tail sum of a_i^2 at k = " + std::to_string(k));
    }
  }
  GordinChainReport r;
  CompensatedSum wt, wa, cubes, roots, later;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double kp = static_cast<double>(k) + 1.0;
    wt += kp * b[k] * b[k];
    wa += kp * kp * a[k] * a[k];
    cubes += kp * kp * b[k] * b[k] * b[k];
    roots += b[k];
    if (k >= 1) {
      later += b[k];
      r.max_scaled_tail = std::max(r.max_scaled_tail, static_cast<double>(k) * b[k]);
    }
  }
  const double slack = 1e-12;
  r.weighted_tail = wt.value();
  r.weighted_squares = wa.value();
  r.weighted_holds = r.weighted_tail >= 0.5 * r.weighted_squares * (1.0 - slack);
  r.cauchy_schwarz_lhs = r.weighted_tail;
  r.cauchy_schwarz_rhs = std::sqrt(cubes.value()) * std::sqrt(roots.value());
  r.cauchy_schwarz_holds = r.cauchy_schwarz_lhs <= r.cauchy_schwarz_rhs * (1.0 + slack);
  r.tail_bound = 4.0 * later.value();
  r.scaled_tail_holds = r.max_scaled_tail <= r.tail_bound * (1.0 + slack);
  return r;
}

}  // namespace orthomart
