#include "orthomart/limit_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orthomart/errors.hpp"
#include "orthomart/stats.hpp"

namespace orthomart {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double volume_of(const MultiIndex& n) {
  double v = 1.0;
  for (auto c : n.coords()) v *= static_cast<double>(c);
  return v;
}

void check_block(const MultiIndex& n, std::size_t d) {
  if (n.dimension() != d) throw DimensionError("block size and field differ in dimension");
  for (auto c : n.coords()) {
    if (c < 1) throw DomainError("block sizes must be >= 1");
  }
}

bool is_even_integer(double p) { return p >= 2.0 && std::floor(p) == p && static_cast<long>(p) % 2 == 0; }

// Flattened (channel, -j) coefficients of Y = sum_k sum_j c_{k,j} e_k(-j).
struct Term {
  std::size_t channel;
  MultiIndex site;
  double c;
};

std::vector<Term> terms_of(const CoefficientField& field) {
  std::vector<Term> out;
  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [j, c] : field.channel(k)) out.push_back({k, -j, c});
  }
  return out;
}

}  // namespace

double innovation_even_moment(InnovationLaw law, int r) {
  if (r < 0 || r % 2 != 0) throw DomainError("innovation moments are tabulated for even orders");
  switch (law) {
    case InnovationLaw::rademacher: return 1.0;
    case InnovationLaw::gaussian: {
      double m = 1.0;
      for (int i = r - 1; i > 0; i -= 2) m *= i;
      return m;
    }
    case InnovationLaw::uniform: return std::pow(3.0, r / 2) / (r + 1);
  }
  return 0.0;
}

double exact_even_moment(std::span<const double> coefficients, InnovationLaw law, int p) {
  if (p < 2 || p % 2 != 0) throw DomainError("exact moments need an even order p >= 2");
  std::vector<double> mu(static_cast<std::size_t>(p) + 1, 0.0);
  for (int r = 0; r <= p; r += 2) mu[static_cast<std::size_t>(r)] = innovation_even_moment(law, r);
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(p) + 1);
  for (int m = 0; m <= p; ++m) {
    binom[m].assign(static_cast<std::size_t>(m) + 1, 1.0);
    for (int r = 1; r < m; ++r) binom[m][r] = binom[m - 1][r - 1] + binom[m - 1][r];
  }
  std::vector<double> moments(static_cast<std::size_t>(p) + 1, 0.0);
  moments[0] = 1.0;
  std::vector<double> next(moments.size());
  for (double c : coefficients) {
    if (c == 0.0) continue;
    for (int m = 0; m <= p; ++m) {
      double s = 0.0;
      double cr = 1.0;
      for (int r = 0; r <= m; r += 2) {
        s += binom[m][r] * moments[m - r] * cr * mu[r];
        cr *= c * c;
      }
      next[m] = s;
    }
    moments.swap(next);
  }
  return moments[static_cast<std::size_t>(p)];
}

MomentEstimate field_moment(const CoefficientField& field, InnovationLaw law, double p, std::uint64_t seed,
                            std::size_t draws) {
  if (!(p > 0.0)) throw DomainError("moment order must be positive");
  const auto terms = terms_of(field);
  if (is_even_integer(p)) {
    std::vector<double> c;
    for (const auto& t : terms) c.push_back(t.c);
    return {exact_even_moment(c, law, static_cast<int>(p)), 0.0, true};
  }
  if (draws < 2) throw DomainError("Monte Carlo moments need at least two draws");
  std::vector<double> v(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    double y = 0.0;
    for (const auto& t : terms) y += t.c * innovation(law, seed, i, t.channel, t.site);
    v[i] = std::pow(std::abs(y), p);
  }
  return {stats::mean(v), stats::standard_error(v), false};
}

std::vector<double> partial_sum_weights(const CoefficientField& field, const MultiIndex& n) {
  check_block(n, field.dimension());
  const Box eval{MultiIndex::filled(n.dimension(), 1), n};
  const Box box = required_sample_box(field, eval);
  const std::uint64_t volume = box.volume();
  std::vector<double> w(volume * field.channel_count(), 0.0);
  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [j, a] : field.channel(k)) {
      const Box sites{eval.lo - j, eval.hi - j};
      const std::uint64_t count = sites.volume();
      for (std::uint64_t off = 0; off < count; ++off) w[k * volume + box.offset(sites.site_at(off))] += a;
    }
  }
  return w;
}

WipReport wip_experiment(const CoefficientField& field, InnovationLaw law, const MultiIndex& n,
                         std::size_t replications, std::uint64_t seed, unsigned workers) {
  check_block(n, field.dimension());
  if (replications < 2) throw DomainError("WIP experiment needs at least two replications");
  WipReport r;
  r.n = n;
  r.replications = replications;
  r.sufficient = replications >= kMinVerdictReplications;
  for (const auto& ch : field.channels()) {
    double s = 0.0;
    for (const auto& entry : ch) s += entry.second;
    r.predicted_variance += s * s;
  }
  const auto sums = partial_sums(field, {law, std::max<std::size_t>(field.channel_count(), 1)}, n, replications,
                                 seed, workers);
  const double scale = std::sqrt(volume_of(n));
  std::vector<double> z;
  z.reserve(sums.size());
  for (const auto& s : sums) z.push_back(s.sum / scale);
  r.empirical_variance = stats::variance(z);
  r.degenerate = r.predicted_variance <= 1e-12 * std::max(1.0, field.squared_norm());
  if (r.degenerate) {
    r.notice = "predicted long-run variance is zero (coboundary-only field); normality test skipped";
    return r;
  }
  r.variance_ratio = r.empirical_variance / r.predicted_variance;
  r.ks_statistic = stats::ks_statistic_normal(z, std::sqrt(r.predicted_variance));
  r.ks_p_value = stats::kolmogorov_p_value(*r.ks_statistic, z.size());
  if (!r.sufficient) r.notice = "fewer than 500 replications; statistics are informational only";
  return r;
}

BoundReport moment_inequality(const CoefficientField& field, InnovationLaw law, const MultiIndex& n, double p,
                              std::size_t replications, std::uint64_t seed, unsigned workers) {
  check_block(n, field.dimension());
  if (!(p >= 2.0)) throw DomainError("moment inequality needs p >= 2");
  if (replications < 2) throw DomainError("moment inequality needs at least two replications");
  for (const auto& ch : field.channels()) {
    for (const auto& entry : ch) {
      if (entry.first != MultiIndex::zero(field.dimension())) {
        throw DomainError("moment inequality needs an orthomartingale difference (support at the origin)");
      }
    }
  }
  const double d = static_cast<double>(field.dimension());
  BoundReport r;
  r.quantity = "E|S_n|^p";
  r.order = p;
  r.n = n;
  const auto x_moment = field_moment(field, law, p, seed ^ 0x5bd1e995ULL);
  r.bound = std::pow(2.0 * p, d * p / 2.0) * std::pow(volume_of(n), p / 2.0) * x_moment.value;
  r.provenance = "orthomartingale moment bound (2p)^(dp/2) |n|^(p/2) ||X||_p^p";
  const auto sums = partial_sums(field, {law, std::max<std::size_t>(field.channel_count(), 1)}, n, replications,
                                 seed, workers);
  std::vector<double> v;
  v.reserve(sums.size());
  for (const auto& s : sums) v.push_back(std::pow(std::abs(s.sum), p));
  r.empirical = stats::mean(v);
  r.standard_error = stats::standard_error(v);
  if (is_even_integer(p)) r.exact = exact_even_moment(partial_sum_weights(field, n), law, static_cast<int>(p));
  r.margin_ratio = r.bound > 0.0 ? r.empirical / r.bound : 0.0;
  r.holds = r.empirical < r.bound || (r.empirical == 0.0 && r.bound == 0.0);
  return r;
}

TailBoundReports tail_bound_check(const CoefficientField& field, const Decomposition& dec, InnovationLaw law,
                                  const MultiIndex& n, double x, double p, std::size_t replications,
                                  std::uint64_t seed, unsigned workers) {
  check_block(n, field.dimension());
  if (!(p >= 1.0)) throw DomainError("tail bound needs p >= 1");
  if (!(x > 0.0)) throw DomainError("tail level x must be positive");
  if (dec.dimension != field.dimension()) throw DomainError("decomposition is missing or has the wrong dimension");
  if (dec.parts.empty() && !field.empty()) throw DomainError("decomposition is missing");
  const double d = static_cast<double>(field.dimension());
  const double vol = volume_of(n);

  TailBoundReports out;
  std::uint64_t part_seed = seed ^ 0x27d4eb2f165667c5ULL;
  for (const auto& [mask, g] : dec.parts) {
    const auto m = field_moment(g, law, p, part_seed++);
    out.g_norm_sum += std::pow(m.value + (m.exact ? 0.0 : 2.0 * m.standard_error), 1.0 / p);
  }

  const auto sums = partial_sums(field, {law, std::max<std::size_t>(field.channel_count(), 1)}, n, replications,
                                 seed, workers);
  std::vector<double> moments, hits;
  for (const auto& s : sums) {
    moments.push_back(std::pow(std::abs(s.sum), p));
    hits.push_back(s.sum > x * vol ? 1.0 : 0.0);
  }

  auto& norm = out.norm;
  norm.quantity = "||S_n||_p";
  norm.order = p;
  norm.n = n;
  const double mom = stats::mean(moments);
  norm.empirical = std::pow(mom, 1.0 / p);
  norm.standard_error = mom > 0.0 ? stats::standard_error(moments) / (p * std::pow(mom, (p - 1.0) / p)) : 0.0;
  if (is_even_integer(p)) {
    norm.exact = std::pow(exact_even_moment(partial_sum_weights(field, n), law, static_cast<int>(p)), 1.0 / p);
  }
  norm.bound = std::pow(2.0, 2.0 * d) * std::pow(p, d / 2.0) * std::sqrt(vol) * out.g_norm_sum;
  norm.margin_ratio = norm.bound > 0.0 ? norm.empirical / norm.bound : 0.0;
  norm.holds = norm.empirical <= norm.bound;
  norm.provenance = "partial-sum norm bound 2^(2d) p^(d/2) |n|^(1/2) sum_S ||g_S||_p";

  auto& tail = out.tail;
  tail.quantity = "P(S_n > x|n|)";
  tail.order = p;
  tail.n = n;
  tail.x = x;
  tail.empirical = stats::mean(hits);
  tail.standard_error = stats::standard_error(hits);
  tail.bound = std::pow(2.0, 2.0 * d * p) * std::pow(p, d * p / 2.0) * std::pow(out.g_norm_sum, p) *
               std::pow(x, -p) * std::pow(vol, -p / 2.0);
  tail.margin_ratio = tail.bound > 0.0 ? tail.empirical / tail.bound : 0.0;
  tail.holds = tail.empirical <= tail.bound;
  tail.provenance = "Markov tail bound 2^(2dp) p^(dp/2) (sum_S ||g_S||_p)^p x^(-p) |n|^(-p/2)";
  return out;
}

YoungFunction YoungFunction::with_exponent(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("Young function exponent must be positive");
  YoungFunction f;
  f.alpha = alpha;
  f.h = alpha < 1.0 ? std::pow((1.0 - alpha) / alpha, 1.0 / alpha) : 0.0;
  return f;
}

double YoungFunction::operator()(double x) const {
  const double base = std::pow(h, alpha);
  return std::exp(base) * std::expm1(std::pow(x + h, alpha) - base);
}

double YoungFunction::inverse(double y) const {
  if (y < 0.0) throw DomainError("Young function inverse needs y >= 0");
  return std::pow(std::log(y + std::exp(std::pow(h, alpha))), 1.0 / alpha) - h;
}

OrliczParams OrliczParams::make(double q, std::size_t dimension) {
  if (dimension == 0) throw DimensionError("Orlicz parameters need a dimension");
  const double d = static_cast<double>(dimension);
  if (!(q > 0.0 && q < 2.0 / d)) throw DomainError("Orlicz exponent q must satisfy 0 < q < 2/d");
  return {q, dimension, 2.0 * q / (2.0 - d * q)};
}

double luxemburg_norm(std::span<const double> samples, const YoungFunction& psi, double tolerance) {
  if (samples.empty()) throw DomainError("Luxemburg norm of an empty sample");
  double zmax = 0.0;
  for (double z : samples) zmax = std::max(zmax, std::abs(z));
  if (zmax == 0.0) return 0.0;
  const double n = static_cast<double>(samples.size());
  const double target = std::log(n) + std::log1p(std::exp(std::pow(psi.h, psi.alpha)));
  std::vector<double> logs(samples.size());
  auto feasible = [&](double c) {
    for (std::size_t i = 0; i < samples.size(); ++i) logs[i] = psi.log_shifted(std::abs(samples[i]) / c);
    return stats::log_sum_exp(logs) <= target;
  };
  double hi = zmax / psi.inverse(1.0);
  double lo = zmax / psi.inverse(n);
  if (!(lo < hi)) return hi;
  while (hi / lo - 1.0 > tolerance) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

// Cumulant generating function of one innovation and its derivative.
double cgf(InnovationLaw law, double t) {
  const double a = std::abs(t);
  switch (law) {
    case InnovationLaw::gaussian: return 0.5 * t * t;
    case InnovationLaw::rademacher: return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    case InnovationLaw::uniform: {
      const double s = kSqrt3 * a;
      if (s < 1e-4) return s * s / 6.0;
      return s + std::log(-std::expm1(-2.0 * s)) - std::numbers::ln2 - std::log(s);
    }
  }
  return 0.0;
}

double cgf_derivative(InnovationLaw law, double t) {
  switch (law) {
    case InnovationLaw::gaussian: return t;
    case InnovationLaw::rademacher: return std::tanh(t);
    case InnovationLaw::uniform: {
      const double s = kSqrt3 * t;
      if (std::abs(s) < 1e-4) return t;
      return kSqrt3 / std::tanh(s) - 1.0 / t;
    }
  }
  return 0.0;
}

double tilted_draw(InnovationLaw law, double s, std::uint64_t seed, std::uint64_t r, std::uint64_t t) {
  const double u = uniform_open(seed, r, t, 0);
  switch (law) {
    case InnovationLaw::gaussian: {
      const double u2 = uniform_open(seed, r, t, 1);
      return s + std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case InnovationLaw::rademacher: return u < 1.0 / (1.0 + std::exp(-2.0 * s)) ? 1.0 : -1.0;
    case InnovationLaw::uniform: {
      if (std::abs(s) < 1e-12) return kSqrt3 * (2.0 * u - 1.0);
      if (s > 0.0) return kSqrt3 + std::log(u + (1.0 - u) * std::exp(-2.0 * kSqrt3 * s)) / s;
      return -kSqrt3 + std::log1p(u * std::expm1(2.0 * kSqrt3 * s)) / s;
    }
  }
  return 0.0;
}

}  // namespace

TailEstimate tilted_tail(std::span<const double> weights, InnovationLaw law, double x, std::size_t replications,
                         std::uint64_t seed, unsigned workers) {
  if (replications < 2) throw DomainError("tail estimation needs at least two replications");
  std::vector<double> w;
  for (double v : weights) {
    if (v != 0.0) w.push_back(v);
  }
  TailEstimate est;
  est.x = x;
  double abs_sum = 0.0;
  for (double v : w) abs_sum += std::abs(v);
  if (w.empty()) {
    est.log_probability = x < 0.0 ? 0.0 : kNegInf;
    return est;
  }
  const double reach = law == InnovationLaw::rademacher ? abs_sum
                       : law == InnovationLaw::uniform  ? kSqrt3 * abs_sum
                                                        : std::numeric_limits<double>::infinity();
  if (x >= reach) {
    est.log_probability = kNegInf;
    return est;
  }
  auto mean_at = [&](double theta) {
    double s = 0.0;
    for (double v : w) s += v * cgf_derivative(law, theta * v);
    return s;
  };
  double theta = 0.0;
  if (x > 0.0) {
    double hi = 1.0;
    while (mean_at(hi) < x) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mean_at(mid) < x ? lo : hi) = mid;
    }
    theta = 0.5 * (lo + hi);
  }
  est.tilt = theta;
  double log_mgf = 0.0;
  for (double v : w) log_mgf += cgf(law, theta * v);

  std::vector<double> log_weight(replications, kNegInf);
  parallel_for(replications, workers, [&](std::size_t r) {
    double s = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) s += w[t] * tilted_draw(law, theta * w[t], seed, r, t);
    if (s > x) log_weight[r] = -theta * s + log_mgf;
  });
  const double lse = stats::log_sum_exp(log_weight);
  const double R = static_cast<double>(replications);
  est.log_probability = lse - std::log(R);
  if (std::isfinite(lse)) {
    double top = kNegInf;
    for (double v : log_weight) top = std::max(top, v);
    std::vector<double> scaled(replications);
    for (std::size_t r = 0; r < replications; ++r) scaled[r] = std::exp(log_weight[r] - top);
    const double m = stats::mean(scaled);
    est.relative_error = m > 0.0 ? stats::standard_error(scaled) / m : 0.0;
  }
  return est;
}

OrliczReport orlicz_tail_bound(const CoefficientField& field, const Decomposition& dec, InnovationLaw law,
                               const OrliczParams& params, const MultiIndex& n, std::span<const double> levels,
                               std::size_t replications, std::uint64_t seed, unsigned workers, std::size_t draws) {
  check_block(n, field.dimension());
  if (params.dimension != field.dimension()) throw DimensionError("Orlicz parameters and field differ in dimension");
  if (dec.dimension != field.dimension()) throw DomainError("decomposition is missing or has the wrong dimension");
  if (dec.parts.empty() && !field.empty()) throw DomainError("decomposition is missing");
  const auto q = params.q;
  (void)OrliczParams::make(q, params.dimension);
  if (draws < 2) throw DomainError("Luxemburg norms need at least two draws");

  OrliczReport rep;
  rep.params = params;
  rep.n = n;
  rep.provenance =
      "Orlicz tail form (1 + e^(h^q)) exp(-(x / (C |n|^(1/2) sum_S ||g_S||_psi_beta) + h)^q), beta = 2q/(2 - dq)";
  const auto psi_beta = params.psi_beta();
  std::uint64_t part_seed = seed ^ 0x165667b19e3779f9ULL;
  for (const auto& [mask, g] : dec.parts) {
    const auto terms = terms_of(g);
    std::vector<double> values(draws);
    const std::uint64_t s = part_seed++;
    parallel_for(draws, workers, [&](std::size_t i) {
      double y = 0.0;
      for (const auto& t : terms) y += t.c * innovation(law, s, i, t.channel, t.site);
      values[i] = y;
    });
    const double norm = luxemburg_norm(values, psi_beta);
    rep.g_norms.push_back(norm);
    rep.g_norm_sum += norm;
  }

  const auto weights = partial_sum_weights(field, n);
  const auto psi_q = params.psi_q();
  const double shift = std::log1p(std::exp(std::pow(psi_q.h, q)));  // ln(1 + e^{h^q})
  const double scale = std::sqrt(volume_of(n)) * rep.g_norm_sum;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    OrliczTailPoint pt;
    pt.x = levels[i];
    pt.estimate = tilted_tail(weights, law, pt.x, replications, seed + 0x1000 * (i + 1), workers);
    if (scale > 0.0 && pt.x > 0.0) {
      pt.bound_at_unit_constant = std::exp(shift - std::pow(pt.x / scale + psi_q.h, q));
      if (std::isfinite(pt.estimate.log_probability)) {
        const double L = shift - pt.estimate.log_probability;
        pt.minimal_constant = pt.x / (scale * (std::pow(L, 1.0 / q) - psi_q.h));
      }
    }
    rep.calibrated_constant = std::max(rep.calibrated_constant, pt.minimal_constant);
    rep.points.push_back(pt);
  }
  return rep;
}

DecayReport orlicz_decay(const CoefficientField& field, InnovationLaw law, double q, std::span<const std::int64_t> sizes,
                         std::size_t replications, std::uint64_t seed, unsigned workers) {
  (void)OrliczParams::make(q, field.dimension());
  if (sizes.size() < 2) throw DomainError("decay fit needs at least two sizes");
  DecayReport rep;
  rep.q = q;
  rep.required_slope = q / 4.0;
  std::vector<double> lx, ly;
  bool finite = true;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto n = MultiIndex::filled(field.dimension(), sizes[i]);
    const double vol = volume_of(n);
    auto est = tilted_tail(partial_sum_weights(field, n), law, vol, replications, seed + 0x2000 * (i + 1), workers);
    rep.sizes.push_back(sizes[i]);
    rep.estimates.push_back(est);
    if (!std::isfinite(est.log_probability) || est.log_probability >= 0.0) {
      finite = false;
      continue;
    }
    lx.push_back(std::log(vol));
    ly.push_back(std::log(-est.log_probability));
  }
  rep.vacuous = std::all_of(rep.estimates.begin(), rep.estimates.end(),
                            [](const TailEstimate& e) { return e.log_probability == kNegInf; });
  rep.fit = fit_line(lx, ly);
  rep.consistent = finite && lx.size() >= 2 && rep.fit.slope >= rep.required_slope;
  return rep;
}

}  // namespace orthomart
