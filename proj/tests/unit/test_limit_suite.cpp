#include <doctest.h>

#include <cmath>
#include <random>

#include "orthomart/errors.hpp"
#include "orthomart/limit_suite.hpp"
#include "orthomart/stats.hpp"

using namespace orthomart;

namespace {

CoefficientField field1(std::initializer_list<std::pair<std::int64_t, double>> entries) {
  CoefficientField f(1);
  for (auto [i, v] : entries) f.add(0, MultiIndex{i}, v);
  return f;
}

// Root of exp((t + h)^q) = 1 + exp(h^q) by plain bisection.
double psi_inverse_one(double q) {
  const double h = q < 1.0 ? std::pow((1.0 - q) / q, 1.0 / q) : 0.0;
  const double target = 1.0 + std::exp(std::pow(h, q));
  double lo = 0.0, hi = 1.0;
  while (std::exp(std::pow(hi + h, q)) < target) hi *= 2.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::exp(std::pow(mid + h, q)) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("innovation moments") {
  CHECK(innovation_even_moment(InnovationLaw::rademacher, 4) == 1.0);
  CHECK(innovation_even_moment(InnovationLaw::gaussian, 4) == doctest::Approx(3.0));
  CHECK(innovation_even_moment(InnovationLaw::gaussian, 6) == doctest::Approx(15.0));
  CHECK(innovation_even_moment(InnovationLaw::uniform, 2) == doctest::Approx(1.0));
  CHECK(innovation_even_moment(InnovationLaw::uniform, 4) == doctest::Approx(9.0 / 5.0));
  CHECK(innovation_even_moment(InnovationLaw::gaussian, 0) == 1.0);
  CHECK_THROWS_AS(innovation_even_moment(InnovationLaw::gaussian, 3), DomainError);
}

TEST_CASE("exact even moments of weighted sums") {
  const std::vector<double> ones(100, 1.0);
  CHECK(exact_even_moment(ones, InnovationLaw::rademacher, 4) == doctest::Approx(3.0 * 1e4 - 2.0 * 100));
  CHECK(exact_even_moment(ones, InnovationLaw::gaussian, 4) == doctest::Approx(3.0 * 1e4));
  CHECK(exact_even_moment(ones, InnovationLaw::uniform, 4) == doctest::Approx(100 * 1.8 + 3.0 * 100 * 99));
  CHECK(exact_even_moment(ones, InnovationLaw::gaussian, 6) == doctest::Approx(15.0 * 1e6));
  // A Gaussian sum is N(0, sum w^2) whatever the weights.
  const std::vector<double> w{0.5, -2.0, 1.5, 0.25};
  double s2 = 0.0;
  for (double v : w) s2 += v * v;
  CHECK(exact_even_moment(w, InnovationLaw::gaussian, 8) == doctest::Approx(105.0 * std::pow(s2, 4)).epsilon(1e-12));
  CHECK(exact_even_moment(w, InnovationLaw::rademacher, 2) == doctest::Approx(s2));
  CHECK_THROWS_AS(exact_even_moment(w, InnovationLaw::gaussian, 3), DomainError);
}

TEST_CASE("exact moments agree with brute-force Rademacher enumeration") {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(1 + trial % 10);
    for (auto& v : w) v = u(rng);
    for (int p : {2, 4, 6}) {
      double brute = 0.0;
      const std::size_t m = w.size();
      for (std::uint32_t signs = 0; signs < (1u << m); ++signs) {
        double s = 0.0;
        for (std::size_t t = 0; t < m; ++t) s += ((signs >> t) & 1u) ? w[t] : -w[t];
        brute += std::pow(s, p);
      }
      brute /= static_cast<double>(1u << m);
      CHECK(exact_even_moment(w, InnovationLaw::rademacher, p) == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("field moments") {
  const auto f = CoefficientField::delta(MultiIndex{0, 0}, 2.0) + CoefficientField::delta(MultiIndex{1, 0}, -1.0);
  const auto exact = field_moment(f, InnovationLaw::gaussian, 4, 1);
  CHECK(exact.exact);
  CHECK(exact.value == doctest::Approx(3.0 * 25.0));
  const auto mc = field_moment(f, InnovationLaw::gaussian, 3, 1);
  CHECK_FALSE(mc.exact);
  // E|N(0, 5)|^3 = 5^{3/2} * 2 sqrt(2/pi)
  const double truth = std::pow(5.0, 1.5) * 2.0 * std::sqrt(2.0 / std::acos(-1.0));
  CHECK(std::abs(mc.value - truth) < 4.0 * mc.standard_error);
}

TEST_CASE("partial-sum weights") {
  const auto w = partial_sum_weights(field1({{0, 1.0}, {1, 1.0}}), MultiIndex{5});
  double total = 0.0, sq = 0.0;
  for (double v : w) total += v, sq += v * v;
  CHECK(total == doctest::Approx(10.0));
  CHECK(sq == doctest::Approx(1.0 + 4.0 * 4 + 1.0));
}

TEST_CASE("Young functions") {
  for (double alpha : {0.3, 2.0 / 3.0, 1.0, 1.5, 2.0}) {
    const auto psi = YoungFunction::with_exponent(alpha);
    CHECK(psi(0.0) == 0.0);
    if (alpha < 1.0) CHECK(psi.h == doctest::Approx(std::pow((1.0 - alpha) / alpha, 1.0 / alpha)));
    if (alpha >= 1.0) CHECK(psi.h == 0.0);
    const double step = 0.01;
    double prev = psi(0.0);
    for (int i = 1; i < 800; ++i) {
      const double x = i * step;
      const double second = psi(x + step) - 2.0 * psi(x) + psi(x - step);
      CHECK(second >= -1e-9 * std::abs(psi(x)));
      CHECK(psi(x) >= prev);
      prev = psi(x);
    }
    for (double y : {0.0, 0.5, 1.0, 10.0, 1e6}) CHECK(psi(psi.inverse(y)) == doctest::Approx(y).epsilon(1e-9));
  }
  CHECK_THROWS_AS(YoungFunction::with_exponent(0.0), DomainError);
}

TEST_CASE("Orlicz parameters") {
  const auto p = OrliczParams::make(2.0 / 3.0, 1);
  CHECK(p.beta == doctest::Approx(1.0));
  const auto p2 = OrliczParams::make(0.5, 2);
  CHECK(p2.beta == doctest::Approx(1.0));
  CHECK_THROWS_AS(OrliczParams::make(1.0, 2), DomainError);
  CHECK_THROWS_AS(OrliczParams::make(0.0, 1), DomainError);
  CHECK_THROWS_AS(OrliczParams::make(0.5, 0), DimensionError);
}

TEST_CASE("Luxemburg norm") {
  for (double q : {0.3, 2.0 / 3.0, 1.0, 1.5}) {
    const auto psi = YoungFunction::with_exponent(q);
    const std::vector<double> constant(17, -2.5);
    CHECK(luxemburg_norm(constant, psi) == doctest::Approx(2.5 / psi_inverse_one(q)).epsilon(1e-8));
  }
  const auto psi = YoungFunction::with_exponent(2.0 / 3.0);
  CHECK(luxemburg_norm(std::vector<double>(5, 0.0), psi) == 0.0);
  CHECK_THROWS_AS(luxemburg_norm(std::vector<double>{}, psi), DomainError);

  std::mt19937_64 rng(51);
  std::normal_distribution<double> normal;
  std::vector<double> z(2000);
  for (auto& v : z) v = normal(rng);
  const double base = luxemburg_norm(z, psi);
  // The defining mean is 1 at the norm.
  double m = 0.0;
  for (double v : z) m += psi(std::abs(v) / base);
  CHECK(m / z.size() == doctest::Approx(1.0).epsilon(1e-8));
  for (double lambda : {0.01, 0.5, 3.0, 1e4}) {
    std::vector<double> scaled(z);
    for (auto& v : scaled) v *= lambda;
    CHECK(luxemburg_norm(scaled, psi) == doctest::Approx(lambda * base).epsilon(1e-8));
  }
  std::vector<double> bigger(z);
  for (auto& v : bigger) v = v >= 0 ? v + 0.01 : v - 0.01;
  CHECK(luxemburg_norm(bigger, psi) > base);
  bigger[0] += 5.0 * (bigger[0] >= 0 ? 1 : -1);
  CHECK(luxemburg_norm(bigger, psi) > luxemburg_norm(std::vector<double>(z), psi));
}

TEST_CASE("WIP: iid field") {
  const auto r = wip_experiment(CoefficientField::delta(MultiIndex{0, 0}), InnovationLaw::gaussian, MultiIndex{16, 16},
                                1000, 60);
  CHECK(r.sufficient);
  CHECK_FALSE(r.degenerate);
  CHECK(r.predicted_variance == 1.0);
  CHECK(std::abs(r.variance_ratio - 1.0) < 0.1);
  REQUIRE(r.ks_p_value.has_value());
  CHECK(*r.ks_p_value > 0.01);
}

TEST_CASE("WIP: moving average") {
  const auto r = wip_experiment(field1({{0, 1.0}, {1, 1.0}}), InnovationLaw::rademacher, MultiIndex{1024}, 1000, 61);
  CHECK(r.predicted_variance == 4.0);
  CHECK(std::abs(r.variance_ratio - 1.0) < 0.1);
  CHECK(*r.ks_p_value > 0.01);
}

TEST_CASE("WIP: coboundary field is degenerate") {
  const auto r = wip_experiment(field1({{0, 1.0}, {-1, -1.0}}), InnovationLaw::gaussian, MultiIndex{1000}, 500, 62);
  CHECK(r.degenerate);
  CHECK_FALSE(r.ks_p_value.has_value());
  CHECK_FALSE(r.notice.empty());
  // S_n = e_n - e_0 after telescoping, so Var(S_n / sqrt(n)) = 2 / n.
  CHECK(r.empirical_variance < 0.01);
}

TEST_CASE("WIP: few replications are flagged") {
  const auto r = wip_experiment(field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{10}, 50, 63);
  CHECK_FALSE(r.sufficient);
  CHECK_FALSE(r.notice.empty());
  CHECK_THROWS_AS(wip_experiment(field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{10}, 1, 63), DomainError);
}

TEST_CASE("KS p-values are calibrated under the null") {
  std::vector<double> p;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = wip_experiment(field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{8}, 500, 1000 + seed);
    p.push_back(*r.ks_p_value);
  }
  CHECK(stats::chi_square_uniformity_p_value(p, 10) > 0.001);
}

TEST_CASE("moment inequality") {
  SUBCASE("d = 1 reproduces 3n^2 - 2n") {
    const auto r = moment_inequality(field1({{0, 1.0}}), InnovationLaw::rademacher, MultiIndex{100}, 4, 10000, 70);
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == doctest::Approx(29800.0));
    CHECK(std::abs(r.empirical - 29800.0) < 4.0 * r.standard_error);
    CHECK(r.bound == doctest::Approx(64.0 * 1e4));
    CHECK(r.margin_ratio < 1.0);
    CHECK(r.holds);
    CHECK_FALSE(r.provenance.empty());
  }
  SUBCASE("d = 2") {
    const auto r =
        moment_inequality(CoefficientField::delta(MultiIndex{0, 0}), InnovationLaw::rademacher, MultiIndex{32, 32}, 4,
                          2000, 71);
    CHECK(r.bound == doctest::Approx(std::pow(8.0, 4) * 1024.0 * 1024.0));
    CHECK(r.holds);
    CHECK(r.margin_ratio < 1.0);
    CHECK(std::abs(r.empirical - *r.exact) < 4.0 * r.standard_error);
  }
  SUBCASE("n = 1") {
    const auto r = moment_inequality(field1({{0, 2.0}}), InnovationLaw::uniform, MultiIndex{1}, 4, 1000, 72);
    CHECK(*r.exact == doctest::Approx(16.0 * 1.8));
    CHECK(r.holds);
  }
  SUBCASE("bound constants are reproducible") {
    const auto a = moment_inequality(field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{10}, 3, 100, 73);
    const auto b = moment_inequality(field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{10}, 3, 100, 73, 3);
    CHECK(a.bound == b.bound);
    CHECK(a.empirical == b.empirical);
    CHECK_FALSE(a.exact.has_value());
  }
  CHECK_THROWS_AS(moment_inequality(field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{10}, 1.5, 100, 1),
                  DomainError);
  CHECK_THROWS_AS(moment_inequality(field1({{1, 1.0}}), InnovationLaw::gaussian, MultiIndex{10}, 2, 100, 1),
                  DomainError);
}

TEST_CASE("tail bounds") {
  SUBCASE("iid field, p = 2: the norm is exact") {
    const auto f = field1({{0, 1.0}});
    const auto r = tail_bound_check(f, decompose(f), InnovationLaw::gaussian, MultiIndex{400}, 0.1, 2, 4000, 80);
    CHECK(r.g_norm_sum == doctest::Approx(1.0));
    CHECK(*r.norm.exact == doctest::Approx(20.0));
    CHECK(r.norm.bound == doctest::Approx(4.0 * std::sqrt(2.0) * 20.0));
    CHECK(r.norm.holds);
    CHECK(r.tail.holds);
  }
  SUBCASE("d = 2 example") {
    const auto f = CoefficientField::delta(MultiIndex{0, 0}) + CoefficientField::delta(MultiIndex{1, 1}, 0.5);
    const auto r = tail_bound_check(f, decompose(f), InnovationLaw::gaussian, MultiIndex{32, 32}, 1.0, 2, 2000, 81);
    CHECK(r.norm.holds);
    CHECK(r.tail.holds);
    CHECK(r.tail.margin_ratio < 1.0);
    CHECK(r.norm.margin_ratio < 1.0);
  }
  SUBCASE("large x gives an empty tail") {
    const auto f = field1({{0, 1.0}, {2, -0.5}});
    const auto r = tail_bound_check(f, decompose(f), InnovationLaw::rademacher, MultiIndex{50}, 5.0, 4, 500, 82);
    CHECK(r.tail.empirical == 0.0);
    CHECK(r.tail.holds);
    CHECK(r.norm.holds);
  }
  SUBCASE("non-even p uses inflated Monte Carlo norms") {
    const auto f = field1({{0, 1.0}, {1, 0.5}});
    const auto r = tail_bound_check(f, decompose(f), InnovationLaw::uniform, MultiIndex{64}, 0.2, 3, 500, 83);
    CHECK_FALSE(r.norm.exact.has_value());
    CHECK(r.norm.holds);
    CHECK(r.tail.holds);
  }
  const auto f = field1({{0, 1.0}});
  CHECK_THROWS_AS(tail_bound_check(f, Decomposition{}, InnovationLaw::gaussian, MultiIndex{4}, 1.0, 2, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(tail_bound_check(f, decompose(f), InnovationLaw::gaussian, MultiIndex{4}, 0.0, 2, 10, 1),
                  DomainError);
}

TEST_CASE("tilted tail estimates") {
  SUBCASE("gaussian against the exact normal tail") {
    const std::vector<double> w(100, 1.0);
    for (double x : {10.0, 30.0, 50.0}) {
      const auto est = tilted_tail(w, InnovationLaw::gaussian, x, 4000, 90);
      const double exact = std::log(0.5 * std::erfc(x / 10.0 / std::sqrt(2.0)));
      CHECK(std::abs(est.log_probability - exact) < 4.0 * est.relative_error + 1e-3);
    }
  }
  SUBCASE("rademacher against the binomial tail") {
    const int n = 60;
    const std::vector<double> w(n, 1.0);
    for (int k : {40, 50}) {
      // S > 2k - n - 1 means at least k plus signs.
      double lp = -INFINITY;
      for (int j = k; j <= n; ++j) {
        const double term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) - n * std::log(2.0);
        lp = std::max(lp, term) + std::log1p(std::exp(-std::abs(lp - term)));
      }
      const auto est = tilted_tail(w, InnovationLaw::rademacher, 2.0 * k - n - 1, 4000, 91);
      CHECK(std::abs(est.log_probability - lp) < 4.0 * est.relative_error + 1e-3);
    }
    CHECK(tilted_tail(w, InnovationLaw::rademacher, 60.0, 100, 92).log_probability == -INFINITY);
  }
  SUBCASE("uniform single term") {
    const std::vector<double> w{1.0};
    const auto est = tilted_tail(w, InnovationLaw::uniform, 1.0, 4000, 93);
    const double exact = std::log((std::sqrt(3.0) - 1.0) / (2.0 * std::sqrt(3.0)));
    CHECK(std::abs(est.log_probability - exact) < 4.0 * est.relative_error + 1e-3);
  }
  SUBCASE("worker count does not change the estimate") {
    const std::vector<double> w{1.0, 0.5, -0.25, 2.0};
    const auto a = tilted_tail(w, InnovationLaw::gaussian, 6.0, 999, 94, 1);
    const auto b = tilted_tail(w, InnovationLaw::gaussian, 6.0, 999, 94, 4);
    CHECK(a.log_probability == b.log_probability);
    CHECK(a.relative_error == b.relative_error);
  }
}

TEST_CASE("Orlicz tail bound") {
  const auto params = OrliczParams::make(2.0 / 3.0, 1);
  SUBCASE("iid field") {
    const auto f = field1({{0, 1.0}});
    const std::vector<double> levels{10.0, 40.0, 100.0};
    const auto rep =
        orlicz_tail_bound(f, decompose(f), InnovationLaw::gaussian, params, MultiIndex{256}, levels, 2000, 100);
    REQUIRE(rep.g_norms.size() == 1);
    CHECK(rep.g_norm_sum > 0.0);
    REQUIRE(rep.points.size() == 3);
    for (const auto& pt : rep.points) {
      CHECK(std::isfinite(pt.estimate.log_probability));
      CHECK(pt.minimal_constant > 0.0);
      // With C at the calibrated value the bound covers the estimate.
      const auto psi = params.psi_q();
      const double bound = std::log1p(std::exp(std::pow(psi.h, params.q))) -
                           std::pow(pt.x / (rep.calibrated_constant * 16.0 * rep.g_norm_sum) + psi.h, params.q);
      CHECK(pt.estimate.log_probability <= bound + 1e-9);
    }
    CHECK(rep.calibrated_constant > 0.0);
    CHECK_FALSE(rep.provenance.empty());
  }
  SUBCASE("coboundary field has no tail at large x") {
    const auto f = field1({{0, 1.0}, {-1, -1.0}});
    const std::vector<double> levels{10.0};
    const auto rep =
        orlicz_tail_bound(f, decompose(f), InnovationLaw::rademacher, params, MultiIndex{128}, levels, 200, 101);
    CHECK(rep.points[0].estimate.log_probability == -INFINITY);
    CHECK(rep.points[0].minimal_constant == 0.0);
  }
  CHECK_THROWS_AS(orlicz_tail_bound(field1({{0, 1.0}}), decompose(field1({{0, 1.0}})), InnovationLaw::gaussian,
                                    OrliczParams{2.5, 1, 0.0}, MultiIndex{4}, std::vector<double>{1.0}, 10, 1),
                  DomainError);
}

TEST_CASE("Orlicz tail decay at x = |n|") {
  const std::vector<std::int64_t> sizes{128, 256, 512};
  const auto rep = orlicz_decay(field1({{0, 1.0}}), InnovationLaw::gaussian, 2.0 / 3.0, sizes, 2000, 110);
  REQUIRE(rep.estimates.size() == 3);
  // -log P(S_n > n) ~ n / 2 for a gaussian sum, slope 1.
  CHECK(rep.fit.slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.required_slope == doctest::Approx(1.0 / 6.0));
  CHECK(rep.consistent);
  const auto rad = orlicz_decay(field1({{0, 1.0}}), InnovationLaw::rademacher, 2.0 / 3.0, sizes, 200, 111);
  CHECK_FALSE(rad.consistent);
  CHECK(rad.vacuous);
  CHECK_FALSE(rep.vacuous);
  CHECK_THROWS_AS(orlicz_decay(field1({{0, 1.0}}), InnovationLaw::gaussian, 2.0 / 3.0,
                               std::vector<std::int64_t>{128}, 100, 1),
                  DomainError);
}
