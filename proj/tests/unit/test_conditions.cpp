#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "orthomart/conditions.hpp"
#include "orthomart/errors.hpp"

using namespace orthomart;

namespace {

CoefficientField field1(std::initializer_list<std::pair<std::int64_t, double>> entries) {
  CoefficientField f(1);
  for (auto [i, v] : entries) f.add(0, MultiIndex{i}, v);
  return f;
}

std::vector<std::int64_t> ladder(std::int64_t from_exp, std::int64_t to_exp) {
  std::vector<std::int64_t> out;
  for (auto e = from_exp; e <= to_exp; ++e) out.push_back(std::int64_t{1} << e);
  return out;
}

double harmonic(int k) {
  double s = 0.0;
  for (int i = 1; i <= k; ++i) s += 1.0 / i;
  return s;
}

}  // namespace

TEST_CASE("Heyde totals: worked values") {
  CHECK(heyde_totals(field1({{0, 1.0}})).orthant_form == 1.0);
  const auto geo = GeneratorRule::geometric({0.5}).materialize(60);
  CHECK(heyde_totals(geo).orthant_form == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  const auto prod = GeneratorRule::geometric({0.5, 0.5}).materialize(60);
  CHECK(heyde_totals(prod).orthant_form == doctest::Approx(256.0 / 9.0).epsilon(1e-12));
  const auto empty = heyde_condition(GeneratorRule::explicit_field(CoefficientField(2)), std::vector<std::int64_t>{4});
  CHECK(empty.partials[0] == 0.0);
  CHECK(empty.verdict == Verdict::converged);
}

TEST_CASE("Heyde orthant form matches brute force on random fields") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto f = oracle::random_field(rng, d, -2, 4, 3, 6);
    CHECK(heyde_totals(f).orthant_form == doctest::Approx(oracle::heyde_orthant(f)).epsilon(1e-10));
  }
}

TEST_CASE("pair form equals orthant form for adapted fields") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto f = oracle::random_field(rng, d, 0, 4, 3, 6);
    const auto t = heyde_totals(f);
    CHECK(t.pair_form == doctest::Approx(t.orthant_form).epsilon(1e-10));
  }
}

TEST_CASE("pair form and orthant form differ off the adapted class") {
  const auto t = heyde_totals(field1({{-1, 1.0}}));
  CHECK(t.pair_form == doctest::Approx(2.0));
  CHECK(t.orthant_form == doctest::Approx(1.0));
}

TEST_CASE("Gordin-type sum") {
  CHECK(gordin_total(field1({{0, 1.0}})) == 1.0);
  CHECK(gordin_total(GeneratorRule::geometric({0.5}).materialize(60)) ==
        doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gordin_total(field1({{-1, 1.0}})), DomainError);
  const auto spikes = GeneratorRule::dyadic_spikes();
  const auto r = gordin_norm_series(spikes, std::vector<std::int64_t>{14});
  CHECK(r.partials[0] == doctest::Approx(3.997767720511836).epsilon(1e-12));
  CHECK(r.partials[0] >= harmonic(14));
}

TEST_CASE("log-scaled and materialized dyadic spikes agree") {
  const auto rule = GeneratorRule::dyadic_spikes();
  for (std::int64_t k : {0, 1, 2, 5, 17, 30}) {
    const auto field = rule.materialize(k);
    const auto log = log_scaled_totals(*rule.log_scaled(k));
    CHECK(log.gordin == doctest::Approx(gordin_total(field)).epsilon(1e-12));
    CHECK(log.weighted_projection == doctest::Approx(weighted_projection_total(field)).epsilon(1e-12));
    CHECK(log.hannan == doctest::Approx(hannan_total(field)).epsilon(1e-12));
    const auto h = heyde_totals(field);
    CHECK(log.heyde_orthant == doctest::Approx(h.orthant_form).epsilon(1e-12));
    CHECK(log.heyde_pair == doctest::Approx(h.pair_form).epsilon(1e-12));
  }
}

TEST_CASE("weighted projection sum") {
  CHECK(weighted_projection_total(field1({{0, 1.0}})) == 1.0);
  CHECK(weighted_projection_total(field1({{1, 1.0}})) == 4.0);
  CHECK(weighted_projection_total(field1({{-3, 1.0}})) == 9.0);
  const auto r = weighted_projection_sum(GeneratorRule::dyadic_spikes(), std::vector<std::int64_t>{20});
  CHECK(r.partials[0] == doctest::Approx(7.02829693194267).epsilon(1e-12));
}

TEST_CASE("dyadic spikes: Gordin diverges, weighted sum converges") {
  const auto rule = GeneratorRule::dyadic_spikes();
  const auto cut = ladder(10, 20);
  const auto g = gordin_norm_series(rule, cut);
  CHECK(g.verdict == Verdict::diverging);
  const auto v = weighted_projection_sum(rule, cut);
  CHECK(v.verdict == Verdict::converged);
  CHECK(std::abs(v.partials.back() - v.partials[v.partials.size() - 2]) < 1e-6);
  std::vector<std::int64_t> small;
  for (int k = 1; k <= 20; ++k) small.push_back(k);
  const auto gs = gordin_norm_series(rule, small);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(gs.partials[i] > harmonic(static_cast<int>(small[i])));
}

TEST_CASE("conditional expectation series") {
  const auto one = conditional_series(field1({{0, 1.0}}), Conditioning::present, 5);
  CHECK(one == field1({{0, 1.0}}));
  const auto geo = GeneratorRule::geometric({0.5});
  const auto s = conditional_series(geo.materialize(60), Conditioning::present, 60);
  CHECK(s.squared_norm() == doctest::Approx(16.0 / 3.0).epsilon(1e-9));
  const auto rep = conditional_series_report(geo, Conditioning::present, ladder(4, 7));
  CHECK(rep.verdict == Verdict::converged);
  CHECK_THROWS_AS(conditional_series(field1({{-1, 1.0}}), Conditioning::present, 3), DomainError);

  // Window sums against a direct double loop.
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + trial % 2;
    const auto f = oracle::random_field(rng, d, 0, 4, 2, 5);
    const std::int64_t N = 1 + trial % 4;
    for (auto cond : {Conditioning::present, Conditioning::strict_past}) {
      const auto got = conditional_series(f, cond, N);
      CoefficientField want(d, f.channel_count());
      const std::int64_t low = cond == Conditioning::present ? 0 : 1;
      std::vector<std::int64_t> lo(d, low), hi(d, 4);
      std::vector<std::int64_t> zero(d, 0), top(d, N);
      oracle::for_box(lo, hi, [&](const MultiIndex& l) {
        for (std::size_t k = 0; k < f.channel_count(); ++k) {
          double v = 0.0;
          oracle::for_box(zero, top, [&](const MultiIndex& i) { v += f.at(k, i + l); });
          if (v != 0.0) want.add(k, l, v);
        }
      });
      CHECK(max_abs_difference(got, want) < 1e-12);
    }
  }
}

TEST_CASE("harmonic edge: strict-past series vanishes, present series diverges") {
  const auto rule = GeneratorRule::harmonic_edge();
  const auto cut = ladder(6, 12);
  const auto past = conditional_series_report(rule, Conditioning::strict_past, cut);
  for (double p : past.partials) CHECK(p == 0.0);
  CHECK(past.verdict == Verdict::converged);
  const auto present = conditional_series_report(rule, Conditioning::present, cut);
  CHECK(present.verdict == Verdict::diverging);
  const auto heyde = heyde_condition(rule, cut);
  CHECK(heyde.id == ConditionId::heyde_adapted);
  CHECK(heyde.verdict == Verdict::diverging);
}

TEST_CASE("Hannan sum") {
  CHECK(hannan_total(field1({{0, 1.0}})) == 1.0);
  CHECK(hannan_total(GeneratorRule::geometric({0.5}).materialize(60)) == doctest::Approx(2.0).epsilon(1e-12));
  const auto basel = GeneratorRule::power({2.0});
  const auto r = hannan_sum(basel, std::vector<std::int64_t>{1 << 16});
  CHECK(r.partials[0] == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(2e-5));
  CoefficientField two(1, 2);
  two.add(0, MultiIndex{0}, 3.0);
  two.add(1, MultiIndex{0}, 4.0);
  CHECK(hannan_total(two) == 5.0);
}

TEST_CASE("partials of nonnegative-term conditions are nondecreasing") {
  const auto cut = ladder(1, 7);
  for (const auto& rule : {GeneratorRule::power({0.8}), GeneratorRule::geometric({0.7, 0.9})}) {
    for (const auto& rep : {heyde_condition(rule, cut), gordin_norm_series(rule, cut), weighted_projection_sum(rule, cut),
                            hannan_sum(rule, cut)}) {
      for (std::size_t i = 1; i < rep.partials.size(); ++i) CHECK(rep.partials[i] >= rep.partials[i - 1]);
    }
  }
}

TEST_CASE("verdict classification") {
  const std::vector<std::int64_t> c{16, 32, 64, 128, 256};
  CHECK(classify(c, std::vector<double>{1, 1, 1, 1, 1}) == Verdict::converged);
  CHECK(classify(c, std::vector<double>{16, 32, 64, 128, 256}) == Verdict::diverging);
  std::vector<double> logs;
  for (auto n : c) logs.push_back(std::log(static_cast<double>(n)));
  CHECK(classify(c, logs) == Verdict::diverging);
  std::vector<double> settling;
  for (auto n : c) settling.push_back(2.0 - 1.0 / static_cast<double>(n));
  CHECK(classify(c, settling) == Verdict::inconclusive);
  CHECK(classify(std::vector<std::int64_t>{8}, std::vector<double>{0.0}) == Verdict::converged);
  CHECK_THROWS_AS(heyde_condition(GeneratorRule::geometric({0.5}), std::vector<std::int64_t>{4, 2}), DomainError);
}

TEST_CASE("tail-square inequality") {
  CoefficientField one(1);
  one.add(0, MultiIndex{1}, 1.0);
  auto r = tail_square_check(one);
  CHECK(r.lhs == 1.0);
  CHECK(r.rhs == 1.0);
  CHECK(r.ratio == 1.0);
  CoefficientField two(2);
  two.add(0, MultiIndex{1, 1}, 1.0);
  r = tail_square_check(two);
  CHECK(r.lhs == 1.0);
  CHECK(r.rhs == 1.0);
  CHECK(tail_square_check(CoefficientField(1)).ratio == 0.0);

  CoefficientField cubes(1);
  for (int i = 1; i <= 200; ++i) cubes.add(0, MultiIndex{i}, std::pow(i, -3.0));
  r = tail_square_check(cubes);
  double lhs = 0.0, rhs = 0.0;
  for (int j = 1; j <= 200; ++j) {
    double t = 0.0;
    for (int i = j; i <= 200; ++i) t += std::pow(i, -3.0);
    lhs += t * t;
    rhs += static_cast<double>(j) * j * std::pow(j, -6.0);
  }
  CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(r.ratio <= 6.0);

  CoefficientField bad(1);
  bad.add(0, MultiIndex{0}, 1.0);
  CHECK_THROWS_AS(tail_square_check(bad), DomainError);
  CoefficientField negative(1);
  negative.add(0, MultiIndex{2}, -1.0);
  CHECK_THROWS_AS(tail_square_check(negative), DomainError);
}

TEST_CASE("Gordin chain inequalities") {
  {
    const std::vector<double> a{1.0, 0.0, 0.0};
    const auto r = gordin_chain_inequalities(tail_roots(a), a);
    CHECK(r.weighted_tail == 1.0);
    CHECK(r.weighted_squares == 1.0);
    CHECK(r.max_scaled_tail == 0.0);
    CHECK(r.all_hold());
  }
  {
    std::vector<double> a;
    for (int i = 0; i < 50; ++i) a.push_back(std::ldexp(1.0, -i));
    CHECK(gordin_chain_inequalities(tail_roots(a), a).all_hold());
  }
  {
    // b_k = 1/(k+1)^2, a_k^2 = b_k^2 - b_{k+1}^2 with the last a carrying the remaining tail.
    const int n = 40;
    std::vector<double> b, a(n);
    for (int k = 0; k < n; ++k) b.push_back(1.0 / ((k + 1.0) * (k + 1.0)));
    for (int k = 0; k + 1 < n; ++k) a[k] = std::sqrt(b[k] * b[k] - b[k + 1] * b[k + 1]);
    a[n - 1] = b[n - 1];
    const auto r = gordin_chain_inequalities(b, a);
    CHECK(r.scaled_tail_holds);
    CHECK(r.all_hold());
  }
  CHECK_THROWS_AS(gordin_chain_inequalities(std::vector<double>{0.5, 1.0}, std::vector<double>{0.0, 1.0}),
                  DomainError);
  CHECK_THROWS_AS(gordin_chain_inequalities(std::vector<double>{2.0, 1.0}, std::vector<double>{0.0, 1.0}),
                  DomainError);
}

TEST_CASE("condition ids are stable report keys") {
  CHECK(to_string(ConditionId::heyde_orthant) == "HEYDE_4B");
  CHECK(to_string(ConditionId::conditional_series_shifted) == "SERIES_3B_SHIFTED");
  CHECK(to_string(Verdict::inconclusive) == "inconclusive");
}
