// Acceptance run: one PASS/FAIL line per criterion. The exit status is nonzero
// only for failures outside the known-red set, which is printed at the end.

#include <CLI11.hpp>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "orthomart/cli/app.hpp"
#include "orthomart/conditions.hpp"
#include "orthomart/decomposition.hpp"
#include "orthomart/fieldsim.hpp"
#include "orthomart/generator.hpp"
#include "orthomart/limit_suite.hpp"

using namespace orthomart;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

CoefficientField field1(std::initializer_list<std::pair<std::int64_t, double>> entries) {
  CoefficientField f(1);
  for (auto [i, v] : entries) f.add(0, MultiIndex{i}, v);
  return f;
}

CoefficientField random_field(std::mt19937_64& rng, std::size_t d, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::size_t> channels(1, 3), count(1, 10);
  std::uniform_int_distribution<std::int64_t> coord(lo, hi);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const std::size_t k = channels(rng);
  CoefficientField f(d, k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t m = count(rng);
    for (std::size_t e = 0; e < m; ++e) {
      MultiIndex i(d);
      for (std::size_t q = 0; q < d; ++q) i[q] = coord(rng);
      f.add(c, i, value(rng));
    }
  }
  return f;
}

struct Context {
  std::uint64_t seed = 20261019;
  unsigned workers = 2;
  std::vector<CoefficientField> fields;  // the finite-support test fields
};

void build_fields(Context& ctx) {
  std::mt19937_64 rng(ctx.seed);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int t = 0; t < 200; ++t) {
      ctx.fields.push_back(t % 2 == 0 ? random_field(rng, d, -3, 4) : random_field(rng, d, 0, 5));
    }
  }
  ctx.fields.push_back(CoefficientField::delta(MultiIndex{0}));
  ctx.fields.push_back(field1({{0, 1.0}, {1, 1.0}}));
  ctx.fields.push_back(field1({{-1, 1.0}}));
  ctx.fields.push_back(CoefficientField::delta(MultiIndex{1, 1}));
  ctx.fields.push_back(GeneratorRule::geometric({0.5}).materialize(30));
  ctx.fields.push_back(GeneratorRule::geometric({0.5, 0.5}).materialize(12));
  ctx.fields.push_back(GeneratorRule::harmonic_edge().materialize(32));
}

// ---------------------------------------------------------------------------

Outcome round_trip(Context& ctx) {
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < 600; ++t) {
    const auto& f = ctx.fields[t];
    worst = std::max(worst, max_abs_difference(reconstruct(decompose(f)), f));
    ++count;
  }
  return {worst < 1e-9, std::to_string(count) + " random fields (d=1,2,3), max residual " + g(worst)};
}

Outcome condition_equivalence(Context& ctx) {
  double worst_adapted = 0.0, worst_other = 0.0;
  std::size_t adapted = 0, other = 0, other_agree = 0;
  for (const auto& f : ctx.fields) {
    const auto t = heyde_totals(f);
    const double e = rel(t.pair_form, t.orthant_form);
    if (f.adapted()) {
      ++adapted;
      worst_adapted = std::max(worst_adapted, e);
    } else {
      ++other;
      worst_other = std::max(worst_other, e);
      if (e < 1e-9) ++other_agree;
    }
  }
  const bool ok = worst_adapted < 1e-9 && worst_other < 1e-9;
  return {ok, "adapted: " + std::to_string(adapted) + " fields, max rel err " + g(worst_adapted) +
                  "; non-adapted: " + std::to_string(other_agree) + "/" + std::to_string(other) +
                  " agree, max rel err " + g(worst_other) + " (forms coincide only on adapted fields)"};
}

Outcome norm_identity(Context& ctx) {
  double worst = 0.0;
  for (const auto& f : ctx.fields) {
    for (const auto& [s, v] : g_norm_identity(f, decompose(f))) worst = std::max(worst, rel(v.first, v.second));
  }
  return {worst < 1e-9, std::to_string(ctx.fields.size()) + " fields, max rel err " + g(worst)};
}

Outcome worked_values(Context&) {
  const auto geo = GeneratorRule::geometric({0.5}).materialize(60);
  const double heyde = heyde_totals(geo).orthant_form;
  const double gordin = gordin_total(geo);
  const double product = heyde_totals(GeneratorRule::geometric({0.5, 0.5}).materialize(60)).orthant_form;
  const double e1 = std::abs(heyde - 16.0 / 3.0);
  const double e2 = std::abs(gordin - 4.0 / std::sqrt(3.0));
  const double e3 = std::abs(product - 256.0 / 9.0);
  return {e1 < 1e-6 && e2 < 1e-6 && e3 < 1e-5, "Heyde " + g(heyde, 12) + " (err " + g(e1) + "), Gordin " +
                                                   g(gordin, 12) + " (err " + g(e2) + "), d=2 product " +
                                                   g(product, 12) + " (err " + g(e3) + ")"};
}

Outcome dyadic_spikes(Context&) {
  const auto rule = GeneratorRule::dyadic_spikes();
  std::vector<std::int64_t> ladder;
  for (int k = 10; k <= 20; ++k) ladder.push_back(std::int64_t{1} << k);
  const auto v = weighted_projection_sum(rule, ladder);
  const auto gn = gordin_norm_series(rule, ladder);
  std::vector<std::int64_t> small;
  for (int k = 1; k <= 20; ++k) small.push_back(k);
  const auto early = gordin_norm_series(rule, small);
  double h = 0.0;
  bool exceeds = true;
  for (std::size_t i = 0; i < small.size(); ++i) {
    h += 1.0 / static_cast<double>(small[i]);
    exceeds = exceeds && early.partials[i] > h;
  }
  const double change = std::abs(v.partials.back() - v.partials[v.partials.size() - 2]);
  const bool ok = change < 1e-6 && v.verdict == Verdict::converged && gn.verdict == Verdict::diverging && exceeds;
  return {ok, to_string(v.id) + " " + to_string(v.verdict) + " (change " + g(change) + " between 2^19 and 2^20), " + to_string(gn.id) + " " +
                  to_string(gn.verdict) + ", partials above H_K for all K<=20: " + (exceeds ? "yes" : "no")};
}

Outcome harmonic_edge(Context&) {
  const auto rule = GeneratorRule::harmonic_edge();
  std::vector<std::int64_t> ladder;
  for (int k = 6; k <= 12; ++k) ladder.push_back(std::int64_t{1} << k);
  const auto past = conditional_series_report(rule, Conditioning::strict_past, ladder);
  const auto present = conditional_series_report(rule, Conditioning::present, ladder);
  const auto heyde = heyde_condition(rule, ladder);
  bool zero = true;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    zero = zero && conditional_series(rule.materialize(ladder[i]), Conditioning::strict_past, ladder[i]).empty();
  }
  const bool ok = zero && present.verdict == Verdict::diverging && heyde.verdict == Verdict::diverging &&
                  heyde.id == ConditionId::heyde_adapted;
  return {ok, std::string("strict-past series identically zero: ") + (zero ? "yes" : "no") + ", present series " +
                  to_string(present.verdict) + ", " + to_string(heyde.id) + " " + to_string(heyde.verdict)};
}

Outcome tail_inequalities(Context& ctx) {
  std::mt19937_64 rng(ctx.seed + 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  double worst[3] = {0.0, 0.0, 0.0};
  for (std::size_t d = 1; d <= 2; ++d) {
    const double constant = std::pow(6.0, static_cast<double>(d));
    for (int t = 0; t < 500; ++t) {
      const std::int64_t side = d == 1 ? 1 + static_cast<std::int64_t>(u(rng) * 50) : 1 + static_cast<std::int64_t>(u(rng) * 12);
      const double decay = 3.0 * u(rng);
      CoefficientField w(d);
      const Box box{MultiIndex::filled(d, 1), MultiIndex::filled(d, side)};
      for (std::uint64_t off = 0; off < box.volume(); ++off) {
        const auto site = box.site_at(off);
        if (u(rng) < 0.3) continue;
        double prod = 1.0;
        for (std::size_t q = 0; q < d; ++q) prod *= static_cast<double>(site[q]);
        w.add(0, site, u(rng) * std::pow(prod, -decay));
      }
      const auto r = tail_square_check(w);
      worst[d] = std::max(worst[d], r.ratio);
      if (r.lhs > constant * r.rhs) ++violations;
    }
  }
  std::size_t chain_violations = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(u(rng) * 100);
    std::vector<double> a(m);
    const double rate = u(rng), exponent = 0.5 + 3.0 * u(rng);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = static_cast<double>(i);
      a[i] = t % 3 == 0 ? std::pow(rate, x) : t % 3 == 1 ? std::pow(x + 1.0, -exponent) : (u(rng) < 0.5 ? 0.0 : u(rng));
    }
    if (!gordin_chain_inequalities(tail_roots(a), a).all_hold()) ++chain_violations;
  }
  return {violations == 0 && chain_violations == 0,
          "tail-square: 1000 arrays, " + std::to_string(violations) + " violations, max ratio d=1 " + g(worst[1]) +
              " (<= 6), d=2 " + g(worst[2]) + " (<= 36); chain: 500 sequences, " + std::to_string(chain_violations) +
              " violations"};
}

Outcome pointwise(Context& ctx) {
  const InnovationLaw laws[] = {InnovationLaw::rademacher, InnovationLaw::gaussian, InnovationLaw::uniform};
  double worst = 0.0;
  std::size_t runs = 0;
  for (std::size_t t = 0; t < ctx.fields.size(); ++t) {
    const auto& f = ctx.fields[t];
    const auto dec = decompose(f);
    const std::size_t d = f.dimension();
    const std::int64_t side = d == 1 ? 32 : d == 2 ? 10 : 5;
    const Box eval{MultiIndex::zero(d), MultiIndex::filled(d, side - 1)};
    for (auto law : laws) {
      const auto sample = sample_innovations({law, f.channel_count()}, required_sample_box(f, dec, eval), ctx.seed + t,
                                             0, ctx.workers);
      worst = std::max(worst, verify_pointwise(f, dec, sample, eval, ctx.workers));
      ++runs;
    }
  }
  return {worst < 1e-10, std::to_string(runs) + " (field, law) lattices, max residual " + g(worst)};
}

Outcome wip(Context& ctx) {
  const auto a = wip_experiment(CoefficientField::delta(MultiIndex{0, 0}), InnovationLaw::gaussian, MultiIndex{64, 64},
                                2000, ctx.seed, ctx.workers);
  const auto b = wip_experiment(field1({{0, 1.0}, {1, 1.0}}), InnovationLaw::rademacher, MultiIndex{4096}, 2000,
                                ctx.seed + 1, ctx.workers);
  const bool ok = std::abs(a.variance_ratio - 1.0) < 0.1 && *a.ks_p_value > 0.01 &&
                  std::abs(b.empirical_variance / 4.0 - 1.0) < 0.1;
  return {ok, "f=e n=64x64: variance " + g(a.empirical_variance) + ", KS p " + g(*a.ks_p_value) +
                  "; MA n=4096: variance " + g(b.empirical_variance) + " (target 4), KS p " + g(*b.ks_p_value)};
}

Outcome moments(Context& ctx) {
  const auto d1 = moment_inequality(field1({{0, 1.0}}), InnovationLaw::rademacher, MultiIndex{100}, 4, 10000, ctx.seed,
                                    ctx.workers);
  const auto d2 = moment_inequality(CoefficientField::delta(MultiIndex{0, 0}), InnovationLaw::rademacher,
                                    MultiIndex{32, 32}, 4, 10000, ctx.seed + 1, ctx.workers);
  const double z = std::abs(d1.empirical - 29800.0) / d1.standard_error;
  const bool ok = d1.margin_ratio < 1.0 && d2.margin_ratio < 1.0 && *d1.exact == 29800.0 && z < 3.0;
  return {ok, "d=1 n=100: E|S|^4 " + g(d1.empirical, 6) + " vs exact " + g(*d1.exact, 6) + " (" + g(z, 2) +
                  " SE), margin " + g(d1.margin_ratio) + "; d=2 n=32x32: margin " + g(d2.margin_ratio)};
}

Outcome tails(Context& ctx) {
  struct Case {
    CoefficientField f;
    InnovationLaw law;
    MultiIndex n;
    std::vector<double> xs;
    std::vector<double> ps;
  };
  const std::vector<Case> cases{
      {field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{100}, {0.05, 0.1, 0.3}, {2, 4}},
      {field1({{0, 1.0}}), InnovationLaw::gaussian, MultiIndex{1000}, {0.02, 0.05}, {2, 3, 4}},
      {field1({{0, 1.0}, {1, 1.0}}), InnovationLaw::rademacher, MultiIndex{256}, {0.1, 0.25}, {2, 4}},
      {CoefficientField::delta(MultiIndex{0, 0}) + CoefficientField::delta(MultiIndex{1, 1}, 0.5),
       InnovationLaw::gaussian, MultiIndex{32, 32}, {0.05, 1.0}, {2}},
  };
  std::size_t checks = 0, failures = 0;
  double worst_norm = 0.0, worst_tail = 0.0;
  std::uint64_t s = ctx.seed;
  for (const auto& c : cases) {
    const auto dec = decompose(c.f);
    for (double p : c.ps) {
      for (double x : c.xs) {
        const auto r = tail_bound_check(c.f, dec, c.law, c.n, x, p, 10000, s++, ctx.workers);
        checks += 2;
        failures += !r.norm.holds + !r.tail.holds;
        worst_norm = std::max(worst_norm, r.norm.margin_ratio);
        worst_tail = std::max(worst_tail, r.tail.margin_ratio);
      }
    }
  }
  const std::vector<std::int64_t> sizes{128, 256, 512};
  const auto decay = orlicz_decay(field1({{0, 1.0}}), InnovationLaw::gaussian, 2.0 / 3.0, sizes, 4000, ctx.seed,
                                  ctx.workers);
  return {failures == 0 && decay.consistent,
          std::to_string(checks) + " norm/tail checks, " + std::to_string(failures) + " above bound (max margin norm " +
              g(worst_norm) + ", tail " + g(worst_tail) + "); Orlicz q=2/3: log(-log P) slope " + g(decay.fit.slope) +
              " vs |n|^(1/3) rate, required >= " + g(decay.required_slope)};
}

std::string comparable(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"execution\"") == std::string::npos) out += line + '\n';
  }
  return out;
}

Outcome determinism(Context& ctx) {
  const auto root = fs::temp_directory_path() / ("orthomart-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const auto cfg = root / "run.ini";
  std::ofstream(cfg) << "[field]\ncoefficients = 0,0,0,1; 0,1,1,0.5; 0,-1,2,0.25\n"
                        "[simulation]\nn = 16\nreplications = 600\np = 2,3\nx = 0.5\nq = 0.4\nsizes = 4,8\n"
                        "draws = 2000\neval_size = 8\ntrials = 100\ndump_grid = true\n";
  const std::vector<std::string> commands{"decompose", "verify", "simulate", "wip", "tails", "orlicz", "lemma7"};
  const unsigned alternatives[] = {1u, 4u};
  std::size_t files = 0, mismatches = 0;
  bool ran = true;
  std::string failures;
  for (const auto& cmd : commands) {
    std::vector<fs::path> dirs;
    std::vector<int> codes;
    std::vector<std::string> streams;
    for (unsigned w : alternatives) {
      const auto dir = root / (cmd + "-" + std::to_string(w));
      const std::vector<std::string> args{"orthomart",     cmd,    "--config", cfg.string(), "--seed", std::to_string(ctx.seed),
                                          "--workers", std::to_string(w), "--out",    dir.string()};
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
      if (code != cli::kSuccess && code != cli::kViolation) {
        ran = false;
        failures += " " + cmd + "@" + std::to_string(w) + ": " + err.str();
      }
      codes.push_back(code);
      streams.push_back(err.str());
      dirs.push_back(dir);
    }
    if (codes[0] != codes[1] || streams[0] != streams[1]) ++mismatches;
    if (!fs::exists(dirs[0])) continue;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      if (comparable(entry.path()) != comparable(dirs[1] / entry.path().filename())) ++mismatches;
    }
  }
  // Library level: replication-parallel estimators.
  const auto a = wip_experiment(field1({{0, 1.0}, {2, 0.5}}), InnovationLaw::uniform, MultiIndex{200}, 700, ctx.seed, 1);
  const auto b = wip_experiment(field1({{0, 1.0}, {2, 0.5}}), InnovationLaw::uniform, MultiIndex{200}, 700, ctx.seed, 5);
  const bool same = a.empirical_variance == b.empirical_variance && a.ks_statistic == b.ks_statistic;
  fs::remove_all(root);
  return {ran && mismatches == 0 && same && files > 0,
          std::to_string(commands.size()) + " commands at --workers 1 and " + std::to_string(alternatives[1]) + ": " +
              std::to_string(files) + " files, " + std::to_string(mismatches) +
              " differ (execution line excluded), exit codes and diagnostics compared; library WIP identical: " + (same ? "yes" : "no") +
              (ran ? "" : "; failed runs:" + failures)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthomart acceptance run"};
  Context ctx;
  std::set<int> only;
  std::string report_path;
  app.add_option("--seed", ctx.seed, "seed for random test fields and simulations");
  app.add_option("--workers", ctx.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--report", report_path, "also write the verdict lines, without timings, to this file");
  CLI11_PARSE(app, argc, argv);

  // Criterion 2 compares two forms that agree only for adapted fields; its
  // non-adapted half is reported as measured.
  const std::set<int> known_red{2};

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome(Context&)> run;
    double time_limit;  // seconds, 0 for none
  };
  const std::vector<Criterion> criteria{
      {1, "round-trip decomposition", round_trip, 30.0},
      {2, "Heyde orthant form equals subset-pair form", condition_equivalence, 0.0},
      {3, "g_S norm identity", norm_identity, 0.0},
      {4, "worked values", worked_values, 0.0},
      {5, "dyadic spikes: weighted sum converges, Gordin sum diverges", dyadic_spikes, 5.0},
      {6, "harmonic edge: series verdicts", harmonic_edge, 0.0},
      {7, "tail-square and Gordin chain inequalities", tail_inequalities, 0.0},
      {8, "pointwise decomposition residual", pointwise, 0.0},
      {9, "invariance principle at desk scale", wip, 120.0},
      {10, "orthomartingale moment bound", moments, 0.0},
      {11, "norm, tail and Orlicz bounds", tails, 0.0},
      {12, "determinism across worker counts", determinism, 0.0},
  };

  build_fields(ctx);
  std::cout << "orthomart acceptance: seed " << ctx.seed << ", workers " << ctx.workers << "\n";
  std::vector<int> failed, unexpected;
  std::ostringstream report;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += "; runtime limit " + g(c.time_limit) + " s exceeded";
    }
    const std::string verdict = std::string(o.pass ? "PASS" : "FAIL") + "  [" + std::to_string(c.id) + "] " + c.name +
                                ": " + o.detail;
    const std::string red = o.pass || !known_red.count(c.id) ? "" : "  [known red]";
    report << verdict << red << '\n';
    std::cout << verdict << " (" << g(secs, 3) << " s"
              << (c.time_limit > 0.0 ? ", limit " + g(c.time_limit) + " s" : "") << ")" << red << std::endl;
    if (!o.pass) {
      failed.push_back(c.id);
      if (!known_red.count(c.id)) unexpected.push_back(c.id);
    }
  }
  std::cout << "summary: " << failed.size() << " failed";
  for (int id : failed) std::cout << ' ' << id;
  std::cout << "; unexpected failures: " << unexpected.size();
  for (int id : unexpected) std::cout << ' ' << id;
  std::cout << "\n";
  if (!report_path.empty()) std::ofstream(report_path, std::ios::binary) << report.str();
  return unexpected.empty() ? 0 : 1;
}
