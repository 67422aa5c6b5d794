#include "orthomart/fieldsim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "orthomart/errors.hpp"
#include "orthomart/numerics.hpp"

namespace orthomart {

std::string to_string(InnovationLaw law) {
  switch (law) {
    case InnovationLaw::rademacher: return "rademacher";
    case InnovationLaw::gaussian: return "gaussian";
    case InnovationLaw::uniform: return "uniform";
  }
  return "unknown";
}

InnovationLaw parse_innovation_law(const std::string& name) {
  if (name == "rademacher") return InnovationLaw::rademacher;
  if (name == "gaussian" || name == "normal") return InnovationLaw::gaussian;
  if (name == "uniform") return InnovationLaw::uniform;
  throw DomainError("unknown innovation law '" + name + "'");
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t site_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t channel, const MultiIndex& site) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ stream);
  h = mix(h ^ channel);
  for (auto c : site.coords()) h = mix(h ^ static_cast<std::uint64_t>(c));
  return h;
}

double to_open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

double draw(InnovationLaw law, std::uint64_t key) {
  switch (law) {
    case InnovationLaw::rademacher: return (mix(key) >> 63) ? 1.0 : -1.0;
    case InnovationLaw::uniform: return std::numbers::sqrt3 * (2.0 * to_open_unit(mix(key)) - 1.0);
    case InnovationLaw::gaussian: {
      const double u1 = to_open_unit(mix(key));
      const double u2 = to_open_unit(mix(key ^ kGolden));
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
  }
  return 0.0;
}

// Calls row(first_site, length) for each line of `box` along its last axis,
// for rows in [begin, end) of the row enumeration.
template <class Row>
void for_rows(const Box& box, std::uint64_t begin, std::uint64_t end, Row row) {
  const std::size_t d = box.dimension();
  const std::int64_t len = box.extent(d - 1);
  for (std::uint64_t r = begin; r < end; ++r) {
    MultiIndex site = box.site_at(r * static_cast<std::uint64_t>(len));
    row(site, len);
  }
}

std::uint64_t row_count(const Box& box) {
  if (box.empty()) return 0;
  return box.volume() / static_cast<std::uint64_t>(box.extent(box.dimension() - 1));
}

void parallel_rows(const Box& box, unsigned workers, const std::function<void(std::uint64_t, std::uint64_t)>& body) {
  const std::uint64_t rows = row_count(box);
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(rows, 1))));
  parallel_for(w, w, [&](std::size_t t) {
    const std::uint64_t b = rows * t / w;
    const std::uint64_t e = rows * (t + 1) / w;
    body(b, e);
  });
}

}  // namespace

double innovation(InnovationLaw law, std::uint64_t seed, std::uint64_t stream, std::size_t channel,
                  const MultiIndex& site) {
  return draw(law, site_key(seed, stream, channel, site));
}

double uniform_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t key, std::uint64_t draw_index) {
  return to_open_unit(mix(mix(mix(mix(seed) ^ stream) ^ key) ^ draw_index));
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t w = std::clamp<std::size_t>(workers, 1, count);
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      const std::size_t b = count * t / w;
      const std::size_t e = count * (t + 1) / w;
      try {
        for (std::size_t i = b; i < e; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

double SampleLattice::at(std::size_t channel, const MultiIndex& site) const {
  return values[channel * box.volume() + box.offset(site)];
}

SampleLattice sample_innovations(const InnovationModel& model, const Box& box, std::uint64_t seed,
                                 std::uint64_t stream, unsigned workers, std::size_t memory_budget) {
  if (box.empty()) throw DomainError("cannot sample innovations on an empty box");
  if (model.channels == 0) throw DomainError("innovation model needs at least one channel");
  const double bytes = static_cast<double>(box.volume()) * static_cast<double>(model.channels) * sizeof(double);
  if (bytes > static_cast<double>(memory_budget)) {
    throw ResourceError("innovation lattice needs " + std::to_string(bytes) + " bytes, budget is " +
                        std::to_string(memory_budget));
  }
  SampleLattice s{model, box, seed, stream, {}};
  const std::uint64_t volume = box.volume();
  s.values.resize(volume * model.channels);
  parallel_rows(box, workers, [&](std::uint64_t b, std::uint64_t e) {
    for_rows(box, b, e, [&](MultiIndex site, std::int64_t len) {
      const std::uint64_t base = box.offset(site);
      const std::size_t last = box.dimension() - 1;
      for (std::int64_t t = 0; t < len; ++t) {
        for (std::size_t k = 0; k < model.channels; ++k) {
          s.values[k * volume + base + static_cast<std::uint64_t>(t)] = innovation(model.law, seed, stream, k, site);
        }
        ++site[last];
      }
    });
  });
  return s;
}

Box required_sample_box(const CoefficientField& field, const Box& eval_box) {
  const auto support = field.support_box();
  if (!support) return eval_box;
  return Box{eval_box.lo - support->hi, eval_box.hi - support->lo};
}

ValueGrid evaluate_field(const CoefficientField& field, const SampleLattice& sample, const Box& eval_box,
                         unsigned workers) {
  if (field.dimension() != eval_box.dimension() || sample.box.dimension() != eval_box.dimension()) {
    throw DimensionError("field, sample and evaluation box must share a dimension");
  }
  if (field.channel_count() > sample.model.channels) {
    throw DimensionError("field has more channels than the innovation model");
  }
  ValueGrid grid{eval_box, std::vector<double>(eval_box.empty() ? 0 : eval_box.volume(), 0.0)};
  if (eval_box.empty() || field.empty()) return grid;
  const Box need = required_sample_box(field, eval_box);
  if (!sample.box.contains(need)) throw MarginError("innovation sample does not cover the field support margin");

  const std::uint64_t volume = sample.box.volume();
  parallel_rows(eval_box, workers, [&](std::uint64_t b, std::uint64_t e) {
    for_rows(eval_box, b, e, [&](const MultiIndex& start, std::int64_t len) {
      double* out = grid.values.data() + eval_box.offset(start);
      for (std::size_t k = 0; k < field.channel_count(); ++k) {
        const double* innov = sample.values.data() + k * volume;
        for (const auto& [j, a] : field.channel(k)) {
          const double* src = innov + sample.box.offset(start - j);
          for (std::int64_t t = 0; t < len; ++t) out[t] += a * src[t];
        }
      }
    });
  });
  return grid;
}

Box required_sample_box(const CoefficientField& field, const Decomposition& dec, const Box& eval_box) {
  Box need = required_sample_box(field, eval_box);
  for (const auto& [mask, g] : dec.parts) {
    Box dilated = eval_box;
    for (std::size_t q = 0; q < eval_box.dimension(); ++q) {
      if (!mask.contains(q)) dilated.hi[q] += 1;
    }
    const Box part = required_sample_box(g, dilated);
    for (std::size_t q = 0; q < eval_box.dimension(); ++q) {
      need.lo[q] = std::min(need.lo[q], part.lo[q]);
      need.hi[q] = std::max(need.hi[q], part.hi[q]);
    }
  }
  return need;
}

double verify_pointwise(const CoefficientField& field, const Decomposition& dec, const SampleLattice& sample,
                        const Box& eval_box, unsigned workers) {
  if (dec.dimension != field.dimension()) throw DimensionError("decomposition and field differ in dimension");
  if (eval_box.empty()) return 0.0;
  const ValueGrid f = evaluate_field(field, sample, eval_box, workers);
  std::vector<double> total(f.values.size(), 0.0);
  const std::size_t d = eval_box.dimension();
  for (const auto& [mask, g] : dec.parts) {
    Box dilated = eval_box;
    for (std::size_t q = 0; q < d; ++q) {
      if (!mask.contains(q)) dilated.hi[q] += 1;
    }
    const ValueGrid big = evaluate_field(g, sample, dilated, workers);
    // Differences along S^c on the realized grid, one axis at a time.
    std::vector<double> cur = big.values;
    Box box = dilated;
    for (std::size_t q = 0; q < d; ++q) {
      if (mask.contains(q)) continue;
      Box next = box;
      next.hi[q] -= 1;
      std::vector<double> out(next.volume());
      for (std::uint64_t off = 0; off < out.size(); ++off) {
        const MultiIndex t = next.site_at(off);
        MultiIndex up = t;
        up[q] += 1;
        out[off] = cur[box.offset(t)] - cur[box.offset(up)];
      }
      cur = std::move(out);
      box = next;
    }
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += cur[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < total.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - total[i]));
  return worst;
}

std::vector<PartialSumGrid> partial_sums(const CoefficientField& field, const InnovationModel& model,
                                         const MultiIndex& n, std::size_t replications, std::uint64_t seed,
                                         unsigned workers) {
  if (n.dimension() != field.dimension()) throw DimensionError("block size and field differ in dimension");
  for (std::size_t q = 0; q < n.dimension(); ++q) {
    if (n[q] < 1) throw DomainError("block sizes must be >= 1");
  }
  const Box eval{MultiIndex::filled(n.dimension(), 1), n};
  const Box need = required_sample_box(field, eval);
  std::vector<PartialSumGrid> out(replications);
  parallel_for(replications, workers, [&](std::size_t r) {
    const auto sample = sample_innovations(model, need, seed, r);
    const auto grid = evaluate_field(field, sample, eval);
    CompensatedSum s;
    for (double v : grid.values) s += v;
    out[r] = PartialSumGrid{n, s.value(), r};
  });
  return out;
}

}  // namespace orthomart
