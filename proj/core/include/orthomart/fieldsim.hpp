#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orthomart/coefficient_field.hpp"
#include "orthomart/decomposition.hpp"

namespace orthomart {

/// Unit-variance innovation laws.
enum class InnovationLaw { rademacher, gaussian, uniform };

std::string to_string(InnovationLaw law);
InnovationLaw parse_innovation_law(const std::string& name);

struct InnovationModel {
  InnovationLaw law = InnovationLaw::gaussian;
  std::size_t channels = 1;
};

/// Identifier of the seeding scheme, recorded in every output header.
inline constexpr const char* kSeedingScheme = "splitmix64-site-v1";

/// The innovation e_k(site) of replication `stream`. A pure function of its
/// arguments, so any evaluation order or partition reproduces the same value.
double innovation(InnovationLaw law, std::uint64_t seed, std::uint64_t stream, std::size_t channel,
                  const MultiIndex& site);

/// A uniform draw in (0, 1) from the same counter space, keyed additionally by `draw`.
double uniform_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t key, std::uint64_t draw);

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

/// Innovations on a box, channel-major.
struct SampleLattice {
  InnovationModel model;
  Box box;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> values;

  double at(std::size_t channel, const MultiIndex& site) const;
};

/// Throws ResourceError when the lattice would exceed `memory_budget` bytes
/// and DomainError for an empty box.
SampleLattice sample_innovations(const InnovationModel& model, const Box& box, std::uint64_t seed,
                                 std::uint64_t stream = 0, unsigned workers = 1,
                                 std::size_t memory_budget = kDefaultMemoryBudget);

/// Real values on a box, row-major.
struct ValueGrid {
  Box box;
  std::vector<double> values;

  double at(const MultiIndex& site) const { return values[box.offset(site)]; }
};

/// The smallest sample box from which `field` can be evaluated on `eval_box`.
Box required_sample_box(const CoefficientField& field, const Box& eval_box);

/// X(t) = sum_k sum_j a_{k,j} e_k(t - j) for t in eval_box. Throws MarginError
/// when the sample does not cover the required box.
ValueGrid evaluate_field(const CoefficientField& field, const SampleLattice& sample, const Box& eval_box,
                         unsigned workers = 1);

/// The sample box needed to check a decomposition of `field` on `eval_box`.
Box required_sample_box(const CoefficientField& field, const Decomposition& dec, const Box& eval_box);

/// max over t in eval_box of |f(t) - sum_S (prod_{q not in S} (I - U_q) g_S)(t)|,
/// where (U_q G)(t) = G(t + eps_q) is applied on the realized grids.
double verify_pointwise(const CoefficientField& field, const Decomposition& dec, const SampleLattice& sample,
                        const Box& eval_box, unsigned workers = 1);

/// One realization of S_n = sum_{1 <= i <= n} X(i).
struct PartialSumGrid {
  MultiIndex n;
  double sum = 0.0;
  std::uint64_t replication = 0;
};

/// Independent replications; replication r uses innovation stream r.
std::vector<PartialSumGrid> partial_sums(const CoefficientField& field, const InnovationModel& model,
                                         const MultiIndex& n, std::size_t replications, std::uint64_t seed,
                                         unsigned workers = 1);

/// Runs body(i) for i in [0, count) on up to `workers` threads with a static
/// contiguous partition. The first exception thrown is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace orthomart
