#pragma once

#include <iosfwd>
#include <map>
#include <utility>

#include "orthomart/coefficient_field.hpp"

namespace orthomart {

/// f = sum_S prod_{q not in S} (I - U_{eps_q}) g_S. The part for the full mask
/// is the martingale part m; the part for the empty mask is the pure coboundary.
struct Decomposition {
  std::size_t dimension = 0;
  std::size_t channels = 1;
  std::map<SubsetMask, CoefficientField> parts;

  /// The stored part, or an empty field of the right shape.
  CoefficientField part(const SubsetMask& mask) const;
};

struct OneDimDecomposition {
  CoefficientField m;  ///< supported at index 0
  CoefficientField g;
};

/// The regular transfer functions. For q outside S the coefficient of g_S at
/// x is sum_{i_q >= x_q} when x_q >= 1 and -sum_{i_q <= x_q - 1} when x_q <= 0;
/// axes in S are summed over all of Z and carry coordinate 0.
Decomposition decompose(const CoefficientField& field);

/// sum_S prod_{q not in S} difference(g_S, q).
CoefficientField reconstruct(const Decomposition& dec);

/// d = 1 only: m = (sum_i a_i) at 0, g_x = sum_{i >= x} a_i for x >= 1 and
/// g_x = -sum_{i <= x-1} a_i for x <= 0.
OneDimDecomposition decompose_1d(const CoefficientField& field);

/// Per mask: the orthogonal closed form of ||g_S||^2 computed from the
/// coefficients of f, and the direct sum of squared coefficients of g_S.
std::map<SubsetMask, std::pair<double, double>> g_norm_identity(const CoefficientField& field,
                                                                const Decomposition& dec);

/// Coordinates on S are 0 for every part; with `adapted_source`, coordinates
/// outside S are also >= 1.
bool satisfies_support_constraint(const Decomposition& dec, bool adapted_source);

/// "# decomposition dimension=d channels=c", then per mask a line "@ <bitstring>"
/// followed by its "k,j_1,...,j_d,value" records.
void write_decomposition(std::ostream& out, const Decomposition& dec);
Decomposition read_decomposition(std::istream& in);

}  // namespace orthomart
