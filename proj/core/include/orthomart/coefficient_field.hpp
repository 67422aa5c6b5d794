#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "orthomart/multi_index.hpp"

namespace orthomart {

/// Sparse coefficients of a regular linear field
///
///     f = sum_k sum_j a_{k,j} U_{-j} e_k
///
/// where e_k are orthonormal martingale-difference innovations. Channel k holds
/// the map j -> a_{k,j}. With this convention U_{eps_q} acts on coefficients as
/// c'_j = c_{j + eps_q}, and a field is adapted iff its support lies in the
/// nonnegative orthant. Exact zeros are never stored.
class CoefficientField {
 public:
  using Channel = std::map<MultiIndex, double>;

  CoefficientField() = default;
  explicit CoefficientField(std::size_t dimension, std::size_t channels = 1);

  /// A single coefficient `value` at `index` on channel 0.
  static CoefficientField delta(const MultiIndex& index, double value = 1.0);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  const Channel& channel(std::size_t k) const { return channels_.at(k); }
  const std::vector<Channel>& channels() const noexcept { return channels_; }

  /// Adds `value` to a_{k,index}; the entry is erased if the result is exactly zero.
  void add(std::size_t k, const MultiIndex& index, double value);
  void set(std::size_t k, const MultiIndex& index, double value);
  double at(std::size_t k, const MultiIndex& index) const;

  bool empty() const noexcept;
  std::size_t nonzero_count() const noexcept;
  /// All stored indices are >= 0 componentwise.
  bool adapted() const noexcept;
  /// sum_k sum_j a_{k,j}^2
  double squared_norm() const;
  /// Smallest box containing the support of every channel; nullopt when empty.
  std::optional<Box> support_box() const;

  /// Entries with |i_q| <= cutoff on every axis.
  CoefficientField truncated(std::int64_t cutoff) const;
  /// Drops entries with |value| <= tolerance.
  CoefficientField pruned(double tolerance) const;
  /// Channel k alone, as a one-channel field.
  CoefficientField channel_field(std::size_t k) const;

  CoefficientField& operator+=(const CoefficientField& other);
  CoefficientField& operator-=(const CoefficientField& other);
  CoefficientField& operator*=(double factor);
  friend CoefficientField operator+(CoefficientField a, const CoefficientField& b) { return a += b; }
  friend CoefficientField operator-(CoefficientField a, const CoefficientField& b) { return a -= b; }
  friend CoefficientField operator*(double factor, CoefficientField a) { return a *= factor; }

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;

 private:
  void check_compatible(const CoefficientField& other) const;

  std::size_t dim_ = 0;
  std::vector<Channel> channels_;
};

/// max over channels and indices of |a - b|; fields must share dimension.
/// Missing channels count as zero.
double max_abs_difference(const CoefficientField& a, const CoefficientField& b);

/// Coefficients of U_v f: output at j equals input at j + v.
CoefficientField shift(const CoefficientField& field, const MultiIndex& v);

/// Coefficients of (I - U_{eps_axis}) f: output at j equals c_j - c_{j + eps_axis}.
CoefficientField difference(const CoefficientField& field, std::size_t axis);

/// Per-axis direction of an orthant sum.
enum class Orientation { at_least, at_most };

/// Per channel: sum of a_{k,i} over stored i with i_q >= j_q on at_least axes
/// and i_q <= j_q on at_most axes.
std::vector<double> orthant_tail(const CoefficientField& field, const MultiIndex& j,
                                 std::span<const Orientation> orientation);

/// One record per nonzero entry, "k,j_1,...,j_d,value", preceded by a
/// "# dimension=d channels=c" header. Values use shortest round-trip formatting.
void write_records(std::ostream& out, const CoefficientField& field);
/// Reads records written by write_records. Lines starting with '#' other than
/// the dimension header are ignored. Throws DomainError on malformed input.
CoefficientField read_records(std::istream& in);
/// Parses records separated by ';' or newlines, e.g. "0,0,1; 0,1,1" (d=1).
CoefficientField parse_records(const std::string& text, std::size_t dimension);

}  // namespace orthomart
