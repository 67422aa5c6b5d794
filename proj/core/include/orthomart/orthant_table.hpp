#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "orthomart/coefficient_field.hpp"

namespace orthomart {

/// How one axis enters an orthant sum.
enum class AxisMode {
  marginal,  ///< summed over all of Z; the query coordinate is ignored
  at_least,  ///< i_q >= j_q
  at_most,   ///< i_q <= j_q
};

/// Inclusive integer range of query coordinates. The int64 extremes mean "unbounded".
struct IndexRange {
  std::int64_t lo = std::numeric_limits<std::int64_t>::min();
  std::int64_t hi = std::numeric_limits<std::int64_t>::max();

  static IndexRange everything() { return {}; }
  static IndexRange from(std::int64_t lo) { return {lo, std::numeric_limits<std::int64_t>::max()}; }
  static IndexRange up_to(std::int64_t hi) { return {std::numeric_limits<std::int64_t>::min(), hi}; }
};

/// What a table cell accumulates.
enum class TableValues {
  per_channel,     ///< one running sum per channel of a_{k,i}
  pooled_squares,  ///< a single running sum of sum_k a_{k,i}^2
};

inline constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 26;

/// Orthant sums of a sparse field over coordinate-compressed cells.
///
/// Along each non-marginal axis the query j -> sum over {i_q >= j_q} (or <=) is
/// a step function whose breakpoints are the distinct support coordinates, so
/// all orthant sums live on a dense grid of prod_q (#distinct coords on q)
/// cells. Sums over huge or exponentially spread index ranges then cost one
/// pass over that grid, with the number of integer points per cell carried as a
/// multiplicity. Iteration order is fixed, so reductions are reproducible.
class OrthantTable {
 public:
  OrthantTable(const CoefficientField& field, std::span<const AxisMode> modes,
               TableValues values = TableValues::per_channel, std::size_t cell_budget = kDefaultCellBudget);

  std::size_t dimension() const noexcept { return modes_.size(); }
  /// Values per cell: the channel count, or 1 for pooled squares.
  std::size_t width() const noexcept { return width_; }
  std::size_t cell_count() const noexcept { return cell_count_; }

  /// Orthant sums at query point j; coordinates on marginal axes are ignored.
  void query(const MultiIndex& j, std::span<double> out) const;
  std::vector<double> query(const MultiIndex& j) const;

  using CellVisitor = std::function<void(double multiplicity, std::span<const double> values)>;
  /// Visits every cell hit by some query point inside `ranges` (one entry per
  /// axis, ignored on marginal axes), with the number of such points. Cells
  /// whose orthant is empty are skipped. Throws DomainError if a visited cell
  /// would have infinitely many points.
  void for_each_cell(std::span<const IndexRange> ranges, const CellVisitor& visit) const;

  /// sum over query points j in `ranges` of term(orthant sums at j).
  double accumulate(std::span<const IndexRange> ranges,
                    const std::function<double(std::span<const double>)>& term) const;

  using PointVisitor = std::function<void(const MultiIndex& j, std::span<const double> values)>;
  /// Enumerates the individual query points (marginal coordinates set to 0)
  /// whose orthant is nonempty, in lexicographic order.
  void for_each_point(std::span<const IndexRange> ranges, const PointVisitor& visit) const;

 private:
  struct Interval {
    std::size_t cell;
    std::int64_t lo;
    std::int64_t hi;
  };
  std::vector<Interval> intervals(std::size_t slot, IndexRange range) const;
  std::size_t locate(std::size_t slot, std::int64_t j, bool& empty) const;

  std::vector<AxisMode> modes_;
  std::vector<std::size_t> axes_;                       // non-marginal axes
  std::vector<std::vector<std::int64_t>> breakpoints_;  // per non-marginal axis
  std::vector<std::size_t> strides_;
  std::size_t width_ = 1;
  std::size_t cell_count_ = 0;
  std::vector<double> data_;
};

}  // namespace orthomart
