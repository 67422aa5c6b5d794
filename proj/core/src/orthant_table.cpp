#include "orthomart/orthant_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orthomart/errors.hpp"

namespace orthomart {

namespace {

constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
constexpr auto kMax = std::numeric_limits<std::int64_t>::max();

}  // namespace

OrthantTable::OrthantTable(const CoefficientField& field, std::span<const AxisMode> modes, TableValues values,
                           std::size_t cell_budget)
    : modes_(modes.begin(), modes.end()) {
  if (modes.size() != field.dimension()) throw DimensionError("orthant table: one mode per axis required");
  width_ = values == TableValues::per_channel ? field.channel_count() : 1;

  for (std::size_t q = 0; q < modes_.size(); ++q) {
    if (modes_[q] != AxisMode::marginal) axes_.push_back(q);
  }
  breakpoints_.resize(axes_.size());
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    auto& bp = breakpoints_[s];
    for (const auto& ch : field.channels()) {
      for (const auto& entry : ch) bp.push_back(entry.first[axes_[s]]);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  }

  // Row-major over the compressed axes, width_ values innermost.
  strides_.assign(axes_.size(), 0);
  double cells = 1.0;
  std::size_t stride = 1;
  for (std::size_t s = axes_.size(); s-- > 0;) {
    strides_[s] = stride;
    stride *= breakpoints_[s].size();
    cells *= static_cast<double>(breakpoints_[s].size());
  }
  if (cells * static_cast<double>(width_) > static_cast<double>(cell_budget)) {
    throw ResourceError("orthant table needs " + std::to_string(cells * static_cast<double>(width_)) +
                        " values, budget is " + std::to_string(cell_budget));
  }
  cell_count_ = stride;
  data_.assign(cell_count_ * width_, 0.0);

  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [index, a] : field.channel(k)) {
      std::size_t cell = 0;
      for (std::size_t s = 0; s < axes_.size(); ++s) {
        const auto& bp = breakpoints_[s];
        const auto t = static_cast<std::size_t>(std::lower_bound(bp.begin(), bp.end(), index[axes_[s]]) - bp.begin());
        cell += t * strides_[s];
      }
      if (values == TableValues::per_channel) {
        data_[cell * width_ + k] += a;
      } else {
        data_[cell] += a * a;
      }
    }
  }

  // Running sums along every compressed axis turn cell totals into orthant sums.
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    const std::size_t m = breakpoints_[s].size();
    const std::size_t st = strides_[s];
    const bool suffix = modes_[axes_[s]] == AxisMode::at_least;
    for (std::size_t cell = 0; cell < cell_count_; ++cell) {
      const std::size_t t = (cell / st) % m;
      if (suffix ? t + 1 != m : t != 0) continue;
      // `cell` is the first visited element of its line; walk the line.
      for (std::size_t step = 1; step < m; ++step) {
        const std::size_t cur = suffix ? cell - step * st : cell + step * st;
        const std::size_t prev = suffix ? cur + st : cur - st;
        for (std::size_t w = 0; w < width_; ++w) data_[cur * width_ + w] += data_[prev * width_ + w];
      }
    }
  }
}

std::size_t OrthantTable::locate(std::size_t slot, std::int64_t j, bool& empty) const {
  const auto& bp = breakpoints_[slot];
  if (modes_[axes_[slot]] == AxisMode::at_least) {
    const auto it = std::lower_bound(bp.begin(), bp.end(), j);
    empty = it == bp.end();
    return static_cast<std::size_t>(it - bp.begin());
  }
  const auto it = std::upper_bound(bp.begin(), bp.end(), j);
  empty = it == bp.begin();
  return empty ? 0 : static_cast<std::size_t>(it - bp.begin()) - 1;
}

void OrthantTable::query(const MultiIndex& j, std::span<double> out) const {
  if (j.dimension() != dimension()) throw DimensionError("orthant table query dimension mismatch");
  if (out.size() != width_) throw DimensionError("orthant table query output has wrong width");
  std::size_t cell = 0;
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    bool empty = false;
    cell += locate(s, j[axes_[s]], empty) * strides_[s];
    if (empty || breakpoints_[s].empty()) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
  }
  if (cell_count_ == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(cell * width_), width_, out.begin());
}

std::vector<double> OrthantTable::query(const MultiIndex& j) const {
  std::vector<double> out(width_);
  query(j, out);
  return out;
}

std::vector<OrthantTable::Interval> OrthantTable::intervals(std::size_t slot, IndexRange range) const {
  std::vector<Interval> out;
  const auto& bp = breakpoints_[slot];
  const std::size_t m = bp.size();
  const bool at_least = modes_[axes_[slot]] == AxisMode::at_least;
  for (std::size_t t = 0; t < m; ++t) {
    // Query points mapping to breakpoint t.
    std::int64_t lo, hi;
    if (at_least) {
      lo = t == 0 ? kMin : bp[t - 1] + 1;
      hi = bp[t];
    } else {
      lo = bp[t];
      hi = t + 1 == m ? kMax : bp[t + 1] - 1;
    }
    lo = std::max(lo, range.lo);
    hi = std::min(hi, range.hi);
    if (lo > hi) continue;
    if (lo == kMin || hi == kMax) {
      throw DomainError("orthant sum over an unbounded range of query points with a nonempty orthant");
    }
    out.push_back({t, lo, hi});
  }
  return out;
}

void OrthantTable::for_each_cell(std::span<const IndexRange> ranges, const CellVisitor& visit) const {
  if (ranges.size() != dimension()) throw DimensionError("orthant table: one range per axis required");
  if (cell_count_ == 0) return;
  std::vector<std::vector<Interval>> per_axis(axes_.size());
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    per_axis[s] = intervals(s, ranges[axes_[s]]);
    if (per_axis[s].empty()) return;
  }
  const std::span<const double> all(data_);
  auto recurse = [&](auto&& self, std::size_t s, std::size_t cell, double mult) -> void {
    if (s == axes_.size()) {
      visit(mult, all.subspan(cell * width_, width_));
      return;
    }
    for (const auto& iv : per_axis[s]) {
      const double count = static_cast<double>(iv.hi) - static_cast<double>(iv.lo) + 1.0;
      self(self, s + 1, cell + iv.cell * strides_[s], mult * count);
    }
  };
  recurse(recurse, 0, 0, 1.0);
}

double OrthantTable::accumulate(std::span<const IndexRange> ranges,
                                const std::function<double(std::span<const double>)>& term) const {
  double total = 0.0;
  for_each_cell(ranges, [&](double mult, std::span<const double> values) { total += mult * term(values); });
  return total;
}

void OrthantTable::for_each_point(std::span<const IndexRange> ranges, const PointVisitor& visit) const {
  if (ranges.size() != dimension()) throw DimensionError("orthant table: one range per axis required");
  if (cell_count_ == 0) return;
  std::vector<std::vector<Interval>> per_axis(axes_.size());
  for (std::size_t s = 0; s < axes_.size(); ++s) {
    per_axis[s] = intervals(s, ranges[axes_[s]]);
    if (per_axis[s].empty()) return;
  }
  const std::span<const double> all(data_);
  MultiIndex j(dimension());
  auto recurse = [&](auto&& self, std::size_t s, std::size_t cell) -> void {
    if (s == axes_.size()) {
      visit(j, all.subspan(cell * width_, width_));
      return;
    }
    for (const auto& iv : per_axis[s]) {
      for (std::int64_t x = iv.lo;; ++x) {
        j[axes_[s]] = x;
        self(self, s + 1, cell + iv.cell * strides_[s]);
        if (x == iv.hi) break;
      }
    }
  };
  recurse(recurse, 0, 0);
}

}  // namespace orthomart
