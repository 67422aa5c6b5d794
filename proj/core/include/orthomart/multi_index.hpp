#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace orthomart {

/// Largest ambient dimension supported. Subset enumeration is 2^d and the
/// decomposition touches 3^d orthant patterns, so this is not a practical limit.
inline constexpr std::size_t kMaxDimension = 8;

/// A point of Z^d. Axes are 0-based in the API; axis q here is the 1-based
/// axis q+1 in external formats (subset bitstrings, CLI).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dimension);
  MultiIndex(std::initializer_list<std::int64_t> coords);
  explicit MultiIndex(std::span<const std::int64_t> coords);

  static MultiIndex zero(std::size_t dimension) { return MultiIndex(dimension); }
  static MultiIndex filled(std::size_t dimension, std::int64_t value);
  static MultiIndex unit(std::size_t dimension, std::size_t axis);

  std::size_t dimension() const noexcept { return dim_; }
  std::int64_t operator[](std::size_t axis) const noexcept { return coords_[axis]; }
  std::int64_t& operator[](std::size_t axis) noexcept { return coords_[axis]; }
  std::span<const std::int64_t> coords() const noexcept { return {coords_.data(), dim_}; }

  /// Every coordinate >= 0, i.e. the index lies in the nonnegative orthant.
  bool is_nonnegative() const noexcept;

  MultiIndex& operator+=(const MultiIndex& other);
  MultiIndex& operator-=(const MultiIndex& other);
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }
  MultiIndex operator-() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept;
  /// Lexicographic order (dimension first); used for deterministic storage order.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) noexcept;

  std::string to_string() const;

 private:
  std::array<std::int64_t, kMaxDimension> coords_{};
  std::size_t dim_ = 0;
};

/// The componentwise partial order: a <= b iff a_q <= b_q for every q.
bool componentwise_le(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& index) const noexcept;
};

/// A subset S of the axes {0, ..., d-1}.
class SubsetMask {
 public:
  SubsetMask() = default;
  SubsetMask(std::size_t dimension, std::uint32_t bits);

  static SubsetMask empty(std::size_t dimension) { return {dimension, 0u}; }
  static SubsetMask full(std::size_t dimension);
  static SubsetMask from_axes(std::size_t dimension, std::initializer_list<std::size_t> axes);
  /// Parses the bitstring form: character q is '1' iff axis q is in S ("110" = axes {0,1} for d=3).
  static SubsetMask parse(const std::string& bitstring);
  /// All 2^d subsets in increasing bit order.
  static std::vector<SubsetMask> all(std::size_t dimension);

  std::size_t dimension() const noexcept { return dim_; }
  std::uint32_t bits() const noexcept { return bits_; }
  bool contains(std::size_t axis) const noexcept { return (bits_ >> axis) & 1u; }
  std::size_t size() const noexcept;
  SubsetMask complement() const;
  /// Subsets of this mask, including the empty set and the mask itself.
  std::vector<SubsetMask> subsets() const;
  std::vector<std::size_t> axes() const;

  std::string to_string() const;

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;
  friend auto operator<=>(const SubsetMask&, const SubsetMask&) = default;

 private:
  std::size_t dim_ = 0;
  std::uint32_t bits_ = 0;
};

/// An axis-aligned integer box [lo, hi] (inclusive on every axis).
struct Box {
  MultiIndex lo;
  MultiIndex hi;

  std::size_t dimension() const noexcept { return lo.dimension(); }
  bool empty() const;
  /// Number of sites; 0 for an empty box.
  std::uint64_t volume() const;
  bool contains(const MultiIndex& site) const;
  bool contains(const Box& other) const;
  std::int64_t extent(std::size_t axis) const { return hi[axis] - lo[axis] + 1; }
  /// Row-major offset of a site (last axis fastest). Site must be inside.
  std::uint64_t offset(const MultiIndex& site) const;
  MultiIndex site_at(std::uint64_t offset) const;

  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace orthomart
