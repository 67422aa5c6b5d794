#include "orthomart/multi_index.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "orthomart/errors.hpp"

namespace orthomart {

namespace {

void check_dimension(std::size_t dimension) {
  if (dimension == 0 || dimension > kMaxDimension) {
    throw DimensionError("dimension must be in [1, " + std::to_string(kMaxDimension) +
                         "], got " + std::to_string(dimension));
  }
}

}  // namespace

MultiIndex::MultiIndex(std::size_t dimension) : dim_(dimension) { check_dimension(dimension); }

MultiIndex::MultiIndex(std::initializer_list<std::int64_t> coords)
    : MultiIndex(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

MultiIndex::MultiIndex(std::span<const std::int64_t> coords) : dim_(coords.size()) {
  check_dimension(dim_);
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

MultiIndex MultiIndex::filled(std::size_t dimension, std::int64_t value) {
  MultiIndex index(dimension);
  std::fill_n(index.coords_.begin(), dimension, value);
  return index;
}

MultiIndex MultiIndex::unit(std::size_t dimension, std::size_t axis) {
  if (axis >= dimension) {
    throw DomainError("axis " + std::to_string(axis) + " out of range for dimension " +
                      std::to_string(dimension));
  }
  MultiIndex index(dimension);
  index.coords_[axis] = 1;
  return index;
}

bool MultiIndex::is_nonnegative() const noexcept {
  return std::all_of(coords_.begin(), coords_.begin() + dim_, [](std::int64_t c) { return c >= 0; });
}

MultiIndex& MultiIndex::operator+=(const MultiIndex& other) {
  if (other.dim_ != dim_) throw DimensionError("multi-index dimension mismatch");
  for (std::size_t q = 0; q < dim_; ++q) coords_[q] += other.coords_[q];
  return *this;
}

MultiIndex& MultiIndex::operator-=(const MultiIndex& other) {
  if (other.dim_ != dim_) throw DimensionError("multi-index dimension mismatch");
  for (std::size_t q = 0; q < dim_; ++q) coords_[q] -= other.coords_[q];
  return *this;
}

MultiIndex MultiIndex::operator-() const {
  MultiIndex out = *this;
  for (std::size_t q = 0; q < dim_; ++q) out.coords_[q] = -out.coords_[q];
  return out;
}

bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept {
  return a.dim_ == b.dim_ && std::equal(a.coords_.begin(), a.coords_.begin() + a.dim_, b.coords_.begin());
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) noexcept {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (std::size_t q = 0; q < a.dim_; ++q) {
    if (auto c = a.coords_[q] <=> b.coords_[q]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string MultiIndex::to_string() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t q = 0; q < dim_; ++q) {
    if (q) out << ',';
    out << coords_[q];
  }
  out << ')';
  return out.str();
}

bool componentwise_le(const MultiIndex& a, const MultiIndex& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("multi-index dimension mismatch");
  for (std::size_t q = 0; q < a.dimension(); ++q) {
    if (a[q] > b[q]) return false;
  }
  return true;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& index) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ index.dimension();
  for (auto c : index.coords()) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

SubsetMask::SubsetMask(std::size_t dimension, std::uint32_t bits) : dim_(dimension), bits_(bits) {
  check_dimension(dimension);
  if (bits >> dimension) throw DomainError("subset mask has bits beyond the dimension");
}

SubsetMask SubsetMask::full(std::size_t dimension) {
  check_dimension(dimension);
  return {dimension, (1u << dimension) - 1u};
}

SubsetMask SubsetMask::from_axes(std::size_t dimension, std::initializer_list<std::size_t> axes) {
  std::uint32_t bits = 0;
  for (auto axis : axes) {
    if (axis >= dimension) throw DomainError("axis out of range in subset");
    bits |= 1u << axis;
  }
  return {dimension, bits};
}

SubsetMask SubsetMask::parse(const std::string& bitstring) {
  std::uint32_t bits = 0;
  for (std::size_t q = 0; q < bitstring.size(); ++q) {
    if (bitstring[q] == '1') {
      bits |= 1u << q;
    } else if (bitstring[q] != '0') {
      throw DomainError("subset bitstring must contain only 0/1: '" + bitstring + "'");
    }
  }
  return {bitstring.size(), bits};
}

std::vector<SubsetMask> SubsetMask::all(std::size_t dimension) {
  check_dimension(dimension);
  std::vector<SubsetMask> out;
  out.reserve(std::size_t{1} << dimension);
  for (std::uint32_t bits = 0; bits < (1u << dimension); ++bits) out.emplace_back(dimension, bits);
  return out;
}

std::size_t SubsetMask::size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

SubsetMask SubsetMask::complement() const { return {dim_, ((1u << dim_) - 1u) & ~bits_}; }

std::vector<SubsetMask> SubsetMask::subsets() const {
  std::vector<SubsetMask> out;
  // Standard submask enumeration, then sorted so the order is increasing.
  std::uint32_t sub = bits_;
  while (true) {
    out.emplace_back(dim_, sub);
    if (sub == 0) break;
    sub = (sub - 1) & bits_;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SubsetMask::axes() const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < dim_; ++q) {
    if (contains(q)) out.push_back(q);
  }
  return out;
}

std::string SubsetMask::to_string() const {
  std::string out(dim_, '0');
  for (std::size_t q = 0; q < dim_; ++q) {
    if (contains(q)) out[q] = '1';
  }
  return out;
}

bool Box::empty() const {
  for (std::size_t q = 0; q < dimension(); ++q) {
    if (hi[q] < lo[q]) return true;
  }
  return false;
}

std::uint64_t Box::volume() const {
  if (dimension() == 0 || empty()) return 0;
  std::uint64_t v = 1;
  for (std::size_t q = 0; q < dimension(); ++q) v *= static_cast<std::uint64_t>(extent(q));
  return v;
}

bool Box::contains(const MultiIndex& site) const {
  if (site.dimension() != dimension()) throw DimensionError("site dimension does not match box");
  for (std::size_t q = 0; q < dimension(); ++q) {
    if (site[q] < lo[q] || site[q] > hi[q]) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.empty()) return true;
  return contains(other.lo) && contains(other.hi);
}

std::uint64_t Box::offset(const MultiIndex& site) const {
  std::uint64_t off = 0;
  for (std::size_t q = 0; q < dimension(); ++q) {
    off = off * static_cast<std::uint64_t>(extent(q)) + static_cast<std::uint64_t>(site[q] - lo[q]);
  }
  return off;
}

MultiIndex Box::site_at(std::uint64_t offset) const {
  MultiIndex site(dimension());
  for (std::size_t q = dimension(); q-- > 0;) {
    const auto ext = static_cast<std::uint64_t>(extent(q));
    site[q] = lo[q] + static_cast<std::int64_t>(offset % ext);
    offset /= ext;
  }
  return site;
}

}  // namespace orthomart
