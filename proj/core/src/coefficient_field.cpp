#include "orthomart/coefficient_field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "orthomart/errors.hpp"
#include "orthomart/format.hpp"

namespace orthomart {

CoefficientField::CoefficientField(std::size_t dimension, std::size_t channels)
    : dim_(dimension), channels_(channels) {
  if (dimension == 0 || dimension > kMaxDimension) throw DimensionError("field dimension out of range");
  if (channels == 0) throw DomainError("a field needs at least one channel");
}

CoefficientField CoefficientField::delta(const MultiIndex& index, double value) {
  CoefficientField field(index.dimension());
  field.add(0, index, value);
  return field;
}

void CoefficientField::add(std::size_t k, const MultiIndex& index, double value) {
  if (index.dimension() != dim_) {
    throw DimensionError("index " + index.to_string() + " does not have dimension " + std::to_string(dim_));
  }
  if (k >= channels_.size()) throw DomainError("channel " + std::to_string(k) + " out of range");
  if (value == 0.0) return;
  auto& ch = channels_[k];
  auto [it, inserted] = ch.try_emplace(index, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) ch.erase(it);
  }
}

void CoefficientField::set(std::size_t k, const MultiIndex& index, double value) {
  if (index.dimension() != dim_) throw DimensionError("index dimension mismatch");
  if (k >= channels_.size()) throw DomainError("channel out of range");
  if (value == 0.0) {
    channels_[k].erase(index);
  } else {
    channels_[k][index] = value;
  }
}

double CoefficientField::at(std::size_t k, const MultiIndex& index) const {
  if (k >= channels_.size()) return 0.0;
  auto it = channels_[k].find(index);
  return it == channels_[k].end() ? 0.0 : it->second;
}

bool CoefficientField::empty() const noexcept {
  return std::all_of(channels_.begin(), channels_.end(), [](const Channel& c) { return c.empty(); });
}

std::size_t CoefficientField::nonzero_count() const noexcept {
  std::size_t n = 0;
  for (const auto& ch : channels_) n += ch.size();
  return n;
}

bool CoefficientField::adapted() const noexcept {
  for (const auto& ch : channels_) {
    for (const auto& [index, value] : ch) {
      if (!index.is_nonnegative()) return false;
    }
  }
  return true;
}

double CoefficientField::squared_norm() const {
  double total = 0.0;
  for (const auto& ch : channels_) {
    for (const auto& [index, value] : ch) total += value * value;
  }
  return total;
}

std::optional<Box> CoefficientField::support_box() const {
  std::optional<Box> box;
  for (const auto& ch : channels_) {
    for (const auto& [index, value] : ch) {
      if (!box) {
        box = Box{index, index};
        continue;
      }
      for (std::size_t q = 0; q < dim_; ++q) {
        box->lo[q] = std::min(box->lo[q], index[q]);
        box->hi[q] = std::max(box->hi[q], index[q]);
      }
    }
  }
  return box;
}

CoefficientField CoefficientField::truncated(std::int64_t cutoff) const {
  CoefficientField out(dim_, channels_.size());
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    for (const auto& [index, value] : channels_[k]) {
      const auto c = index.coords();
      if (std::all_of(c.begin(), c.end(), [&](std::int64_t x) { return x >= -cutoff && x <= cutoff; })) {
        out.channels_[k].emplace_hint(out.channels_[k].end(), index, value);
      }
    }
  }
  return out;
}

CoefficientField CoefficientField::pruned(double tolerance) const {
  CoefficientField out(dim_, channels_.size());
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    for (const auto& [index, value] : channels_[k]) {
      if (std::abs(value) > tolerance) out.channels_[k].emplace_hint(out.channels_[k].end(), index, value);
    }
  }
  return out;
}

CoefficientField CoefficientField::channel_field(std::size_t k) const {
  CoefficientField out(dim_, 1);
  out.channels_[0] = channels_.at(k);
  return out;
}

void CoefficientField::check_compatible(const CoefficientField& other) const {
  if (other.dim_ != dim_) throw DimensionError("field dimension mismatch");
}

CoefficientField& CoefficientField::operator+=(const CoefficientField& other) {
  if (dim_ == 0) {
    *this = other;
    return *this;
  }
  check_compatible(other);
  if (other.channels_.size() > channels_.size()) channels_.resize(other.channels_.size());
  for (std::size_t k = 0; k < other.channels_.size(); ++k) {
    for (const auto& [index, value] : other.channels_[k]) add(k, index, value);
  }
  return *this;
}

CoefficientField& CoefficientField::operator-=(const CoefficientField& other) {
  if (dim_ == 0) {
    *this = CoefficientField(other.dim_, other.channels_.size());
  }
  check_compatible(other);
  if (other.channels_.size() > channels_.size()) channels_.resize(other.channels_.size());
  for (std::size_t k = 0; k < other.channels_.size(); ++k) {
    for (const auto& [index, value] : other.channels_[k]) add(k, index, -value);
  }
  return *this;
}

CoefficientField& CoefficientField::operator*=(double factor) {
  if (factor == 0.0) {
    for (auto& ch : channels_) ch.clear();
    return *this;
  }
  for (auto& ch : channels_) {
    for (auto it = ch.begin(); it != ch.end();) {
      it->second *= factor;
      it = it->second == 0.0 ? ch.erase(it) : std::next(it);
    }
  }
  return *this;
}

double max_abs_difference(const CoefficientField& a, const CoefficientField& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("field dimension mismatch");
  double worst = 0.0;
  const std::size_t channels = std::max(a.channel_count(), b.channel_count());
  static const CoefficientField::Channel kEmpty;
  for (std::size_t k = 0; k < channels; ++k) {
    const auto& ca = k < a.channel_count() ? a.channel(k) : kEmpty;
    const auto& cb = k < b.channel_count() ? b.channel(k) : kEmpty;
    auto ia = ca.begin();
    auto ib = cb.begin();
    while (ia != ca.end() || ib != cb.end()) {
      if (ib == cb.end() || (ia != ca.end() && ia->first < ib->first)) {
        worst = std::max(worst, std::abs(ia->second));
        ++ia;
      } else if (ia == ca.end() || ib->first < ia->first) {
        worst = std::max(worst, std::abs(ib->second));
        ++ib;
      } else {
        worst = std::max(worst, std::abs(ia->second - ib->second));
        ++ia;
        ++ib;
      }
    }
  }
  return worst;
}

CoefficientField shift(const CoefficientField& field, const MultiIndex& v) {
  if (v.dimension() != field.dimension()) throw DimensionError("shift vector dimension mismatch");
  CoefficientField out(field.dimension(), field.channel_count());
  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [index, value] : field.channel(k)) out.add(k, index - v, value);
  }
  return out;
}

CoefficientField difference(const CoefficientField& field, std::size_t axis) {
  if (axis >= field.dimension()) {
    throw DomainError("difference axis " + std::to_string(axis) + " out of range for dimension " +
                      std::to_string(field.dimension()));
  }
  const auto step = MultiIndex::unit(field.dimension(), axis);
  CoefficientField out(field.dimension(), field.channel_count());
  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [index, value] : field.channel(k)) {
      out.add(k, index, value);
      out.add(k, index - step, -value);
    }
  }
  return out;
}

std::vector<double> orthant_tail(const CoefficientField& field, const MultiIndex& j,
                                 std::span<const Orientation> orientation) {
  if (j.dimension() != field.dimension() || orientation.size() != field.dimension()) {
    throw DimensionError("orthant_tail: index/orientation dimension mismatch");
  }
  std::vector<double> out(field.channel_count(), 0.0);
  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [index, value] : field.channel(k)) {
      bool inside = true;
      for (std::size_t q = 0; q < field.dimension() && inside; ++q) {
        inside = orientation[q] == Orientation::at_least ? index[q] >= j[q] : index[q] <= j[q];
      }
      if (inside) out[k] += value;
    }
  }
  return out;
}

void write_records(std::ostream& out, const CoefficientField& field) {
  out << "# dimension=" << field.dimension() << " channels=" << field.channel_count() << '\n';
  for (std::size_t k = 0; k < field.channel_count(); ++k) {
    for (const auto& [index, value] : field.channel(k)) {
      out << k;
      for (auto c : index.coords()) out << ',' << c;
      out << ',' << format_double(value) << '\n';
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

struct Record {
  std::size_t channel;
  std::vector<std::int64_t> coords;
  double value;
};

Record parse_record(const std::string& line) {
  const auto fields = split(line, ',');
  if (fields.size() < 3) throw DomainError("coefficient record needs k, at least one coordinate and a value: '" + line + "'");
  Record r{};
  try {
    std::size_t used = 0;
    r.channel = static_cast<std::size_t>(std::stoull(fields.front(), &used));
    if (used != fields.front().size()) throw DomainError("bad channel");
    for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
      r.coords.push_back(std::stoll(fields[i], &used));
      if (used != fields[i].size()) throw DomainError("bad coordinate");
    }
    r.value = std::stod(fields.back(), &used);
    if (used != fields.back().size()) throw DomainError("bad value");
  } catch (const std::logic_error&) {
    throw DomainError("malformed coefficient record: '" + line + "'");
  }
  return r;
}

CoefficientField build(const std::vector<Record>& records, std::size_t dimension, std::size_t channels) {
  for (const auto& r : records) {
    if (r.coords.size() != dimension) {
      throw DimensionError("record has " + std::to_string(r.coords.size()) + " coordinates, expected " +
                           std::to_string(dimension));
    }
    channels = std::max(channels, r.channel + 1);
  }
  CoefficientField field(dimension, channels);
  for (const auto& r : records) field.add(r.channel, MultiIndex(std::span<const std::int64_t>(r.coords)), r.value);
  return field;
}

}  // namespace

CoefficientField read_records(std::istream& in) {
  std::size_t dimension = 0;
  std::size_t channels = 1;
  std::vector<Record> records;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream header(line.substr(1));
      std::string token;
      while (header >> token) {
        if (token.rfind("dimension=", 0) == 0) dimension = std::stoul(token.substr(10));
        if (token.rfind("channels=", 0) == 0) channels = std::stoul(token.substr(9));
      }
      continue;
    }
    records.push_back(parse_record(line));
  }
  if (dimension == 0) {
    if (records.empty()) throw DomainError("no dimension header and no records");
    dimension = records.front().coords.size();
  }
  return build(records, dimension, channels);
}

CoefficientField parse_records(const std::string& text, std::size_t dimension) {
  std::vector<Record> records;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), '\n', ';');
  for (const auto& item : split(normalized, ';')) {
    if (!item.empty()) records.push_back(parse_record(item));
  }
  return build(records, dimension, 1);
}

}  // namespace orthomart
