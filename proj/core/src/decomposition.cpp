#include "orthomart/decomposition.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "orthomart/errors.hpp"
#include "orthomart/orthant_table.hpp"

namespace orthomart {

CoefficientField Decomposition::part(const SubsetMask& mask) const {
  const auto it = parts.find(mask);
  if (it != parts.end()) return it->second;
  return CoefficientField(dimension, channels);
}

namespace {

struct PairLayout {
  std::vector<AxisMode> modes;
  std::vector<IndexRange> ranges;
  std::vector<std::int64_t> offset;  // x_q = j_q + offset_q
  double sign = 1.0;
};

// Table layout for mask S and upper set S' (subset of S^c).
PairLayout layout(const SubsetMask& s, const SubsetMask& upper) {
  const std::size_t d = s.dimension();
  PairLayout p;
  p.modes.resize(d);
  p.ranges.resize(d);
  p.offset.assign(d, 0);
  for (std::size_t q = 0; q < d; ++q) {
    if (s.contains(q)) {
      p.modes[q] = AxisMode::marginal;
      p.ranges[q] = IndexRange::everything();
    } else if (upper.contains(q)) {
      p.modes[q] = AxisMode::at_least;
      p.ranges[q] = IndexRange::from(1);
    } else {
      p.modes[q] = AxisMode::at_most;
      p.ranges[q] = IndexRange::up_to(-1);
      p.offset[q] = 1;
      p.sign = -p.sign;
    }
  }
  return p;
}

}  // namespace

Decomposition decompose(const CoefficientField& field) {
  const std::size_t d = field.dimension();
  if (d == 0) throw DimensionError("cannot decompose a field without a dimension");
  Decomposition dec;
  dec.dimension = d;
  dec.channels = field.channel_count();
  for (const auto& s : SubsetMask::all(d)) {
    CoefficientField g(d, field.channel_count());
    for (const auto& upper : s.complement().subsets()) {
      const auto p = layout(s, upper);
      const OrthantTable table(field, p.modes);
      table.for_each_point(p.ranges, [&](const MultiIndex& j, std::span<const double> values) {
        MultiIndex x = j;
        for (std::size_t q = 0; q < d; ++q) x[q] += p.offset[q];
        for (std::size_t k = 0; k < values.size(); ++k) {
          if (values[k] != 0.0) g.add(k, x, p.sign * values[k]);
        }
      });
    }
    if (!g.empty()) dec.parts.emplace(s, std::move(g));
  }
  return dec;
}

CoefficientField reconstruct(const Decomposition& dec) {
  CoefficientField out(dec.dimension, dec.channels);
  for (const auto& [mask, g] : dec.parts) {
    if (mask.dimension() != dec.dimension || g.dimension() != dec.dimension) {
      throw DimensionError("decomposition part has the wrong dimension");
    }
    if (g.channel_count() != dec.channels) throw DimensionError("decomposition part has the wrong channel count");
    CoefficientField term = g;
    for (std::size_t q = 0; q < dec.dimension; ++q) {
      if (!mask.contains(q)) term = difference(term, q);
    }
    out += term;
  }
  return out;
}

OneDimDecomposition decompose_1d(const CoefficientField& field) {
  if (field.dimension() != 1) throw DimensionError("decompose_1d needs a one-dimensional field");
  const std::size_t channels = field.channel_count();
  OneDimDecomposition out{CoefficientField(1, channels), CoefficientField(1, channels)};
  for (std::size_t k = 0; k < channels; ++k) {
    const auto& ch = field.channel(k);
    if (ch.empty()) continue;
    std::vector<std::pair<std::int64_t, double>> entries;
    double total = 0.0;
    for (const auto& [i, a] : ch) {
      entries.emplace_back(i[0], a);
      total += a;
    }
    out.m.add(k, MultiIndex{0}, total);
    // forward tails for x >= 1
    double tail = 0.0;
    std::size_t t = entries.size();
    const std::int64_t top = entries.back().first;
    for (std::int64_t x = top; x >= 1; --x) {
      while (t > 0 && entries[t - 1].first >= x) tail += entries[--t].second;
      if (tail != 0.0) out.g.add(k, MultiIndex{x}, tail);
    }
    // backward heads for x <= 0
    double head = 0.0;
    std::size_t h = 0;
    const std::int64_t bottom = entries.front().first;
    for (std::int64_t x = bottom + 1; x <= 0; ++x) {
      while (h < entries.size() && entries[h].first <= x - 1) head += entries[h++].second;
      if (head != 0.0) out.g.add(k, MultiIndex{x}, -head);
    }
  }
  return out;
}

std::map<SubsetMask, std::pair<double, double>> g_norm_identity(const CoefficientField& field,
                                                                const Decomposition& dec) {
  if (field.dimension() != dec.dimension) throw DimensionError("field and decomposition differ in dimension");
  std::map<SubsetMask, std::pair<double, double>> out;
  auto squares = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  };
  for (const auto& s : SubsetMask::all(field.dimension())) {
    double closed = 0.0;
    for (const auto& upper : s.complement().subsets()) {
      const auto p = layout(s, upper);
      const OrthantTable table(field, p.modes);
      closed += table.accumulate(p.ranges, squares);
    }
    const auto it = dec.parts.find(s);
    out[s] = {closed, it == dec.parts.end() ? 0.0 : it->second.squared_norm()};
  }
  return out;
}

bool satisfies_support_constraint(const Decomposition& dec, bool adapted_source) {
  for (const auto& [mask, g] : dec.parts) {
    for (const auto& ch : g.channels()) {
      for (const auto& entry : ch) {
        const auto& x = entry.first;
        for (std::size_t q = 0; q < dec.dimension; ++q) {
          if (mask.contains(q) ? x[q] != 0 : (adapted_source && x[q] < 1)) return false;
        }
      }
    }
  }
  return true;
}

void write_decomposition(std::ostream& out, const Decomposition& dec) {
  out << "# decomposition dimension=" << dec.dimension << " channels=" << dec.channels << '\n';
  for (const auto& [mask, g] : dec.parts) {
    out << "@ " << mask.to_string() << '\n';
    std::ostringstream block;
    write_records(block, g);
    std::istringstream lines(block.str());
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.front() != '#') out << line << '\n';
    }
  }
}

Decomposition read_decomposition(std::istream& in) {
  Decomposition dec;
  bool header = false;
  std::string line;
  std::string current_mask;
  std::string body;
  auto flush = [&]() {
    if (current_mask.empty()) return;
    const auto mask = SubsetMask::parse(current_mask);
    if (mask.dimension() != dec.dimension) throw DimensionError("mask '" + current_mask + "' has the wrong length");
    std::istringstream block("# dimension=" + std::to_string(dec.dimension) +
                             " channels=" + std::to_string(dec.channels) + '\n' + body);
    auto g = read_records(block);
    if (g.channel_count() != dec.channels) throw DimensionError("part uses more channels than declared");
    dec.parts[mask] = std::move(g);
    body.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream h(line.substr(1));
      std::string token;
      while (h >> token) {
        if (token.rfind("dimension=", 0) == 0) dec.dimension = std::stoul(token.substr(10));
        if (token.rfind("channels=", 0) == 0) dec.channels = std::stoul(token.substr(9));
      }
      header = dec.dimension > 0;
      continue;
    }
    if (!header) throw DomainError("decomposition block appears before the dimension header");
    if (line.front() == '@') {
      flush();
      current_mask = line.substr(1);
      current_mask.erase(0, current_mask.find_first_not_of(' '));
      continue;
    }
    if (current_mask.empty()) throw DomainError("coefficient record outside a mask block");
    body += line + '\n';
  }
  flush();
  if (!header) throw DomainError("missing decomposition header");
  return dec;
}

}  // namespace orthomart
