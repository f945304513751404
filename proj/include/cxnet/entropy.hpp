#pragma once

// Spatial entropy estimates over channel lattices.
//
// h(M) is the entropy of a target cell conditioned on M surrounding cells,
// estimated with plug-in (maximum-likelihood) counts pooled over every cell
// of every sample with toroidal wrap. The excess entropy sums how far each
// h(M) sits above the entropy rate:  E_C = sum_{M>=1} (h(M) - h).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxnet/error.hpp"
#include "cxnet/lattice.hpp"

namespace cxnet {

// Shannon entropy (bits) of a table of non-negative counts. Counts are
// summed in sorted order, so the result depends only on the multiset.
template <typename Counts>
double empirical_entropy(const Counts& counts) {
  std::vector<std::uint64_t> values;
  values.reserve(counts.size());
  for (const auto& [key, c] : counts)
    if (c > 0) values.push_back(static_cast<std::uint64_t>(c));
  if (values.empty()) throw PreconditionError("entropy of an empty count table");
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (auto c : values) total += static_cast<double>(c);
  double h = 0.0;
  for (auto c : values) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h <= 0.0 ? 0.0 : h;
}

struct Offset {
  long long dx = 0;
  long long dy = 0;  // rows grow southward; north is dy = -1
  friend bool operator==(const Offset&, const Offset&) = default;
};

class NeighborhoodTemplate {
 public:
  explicit NeighborhoodTemplate(std::vector<Offset> offsets) : offsets_(std::move(offsets)) {
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      if (offsets_[i] == Offset{0, 0}) throw PreconditionError("template must not contain the target offset (0,0)");
      for (std::size_t k = 0; k < i; ++k)
        if (offsets_[k] == offsets_[i])
          throw PreconditionError("duplicate template offset (" + std::to_string(offsets_[i].dx) + "," +
                                  std::to_string(offsets_[i].dy) + ")");
    }
  }

  // Concentric Chebyshev rings up to `radius`, each ring ordered clockwise
  // starting at north: N, NE, E, SE, S, SW, W, NW for radius 1.
  static NeighborhoodTemplate chebyshev(long long radius) {
    std::vector<Offset> offs;
    for (long long dy = -radius; dy <= radius; ++dy)
      for (long long dx = -radius; dx <= radius; ++dx)
        if (dx != 0 || dy != 0) offs.push_back({dx, dy});
    auto ring = [](const Offset& o) { return std::max(std::llabs(o.dx), std::llabs(o.dy)); };
    auto angle = [](const Offset& o) {
      double a = std::atan2(static_cast<double>(o.dx), static_cast<double>(-o.dy));
      return a < 0 ? a + 2.0 * std::numbers::pi : a;
    };
    std::sort(offs.begin(), offs.end(), [&](const Offset& a, const Offset& b) {
      if (ring(a) != ring(b)) return ring(a) < ring(b);
      return angle(a) < angle(b);
    });
    return NeighborhoodTemplate(std::move(offs));
  }

  // Smallest Chebyshev template with at least m offsets.
  static NeighborhoodTemplate chebyshev_for(std::size_t m) {
    long long radius = 1;
    while (static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1) - 1) < m) ++radius;
    return chebyshev(radius);
  }

  const std::vector<Offset>& offsets() const noexcept { return offsets_; }
  std::size_t size() const noexcept { return offsets_.size(); }

 private:
  std::vector<Offset> offsets_;
};

// h(1..m_max) in bits; element M-1 holds h(M).
inline std::vector<double> conditional_entropy_profile(std::span<const ChannelLattice> samples, std::size_t m_max,
                                                       const NeighborhoodTemplate& tmpl) {
  if (samples.empty()) throw PreconditionError("no lattice samples");
  if (m_max == 0) throw PreconditionError("M_max must be >= 1");
  if (m_max > tmpl.size())
    throw PreconditionError("M_max " + std::to_string(m_max) + " exceeds template length " + std::to_string(tmpl.size()));
  const auto& first = samples.front();
  for (const auto& s : samples)
    if (s.width() != first.width() || s.height() != first.height() || s.channels() != first.channels())
      throw PreconditionError("lattice samples differ in dimensions or channel count");

  unsigned bits = 1;
  while ((Channel{1} << bits) < first.channels()) ++bits;
  if ((m_max + 1) * bits > 64)
    throw PreconditionError("context of " + std::to_string(m_max) + " cells over " + std::to_string(first.channels()) +
                            " channels does not fit a 64-bit key");

  const auto w = static_cast<long long>(first.width()), h = static_cast<long long>(first.height());
  // Flat offsets into the cell array for every (cell, template slot).
  std::vector<std::size_t> shifted(first.size() * m_max);
  for (long long y = 0; y < h; ++y)
    for (long long x = 0; x < w; ++x)
      for (std::size_t k = 0; k < m_max; ++k) {
        const auto& o = tmpl.offsets()[k];
        const long long nx = ((x + o.dx) % w + w) % w, ny = ((y + o.dy) % h + h) % h;
        shifted[static_cast<std::size_t>(y * w + x) * m_max + k] = static_cast<std::size_t>(ny * w + nx);
      }

  std::vector<double> result(m_max);
  std::unordered_map<std::uint64_t, std::uint64_t> joint, context;
  for (std::size_t m = 1; m <= m_max; ++m) {
    joint.clear();
    context.clear();
    for (const auto& s : samples) {
      const auto& cells = s.cells();
      for (std::size_t i = 0; i < cells.size(); ++i) {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < m; ++k) key = (key << bits) | cells[shifted[i * m_max + k]];
        ++context[key];
        ++joint[(key << bits) | cells[i]];
      }
    }
    result[m - 1] = std::max(0.0, empirical_entropy(joint) - empirical_entropy(context));
  }
  return result;
}

struct EntropyProfile {
  // h_of_M[M-1] = h(M)
  std::vector<double> h_of_M;
  double h_hat = 0.0;
  double e_c = 0.0;
  std::size_t m_max = 0;
  std::size_t sample_count = 0;
  std::vector<Offset> template_offsets;
  // |h(M_max) - h(M_max-1)| <= tolerance; false when M_max < 2.
  bool converged = false;
};

// E_C = sum_{M=1}^{M_max} (h(M) - h_hat); h_hat defaults to h(M_max).
inline EntropyProfile excess_entropy(std::vector<double> h_of_M, std::optional<double> h_hat = std::nullopt,
                                     double tolerance = 1e-2) {
  if (h_of_M.empty()) throw PreconditionError("conditional entropy profile is empty");
  EntropyProfile p;
  p.m_max = h_of_M.size();
  p.h_hat = h_hat.value_or(h_of_M.back());
  for (double hm : h_of_M) p.e_c += hm - p.h_hat;
  p.converged = p.m_max >= 2 && std::abs(h_of_M[p.m_max - 1] - h_of_M[p.m_max - 2]) <= tolerance;
  p.h_of_M = std::move(h_of_M);
  return p;
}

inline EntropyProfile estimate_excess_entropy(std::span<const ChannelLattice> samples, std::size_t m_max,
                                              const NeighborhoodTemplate& tmpl, double tolerance = 1e-2) {
  auto p = excess_entropy(conditional_entropy_profile(samples, m_max, tmpl), std::nullopt, tolerance);
  p.sample_count = samples.size();
  p.template_offsets.assign(tmpl.offsets().begin(), tmpl.offsets().begin() + static_cast<std::ptrdiff_t>(m_max));
  return p;
}

}  // namespace cxnet
