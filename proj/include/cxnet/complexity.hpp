#pragma once

// Functional complexity of a functional topology.
//
// Each node n of a subgraph with j members carries a Bernoulli interaction
// variable with p = i_r^n / j, where i_r^n counts the members within r hops
// of n. A subgraph's information at scale r is the sum of the binary
// entropies of its members. Functional complexity compares, for every scale
// r = 1..R-1 and size j = r+1..N, the mean information over size-j subgraphs
// with the straight line running from 0 at j = r+1 to the whole-graph value
// at j = N:
//
//   C_F = 1/(R-1) * sum_r sum_j | <I_r(j)> - (r+1-j)/(r+1-N) * I_r(N) |
//
// where R is the diameter. Information is measured in bits.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cxnet/error.hpp"
#include "cxnet/format.hpp"
#include "cxnet/graph.hpp"
#include "cxnet/parallel.hpp"
#include "cxnet/rng.hpp"

namespace cxnet {

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("probability " + fmt(p) + " outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// I_r of a subgraph: sum over members of H(i_r^n / j).
inline double subgraph_information(const SubgraphView& s, std::size_t r) {
  const auto counts = reachability_counts(s, r);
  const double j = static_cast<double>(s.size());
  double total = 0.0;
  for (std::size_t c : counts) total += binary_entropy(static_cast<double>(c) / j);
  return total;
}

struct InformationEstimate {
  double mean = 0.0;
  // Standard error of the mean; 0 for exhaustive evaluation.
  double standard_error = 0.0;
  std::uint64_t subsets = 0;
  bool exhaustive = true;
};

// <I_r(j)>: mean information over size-j subgraphs. Sampled sizes draw from
// a stream keyed by (policy.seed, r, j), so each (r, j) cell is reproducible
// on its own.
inline InformationEstimate mean_information(const FunctionalTopology& g, std::size_t j, std::size_t r,
                                            const SamplingPolicy& policy) {
  const std::size_t n = g.node_count();
  if (r < 1) throw PreconditionError("scale r must be >= 1");
  if (j < r + 1 || j > n)
    throw PreconditionError("subgraph size " + std::to_string(j) + " outside [" + std::to_string(r + 1) +
                            ", " + std::to_string(n) + "] for scale " + std::to_string(r));
  if (policy.mode == SamplingMode::uniform_sample && policy.sample_count == 0 && j != n)
    throw PreconditionError("sample_count must be positive");
  SamplingPolicy cell = policy;
  cell.seed = derive_seed(policy.seed, {r, j});

  InformationEstimate est;
  est.exhaustive = enumerates_exhaustively(policy, n, j);
  // Welford accumulation in visiting order.
  double mean = 0.0, m2 = 0.0;
  std::uint64_t count = 0;
  for_each_subgraph(g, j, cell, [&](const SubgraphView& s) {
    const double x = subgraph_information(s, r);
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  });
  est.mean = mean;
  est.subsets = count;
  if (!est.exhaustive && count > 1)
    est.standard_error = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  return est;
}

struct ComplexityCell {
  std::size_t r = 0;
  std::size_t j = 0;
  double mean_information = 0.0;
  double baseline = 0.0;
  double deviation = 0.0;
  double standard_error = 0.0;
  std::uint64_t subsets = 0;
  bool exhaustive = true;
};

struct ComplexityProfile {
  std::size_t node_count = 0;
  // Diameter R; scales evaluated are 1..R-1.
  std::size_t diameter = 0;
  // Cells ordered by r, then j.
  std::vector<ComplexityCell> cells;
  // I_r(whole graph), index r-1.
  std::vector<double> whole_graph_information;
  double c_f = 0.0;
  // sqrt(sum of squared cell errors) / (R-1); 0 when every cell is exhaustive.
  double standard_error = 0.0;
  SamplingPolicy sampling;
  // Set when R < 2: the metric is defined as 0 rather than evaluated.
  bool degenerate_scale = false;
};

// Throws PreconditionError for disconnected graphs. Graphs with R < 2
// (complete graphs, a single node) yield c_f = 0 with degenerate_scale set.
// `workers` parallelises over (r, j) cells; the result does not depend on it.
inline ComplexityProfile functional_complexity(const FunctionalTopology& g, const SamplingPolicy& policy,
                                               unsigned workers = 1) {
  ComplexityProfile prof;
  prof.node_count = g.node_count();
  prof.sampling = policy;
  if (g.node_count() == 1) {
    prof.degenerate_scale = true;
    return prof;
  }
  const std::size_t big_r = diameter(g);
  prof.diameter = big_r;
  if (big_r < 2) {
    prof.degenerate_scale = true;
    return prof;
  }
  const std::size_t n = g.node_count();
  const auto whole = SubgraphView::whole(g);
  for (std::size_t r = 1; r < big_r; ++r) {
    prof.whole_graph_information.push_back(subgraph_information(whole, r));
    for (std::size_t j = r + 1; j <= n; ++j) prof.cells.push_back({.r = r, .j = j});
  }
  parallel_for(prof.cells.size(), workers, [&](std::size_t idx) {
    auto& cell = prof.cells[idx];
    const auto est = mean_information(g, cell.j, cell.r, policy);
    const double whole_info = prof.whole_graph_information[cell.r - 1];
    cell.mean_information = est.mean;
    cell.standard_error = est.standard_error;
    cell.subsets = est.subsets;
    cell.exhaustive = est.exhaustive;
    // (r+1-j)/(r+1-N), written with non-negative terms so j = r+1 gives +0.
    cell.baseline = static_cast<double>(cell.j - cell.r - 1) / static_cast<double>(n - cell.r - 1) * whole_info;
    cell.deviation = std::abs(cell.mean_information - cell.baseline);
  });
  double sum = 0.0, var = 0.0;
  for (const auto& cell : prof.cells) {
    sum += cell.deviation;
    var += cell.standard_error * cell.standard_error;
  }
  const double scales = static_cast<double>(big_r - 1);
  prof.c_f = sum / scales;
  prof.standard_error = std::sqrt(var) / scales;
  return prof;
}

// CSV table (r, j, mean_information, baseline, deviation, stderr, subsets, mode)
// followed by a '#'-prefixed summary block.
inline void write_profile_csv(std::ostream& out, const ComplexityProfile& p) {
  out << "r,j,mean_information,baseline,deviation,stderr,subsets,mode\n";
  for (const auto& c : p.cells)
    out << c.r << ',' << c.j << ',' << fmt(c.mean_information) << ',' << fmt(c.baseline) << ','
        << fmt(c.deviation) << ',' << fmt(c.standard_error) << ',' << c.subsets << ','
        << (c.exhaustive ? "exhaustive" : "sampled") << '\n';
  out << "# summary\n";
  out << "# N: " << p.node_count << '\n';
  out << "# R: " << p.diameter << '\n';
  out << "# c_f: " << fmt(p.c_f) << '\n';
  out << "# c_f_stderr: " << fmt(p.standard_error) << '\n';
  out << "# policy: " << to_string(p.sampling.mode) << " sample_count=" << p.sampling.sample_count
      << " exhaustive_limit=" << p.sampling.exhaustive_limit << '\n';
  out << "# seed: " << p.sampling.seed << '\n';
  if (p.degenerate_scale) out << "# warning: diameter < 2, functional complexity defined as 0\n";
}

}  // namespace cxnet
