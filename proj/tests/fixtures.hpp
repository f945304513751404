#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "cxnet/graph.hpp"
#include "cxnet/lattice.hpp"
#include "cxnet/rng.hpp"
#include "oracles.hpp"

namespace fixtures {

using cxnet::Edge;
using cxnet::FunctionalTopology;
using cxnet::NodeId;

struct SmallGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  FunctionalTopology topology() const {
    std::vector<Edge> e;
    for (auto [u, v] : edges) e.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    return FunctionalTopology(static_cast<std::size_t>(n), e);
  }
};

inline SmallGraph path(int n) {
  SmallGraph g{n, {}};
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

inline SmallGraph star(int n) {
  SmallGraph g{n, {}};
  for (int i = 1; i < n; ++i) g.edges.emplace_back(0, i);
  return g;
}

inline SmallGraph complete(int n) {
  SmallGraph g{n, {}};
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  return g;
}

inline SmallGraph cycle(int n) {
  SmallGraph g = path(n);
  g.edges.emplace_back(0, n - 1);
  return g;
}

inline bool connected(const SmallGraph& g) {
  const auto d = oracle::induced_distances(g.n, g.edges, (1u << g.n) - 1);
  for (int x : d)
    if (x >= (1 << 20)) return false;
  return true;
}

// Fixed set of 50 connected graphs on 2..7 nodes with assorted densities.
inline std::vector<SmallGraph> seeded_small_graphs() {
  std::vector<SmallGraph> out;
  cxnet::Rng rng(20240611);
  while (out.size() < 50) {
    const int n = 2 + static_cast<int>(out.size() % 6);
    const double p = 0.25 + 0.1 * static_cast<double>(out.size() % 6);
    SmallGraph g{n, {}};
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.bernoulli(p)) g.edges.emplace_back(u, v);
    if (connected(g)) out.push_back(std::move(g));
  }
  return out;
}

// Frozen 4x4 toroidal lattices used to check repair distances exhaustively.
inline std::vector<cxnet::ChannelLattice> repair_regression_set(const std::string& data_dir) {
  std::vector<cxnet::ChannelLattice> out;
  for (auto [file, nb] : {std::pair{"repair_moore_4x4.txt", cxnet::Neighborhood::moore},
                          std::pair{"repair_von_neumann_4x4.txt", cxnet::Neighborhood::von_neumann}}) {
    std::ifstream in(data_dir + "/" + file);
    if (!in) throw std::runtime_error(std::string("missing test data ") + file);
    for (auto& l : cxnet::read_lattices(in, nb)) out.push_back(std::move(l));
  }
  return out;
}

inline oracle::Grid to_grid(const cxnet::ChannelLattice& l) {
  oracle::Grid g;
  g.w = static_cast<int>(l.width());
  g.h = static_cast<int>(l.height());
  g.f = static_cast<int>(l.channels());
  g.moore = l.neighborhood() == cxnet::Neighborhood::moore;
  g.cells.assign(l.cells().begin(), l.cells().end());
  return g;
}

}  // namespace fixtures
