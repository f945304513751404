#pragma once

// Seeded random-graph ensembles and the correlation of functional complexity
// with classical topology measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cxnet/complexity.hpp"
#include "cxnet/error.hpp"
#include "cxnet/format.hpp"
#include "cxnet/graph.hpp"
#include "cxnet/parallel.hpp"
#include "cxnet/rng.hpp"

namespace cxnet {

enum class EnsembleKind { erdos_renyi, watts_strogatz, barabasi_albert };

inline std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::erdos_renyi: return "erdos-renyi";
    case EnsembleKind::watts_strogatz: return "watts-strogatz";
    case EnsembleKind::barabasi_albert: return "barabasi-albert";
  }
  return "?";
}

inline EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "erdos-renyi" || s == "er") return EnsembleKind::erdos_renyi;
  if (s == "watts-strogatz" || s == "ws") return EnsembleKind::watts_strogatz;
  if (s == "barabasi-albert" || s == "ba") return EnsembleKind::barabasi_albert;
  throw PreconditionError("unknown ensemble kind '" + s + "'");
}

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::erdos_renyi;
  std::size_t nodes = 10;
  double edge_probability = 0.35;   // Erdos-Renyi
  std::size_t ring_degree = 4;      // Watts-Strogatz, even
  double rewiring_probability = 0.1;  // Watts-Strogatz
  std::size_t attachment = 2;       // Barabasi-Albert
  std::size_t graph_count = 200;
  std::uint64_t seed = 11;
  bool connected = true;
  std::size_t max_retries = 1000;
};

inline void validate(const EnsembleSpec& s) {
  if (s.nodes < 1) throw PreconditionError("ensemble graphs need at least one node");
  switch (s.kind) {
    case EnsembleKind::erdos_renyi:
      if (!(s.edge_probability >= 0.0 && s.edge_probability <= 1.0))
        throw PreconditionError("edge probability outside [0, 1]");
      break;
    case EnsembleKind::watts_strogatz:
      if (!(s.rewiring_probability >= 0.0 && s.rewiring_probability <= 1.0))
        throw PreconditionError("rewiring probability outside [0, 1]");
      if (s.ring_degree % 2 != 0 || s.ring_degree >= s.nodes)
        throw PreconditionError("ring degree must be even and smaller than the node count");
      break;
    case EnsembleKind::barabasi_albert:
      if (s.attachment < 1 || s.attachment >= s.nodes)
        throw PreconditionError("attachment count must lie in [1, N)");
      break;
  }
}

namespace detail {

inline std::vector<Edge> erdos_renyi(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) e.push_back({u, v});
  return e;
}

inline std::vector<Edge> watts_strogatz(std::size_t n, std::size_t k, double beta, Rng& rng) {
  std::vector<unsigned char> adj(n * n, 0);
  auto link = [&](NodeId a, NodeId b, unsigned char on) { adj[a * n + b] = adj[b * n + a] = on; };
  for (NodeId u = 0; u < n; ++u)
    for (std::size_t d = 1; d <= k / 2; ++d) link(u, (u + d) % n, 1);
  for (std::size_t d = 1; d <= k / 2; ++d)
    for (NodeId u = 0; u < n; ++u) {
      const NodeId v = (u + d) % n;
      if (!adj[u * n + v] || !rng.bernoulli(beta)) continue;
      std::vector<NodeId> targets;
      for (NodeId w = 0; w < n; ++w)
        if (w != u && !adj[u * n + w]) targets.push_back(w);
      if (targets.empty()) continue;
      link(u, v, 0);
      link(u, targets[rng.below(targets.size())], 1);
    }
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (adj[u * n + v]) e.push_back({u, v});
  return e;
}

// Starts from a complete graph on m+1 nodes; each later node attaches to m
// distinct earlier nodes chosen with probability proportional to degree.
inline std::vector<Edge> barabasi_albert(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<Edge> e;
  std::vector<NodeId> stubs;  // each node repeated once per incident edge
  for (NodeId u = 0; u <= m && u < n; ++u)
    for (NodeId v = u + 1; v <= m && v < n; ++v) {
      e.push_back({u, v});
      stubs.push_back(u);
      stubs.push_back(v);
    }
  for (NodeId u = m + 1; u < n; ++u) {
    std::vector<NodeId> chosen;
    while (chosen.size() < m) {
      const NodeId t = stubs[rng.below(stubs.size())];
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
    }
    std::sort(chosen.begin(), chosen.end());
    for (NodeId t : chosen) {
      e.push_back({t, u});
      stubs.push_back(t);
      stubs.push_back(u);
    }
  }
  return e;
}

}  // namespace detail

// Graph i is drawn from a stream keyed by (seed, i, attempt); with the
// connectivity filter set, disconnected draws are discarded and redrawn up
// to max_retries times.
inline FunctionalTopology generate_graph(const EnsembleSpec& spec, std::size_t index) {
  for (std::size_t attempt = 0; attempt <= spec.max_retries; ++attempt) {
    Rng rng(derive_seed(spec.seed, {index, attempt}));
    std::vector<Edge> edges;
    switch (spec.kind) {
      case EnsembleKind::erdos_renyi: edges = detail::erdos_renyi(spec.nodes, spec.edge_probability, rng); break;
      case EnsembleKind::watts_strogatz:
        edges = detail::watts_strogatz(spec.nodes, spec.ring_degree, spec.rewiring_probability, rng);
        break;
      case EnsembleKind::barabasi_albert: edges = detail::barabasi_albert(spec.nodes, spec.attachment, rng); break;
    }
    FunctionalTopology g(spec.nodes, std::move(edges));
    if (!spec.connected || is_connected(g)) return g;
  }
  throw PreconditionError("no connected " + to_string(spec.kind) + " graph found for graph " + std::to_string(index) +
                          " within " + std::to_string(spec.max_retries) + " retries");
}

inline std::vector<FunctionalTopology> generate_ensemble(const EnsembleSpec& spec) {
  validate(spec);
  std::vector<FunctionalTopology> out;
  out.reserve(spec.graph_count);
  for (std::size_t i = 0; i < spec.graph_count; ++i) out.push_back(generate_graph(spec, i));
  return out;
}

// Sample Pearson correlation. Rejects unequal lengths, fewer than two points
// and zero variance.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw PreconditionError("pearson: sequences differ in length");
  if (xs.size() < 2) throw PreconditionError("pearson: need at least two observations");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw PreconditionError("pearson: first sequence has zero variance");
  if (syy == 0.0) throw PreconditionError("pearson: second sequence has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationRow {
  std::size_t graph_id = 0;
  double c_f = 0.0;
  double average_path_length = 0.0;
  double average_degree = 0.0;
  double clustering_coefficient = 0.0;
};

struct CorrelationReport {
  EnsembleSpec spec;
  SamplingPolicy policy;
  std::vector<CorrelationRow> rows;
  // Empty when the classical metric is constant over the ensemble.
  std::optional<double> rho_apl, rho_degree, rho_clustering;
  // Metrics whose |rho| reaches the 0.5 threshold.
  std::vector<std::string> violations;
};

inline constexpr double kCorrelationThreshold = 0.5;

inline CorrelationReport correlation_report(const EnsembleSpec& spec, const SamplingPolicy& policy,
                                            unsigned workers = 1) {
  validate(spec);
  if (spec.graph_count < 2) throw PreconditionError("correlation needs at least 2 graphs, got " + std::to_string(spec.graph_count));
  CorrelationReport rep{spec, policy, std::vector<CorrelationRow>(spec.graph_count), {}, {}, {}, {}};
  parallel_for(spec.graph_count, workers, [&](std::size_t i) {
    const auto g = generate_graph(spec, i);
    auto& row = rep.rows[i];
    row.graph_id = i;
    row.c_f = functional_complexity(g, policy).c_f;
    row.average_path_length = average_path_length(g);
    row.average_degree = average_degree(g);
    row.clustering_coefficient = clustering_coefficient(g);
  });
  std::vector<double> cf, apl, deg, cc;
  for (const auto& r : rep.rows) {
    cf.push_back(r.c_f);
    apl.push_back(r.average_path_length);
    deg.push_back(r.average_degree);
    cc.push_back(r.clustering_coefficient);
  }
  if (std::all_of(cf.begin(), cf.end(), [&](double v) { return v == cf.front(); }))
    throw PreconditionError("degenerate ensemble: functional complexity is constant (" + fmt(cf.front()) +
                            ") across all graphs, correlation undefined");
  auto rho = [&](const std::vector<double>& ys) -> std::optional<double> {
    if (std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys.front(); })) return std::nullopt;
    return pearson(cf, ys);
  };
  rep.rho_apl = rho(apl);
  rep.rho_degree = rho(deg);
  rep.rho_clustering = rho(cc);
  auto flag = [&](const char* name, const std::optional<double>& r) {
    if (r && std::abs(*r) >= kCorrelationThreshold) rep.violations.emplace_back(name);
  };
  flag("rho_apl", rep.rho_apl);
  flag("rho_degree", rep.rho_degree);
  flag("rho_clustering", rep.rho_clustering);
  return rep;
}

inline void write_correlation_csv(std::ostream& out, const CorrelationReport& rep) {
  out << "graph_id,c_f,average_path_length,average_degree,clustering_coefficient\n";
  for (const auto& r : rep.rows)
    out << r.graph_id << ',' << fmt(r.c_f) << ',' << fmt(r.average_path_length) << ',' << fmt(r.average_degree) << ','
        << fmt(r.clustering_coefficient) << '\n';
  auto footer = [&](const char* name, const std::optional<double>& r) {
    out << name << ',' << (r ? fmt(*r) : std::string("undefined")) << '\n';
  };
  footer("rho_apl", rep.rho_apl);
  footer("rho_degree", rep.rho_degree);
  footer("rho_clustering", rep.rho_clustering);
  out << "# ensemble: " << to_string(rep.spec.kind) << " nodes=" << rep.spec.nodes << " graphs=" << rep.spec.graph_count
      << (rep.spec.connected ? " connected-only" : "") << " (assumed default ensemble)\n";
  out << "# threshold: |rho| < " << fmt(kCorrelationThreshold) << '\n';
  if (rep.violations.empty()) {
    out << "# check: all |rho| below threshold\n";
  } else {
    out << "# check: DEVIATION";
    for (const auto& v : rep.violations) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace cxnet
