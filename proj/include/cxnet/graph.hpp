#pragma once

// Functional topologies: graphs whose nodes are the entities taking part in a
// network function and whose links are the dependencies between them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cxnet/error.hpp"
#include "cxnet/rng.hpp"

namespace cxnet {

using NodeId = std::size_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::string to_string(const Edge& e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

class FunctionalTopology {
 public:
  // Validates and builds. Throws PreconditionError naming the offending edge
  // for out-of-range ids, self-loops and duplicates. In undirected mode
  // (u,v) and (v,u) are the same edge.
  FunctionalTopology(std::size_t node_count, std::vector<Edge> edges, bool directed = false,
                     std::vector<std::string> labels = {})
      : n_(node_count), directed_(directed), labels_(std::move(labels)) {
    if (n_ == 0) throw PreconditionError("functional topology needs at least one node");
    if (!labels_.empty() && labels_.size() != n_)
      throw PreconditionError("label count " + std::to_string(labels_.size()) +
                              " does not match node count " + std::to_string(n_));
    adj_.assign(n_ * n_, 0);
    out_.resize(n_);
    in_.resize(n_);
    undirected_.resize(n_);
    edges_.reserve(edges.size());
    for (const Edge& raw : edges) {
      if (raw.u >= n_ || raw.v >= n_)
        throw PreconditionError("edge " + to_string(raw) + " references a node id >= " +
                                std::to_string(n_));
      if (raw.u == raw.v) throw PreconditionError("self-loop at edge " + to_string(raw));
      Edge e = raw;
      if (!directed_ && e.u > e.v) std::swap(e.u, e.v);
      if (adj_[e.u * n_ + e.v]) throw PreconditionError("duplicate edge " + to_string(raw));
      adj_[e.u * n_ + e.v] = 1;
      if (!directed_) adj_[e.v * n_ + e.u] = 1;
      edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end());
    for (const Edge& e : edges_) {
      out_[e.u].push_back(e.v);
      in_[e.v].push_back(e.u);
      if (!directed_) {
        out_[e.v].push_back(e.u);
        in_[e.u].push_back(e.v);
      }
    }
    for (NodeId a = 0; a < n_; ++a)
      for (NodeId b = 0; b < n_; ++b)
        if (a != b && (adj_[a * n_ + b] || adj_[b * n_ + a])) undirected_[a].push_back(b);
    for (auto* lists : {&out_, &in_})
      for (auto& l : *lists) std::sort(l.begin(), l.end());
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool has_edge(NodeId u, NodeId v) const noexcept { return u < n_ && v < n_ && adj_[u * n_ + v]; }

  // Nodes m with an edge m -> n (for undirected graphs: all neighbours).
  const std::vector<NodeId>& predecessors(NodeId n) const { return in_.at(n); }
  const std::vector<NodeId>& successors(NodeId n) const { return out_.at(n); }
  // Neighbours ignoring edge orientation.
  const std::vector<NodeId>& neighbors(NodeId n) const { return undirected_.at(n); }

 private:
  std::size_t n_;
  bool directed_;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<unsigned char> adj_;
  std::vector<std::vector<NodeId>> out_, in_, undirected_;
};

inline FunctionalTopology build_topology(std::size_t node_count, std::vector<Edge> edges,
                                         bool directed = false) {
  return FunctionalTopology(node_count, std::move(edges), directed);
}

// A node subset of a parent topology together with the edges it induces.
class SubgraphView {
 public:
  SubgraphView(const FunctionalTopology& parent, std::vector<NodeId> members, std::size_t index = 0)
      : parent_(&parent), members_(std::move(members)), index_(index) {
    if (members_.empty()) throw PreconditionError("subgraph must contain at least one node");
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw PreconditionError("subgraph members must be distinct");
    if (members_.back() >= parent.node_count())
      throw PreconditionError("subgraph member " + std::to_string(members_.back()) +
                              " is not a node of the parent topology");
  }

  // The whole graph as a subgraph.
  static SubgraphView whole(const FunctionalTopology& g) {
    std::vector<NodeId> all(g.node_count());
    std::iota(all.begin(), all.end(), NodeId{0});
    return SubgraphView(g, std::move(all), 0);
  }

  const FunctionalTopology& parent() const noexcept { return *parent_; }
  const std::vector<NodeId>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t index() const noexcept { return index_; }
  bool contains(NodeId n) const { return std::binary_search(members_.begin(), members_.end(), n); }

 private:
  const FunctionalTopology* parent_;
  std::vector<NodeId> members_;
  std::size_t index_;
};

namespace detail {

// Hop distances of every member to `target` within the induced subgraph,
// walking edges backwards so that dist[m] is the length of a path m -> target.
// Unreachable members get SIZE_MAX. Distances beyond `limit` are not explored.
inline void induced_distances_to(const SubgraphView& s, std::size_t target_pos, std::size_t limit,
                                 std::vector<std::size_t>& local_of, std::vector<std::size_t>& dist,
                                 std::vector<std::size_t>& queue) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  const auto& g = s.parent();
  const auto& mem = s.members();
  dist.assign(mem.size(), kUnreached);
  queue.clear();
  dist[target_pos] = 0;
  queue.push_back(target_pos);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t cur = queue[head];
    if (dist[cur] >= limit) continue;
    for (NodeId p : g.predecessors(mem[cur])) {
      const std::size_t lp = local_of[p];
      if (lp == kUnreached || dist[lp] != kUnreached) continue;
      dist[lp] = dist[cur] + 1;
      queue.push_back(lp);
    }
  }
}

inline std::vector<std::size_t> local_index(const SubgraphView& s) {
  std::vector<std::size_t> local_of(s.parent().node_count(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < s.size(); ++i) local_of[s.members()[i]] = i;
  return local_of;
}

}  // namespace detail

// i_r^n: members of `s` whose hop distance to n inside the induced subgraph is
// at most r. Node n reaches itself, so the result lies in [1, |s|].
inline std::size_t reachability_count(const SubgraphView& s, NodeId n, std::size_t r) {
  if (r == 0) throw PreconditionError("scale r must be >= 1");
  const auto& mem = s.members();
  auto it = std::lower_bound(mem.begin(), mem.end(), n);
  if (it == mem.end() || *it != n)
    throw PreconditionError("node " + std::to_string(n) + " is not a member of the subgraph");
  auto local_of = detail::local_index(s);
  std::vector<std::size_t> dist, queue;
  detail::induced_distances_to(s, static_cast<std::size_t>(it - mem.begin()), r, local_of, dist, queue);
  return static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [r](std::size_t d) { return d <= r; }));
}

inline std::size_t reachability_count(const FunctionalTopology& g, NodeId n, std::size_t r) {
  if (n >= g.node_count())
    throw PreconditionError("node " + std::to_string(n) + " is not a member of the graph");
  return reachability_count(SubgraphView::whole(g), n, r);
}

// Reachability counts of every member (in member order) at scale r.
inline std::vector<std::size_t> reachability_counts(const SubgraphView& s, std::size_t r) {
  if (r == 0) throw PreconditionError("scale r must be >= 1");
  auto local_of = detail::local_index(s);
  std::vector<std::size_t> counts(s.size()), dist, queue;
  for (std::size_t i = 0; i < s.size(); ++i) {
    detail::induced_distances_to(s, i, r, local_of, dist, queue);
    counts[i] = static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [r](std::size_t d) { return d <= r; }));
  }
  return counts;
}

// Undirected hop distances from src; SIZE_MAX for unreachable nodes.
inline std::vector<std::size_t> hop_distances(const FunctionalTopology& g, NodeId src) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.node_count(), kUnreached);
  std::vector<NodeId> queue{src};
  dist.at(src) = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId cur = queue[head];
    for (NodeId nb : g.neighbors(cur)) {
      if (dist[nb] != kUnreached) continue;
      dist[nb] = dist[cur] + 1;
      queue.push_back(nb);
    }
  }
  return dist;
}

// Connectivity and path metrics use the undirected interpretation of the graph.
inline bool is_connected(const FunctionalTopology& g) {
  auto d = hop_distances(g, 0);
  return std::none_of(d.begin(), d.end(), [](std::size_t x) { return x == std::numeric_limits<std::size_t>::max(); });
}

namespace detail {

inline std::vector<std::vector<std::size_t>> all_pairs_connected(const FunctionalTopology& g) {
  std::vector<std::vector<std::size_t>> d(g.node_count());
  for (NodeId s = 0; s < g.node_count(); ++s) {
    d[s] = hop_distances(g, s);
    for (NodeId t = 0; t < g.node_count(); ++t)
      if (d[s][t] == std::numeric_limits<std::size_t>::max())
        throw PreconditionError("graph is disconnected: nodes " + std::to_string(s) + " and " +
                                std::to_string(t) + " lie in different components");
  }
  return d;
}

}  // namespace detail

// R: longest shortest path. Rejects disconnected and single-node graphs.
inline std::size_t diameter(const FunctionalTopology& g) {
  if (g.node_count() < 2) throw PreconditionError("diameter of a single-node graph is 0; at least two nodes required");
  auto d = detail::all_pairs_connected(g);
  std::size_t best = 0;
  for (const auto& row : d) best = std::max(best, *std::max_element(row.begin(), row.end()));
  return best;
}

inline double average_path_length(const FunctionalTopology& g) {
  auto d = detail::all_pairs_connected(g);
  const std::size_t n = g.node_count();
  if (n < 2) return 0.0;
  std::uint64_t total = 0;
  for (NodeId s = 0; s < n; ++s)
    for (NodeId t = s + 1; t < n; ++t) total += d[s][t];
  return static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

// 2|E|/N for undirected graphs; mean out-degree |E|/N for directed ones.
inline double average_degree(const FunctionalTopology& g) {
  const double e = static_cast<double>(g.edge_count());
  return (g.directed() ? e : 2.0 * e) / static_cast<double>(g.node_count());
}

// Mean local clustering; nodes of degree < 2 contribute 0.
inline double clustering_coefficient(const FunctionalTopology& g) {
  double sum = 0.0;
  for (NodeId n = 0; n < g.node_count(); ++n) {
    const auto& nb = g.neighbors(n);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (g.has_edge(nb[a], nb[b]) || g.has_edge(nb[b], nb[a])) ++links;
    sum += static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  }
  return sum / static_cast<double>(g.node_count());
}

// ---------------------------------------------------------------------------
// Subgraph enumeration and sampling
// ---------------------------------------------------------------------------

enum class SamplingMode { exhaustive, uniform_sample };

struct SamplingPolicy {
  SamplingMode mode = SamplingMode::exhaustive;
  std::uint64_t sample_count = 10'000;
  // In exhaustive mode, sizes with more than this many subsets are sampled.
  std::uint64_t exhaustive_limit = 100'000;
  std::uint64_t seed = 0;
};

inline std::string to_string(SamplingMode m) {
  return m == SamplingMode::exhaustive ? "exhaustive" : "uniform-sample";
}

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using wide = unsigned __int128;
  wide acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

// Whether size-j subsets of an n-node graph are enumerated rather than sampled.
inline bool enumerates_exhaustively(const SamplingPolicy& p, std::size_t n, std::size_t j) {
  return j == n || (p.mode == SamplingMode::exhaustive && binomial(n, j) <= p.exhaustive_limit);
}

// Calls visit(SubgraphView) for size-j subsets: all C(N, j) of them in
// lexicographic order, or policy.sample_count independent uniform draws
// (with replacement) from the RNG stream seeded by policy.seed.
template <typename Visit>
void for_each_subgraph(const FunctionalTopology& g, std::size_t j, const SamplingPolicy& policy, Visit&& visit) {
  const std::size_t n = g.node_count();
  if (j < 1 || j > n)
    throw PreconditionError("subgraph size " + std::to_string(j) + " outside [1, " + std::to_string(n) + "]");
  if (enumerates_exhaustively(policy, n, j)) {
    std::vector<NodeId> comb(j);
    std::iota(comb.begin(), comb.end(), NodeId{0});
    for (std::size_t k = 0;; ++k) {
      visit(SubgraphView(g, comb, k));
      std::size_t i = j;
      while (i > 0 && comb[i - 1] == n - j + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t t = i; t < j; ++t) comb[t] = comb[t - 1] + 1;
    }
    return;
  }
  Rng rng(policy.seed);
  std::vector<NodeId> pool(n);
  for (std::uint64_t k = 0; k < policy.sample_count; ++k) {
    std::iota(pool.begin(), pool.end(), NodeId{0});
    for (std::size_t i = 0; i < j; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    visit(SubgraphView(g, std::vector<NodeId>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(j)),
                       static_cast<std::size_t>(k)));
  }
}

inline std::vector<SubgraphView> enumerate_subgraphs(const FunctionalTopology& g, std::size_t j,
                                                     const SamplingPolicy& policy) {
  std::vector<SubgraphView> out;
  for_each_subgraph(g, j, policy, [&](const SubgraphView& s) { out.push_back(s); });
  return out;
}

// ---------------------------------------------------------------------------
// Edge-list text format
//   N <node_count> <directed|undirected>
//   u v
//   ...
// '#' starts a comment anywhere on a line.
// ---------------------------------------------------------------------------

inline FunctionalTopology read_edge_list(std::istream& in) {
  std::string line;
  std::optional<std::size_t> n;
  bool directed = false;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    std::string extra;
    if (!n) {
      std::string mode;
      long long count = 0;
      if (first != "N" || !(ls >> count >> mode) || (ls >> extra) || count <= 0 ||
          (mode != "directed" && mode != "undirected"))
        throw InputError("line " + std::to_string(lineno) +
                         ": expected header 'N <node_count> <directed|undirected>'");
      n = static_cast<std::size_t>(count);
      directed = mode == "directed";
      continue;
    }
    std::istringstream es(line);
    long long u = -1, v = -1;
    if (!(es >> u >> v) || (es >> extra) || u < 0 || v < 0)
      throw InputError("line " + std::to_string(lineno) + ": expected 'u v' with non-negative ids");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  if (!n) throw InputError("missing edge-list header 'N <node_count> <directed|undirected>'");
  try {
    return FunctionalTopology(*n, std::move(edges), directed);
  } catch (const PreconditionError& e) {
    throw InputError(std::string("invalid edge list: ") + e.what());
  }
}

inline void write_edge_list(std::ostream& out, const FunctionalTopology& g) {
  out << "N " << g.node_count() << ' ' << (g.directed() ? "directed" : "undirected") << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace cxnet
