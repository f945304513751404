#pragma once

// Channel allocation on a cell lattice: a centralized periodic reuse planner,
// a decentralized self-organizing allocator, and the perturbation experiment
// that measures how many cells must change to restore an interference-free
// allocation after one cell is forced onto a given channel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cxnet/error.hpp"
#include "cxnet/format.hpp"
#include "cxnet/lattice.hpp"
#include "cxnet/parallel.hpp"
#include "cxnet/rng.hpp"

namespace cxnet {

enum class Allocator { son, centralized };

inline std::string to_string(Allocator a) { return a == Allocator::son ? "son" : "centralized"; }

inline Allocator parse_allocator(const std::string& s) {
  if (s == "son") return Allocator::son;
  if (s == "centralized") return Allocator::centralized;
  throw PreconditionError("unknown allocator '" + s + "' (expected son or centralized)");
}

// Periodic reuse pattern: checkerboard for von Neumann (2 channels), 2x2 tile
// for Moore (4 channels). Extra channels stay unused.
inline ChannelLattice centralized_allocate(std::size_t width, std::size_t height, Channel channels,
                                           Neighborhood nb, Boundary boundary = Boundary::toroidal) {
  const Channel needed = nb == Neighborhood::von_neumann ? 2 : 4;
  if (channels < needed)
    throw PreconditionError("centralized " + to_string(nb) + " pattern needs at least " + std::to_string(needed) +
                            " channels, got " + std::to_string(channels));
  if (width == 0 || height == 0) throw PreconditionError("lattice dimensions must be positive");
  if (boundary == Boundary::toroidal) {
    for (std::size_t d : {width, height})
      if (d > 1 && d % 2 != 0)
        throw PreconditionError("odd torus dimension " + std::to_string(d) + " breaks the " +
                                (nb == Neighborhood::von_neumann ? std::string("2-colouring") : std::string("2x2 reuse tile")));
  }
  ChannelLattice l(width, height, channels, nb, boundary);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      const auto c = nb == Neighborhood::von_neumann ? (x + y) % 2 : 2 * (y % 2) + x % 2;
      l.set(x, y, static_cast<Channel>(c));
    }
  return l;
}

struct SonResult {
  ChannelLattice lattice;
  std::size_t sweeps = 0;
  std::size_t final_conflicts = 0;
  bool converged = false;
};

// What a conflicted cell does when its neighbours use every channel.
enum class SonFallback {
  least_conflicted,  // draw among the channels fewest neighbours use (uniform with probability kSonFallbackNoise)
  uniform,           // draw among all channels
};

inline constexpr double kSonFallbackNoise = 0.1;

inline std::string to_string(SonFallback f) { return f == SonFallback::uniform ? "uniform" : "least-conflicted"; }

inline SonFallback parse_son_fallback(const std::string& s) {
  if (s == "least-conflicted") return SonFallback::least_conflicted;
  if (s == "uniform") return SonFallback::uniform;
  throw PreconditionError("unknown SON fallback '" + s + "' (expected least-conflicted or uniform)");
}

// Decentralized trial-and-error allocation. Cells start on uniform random
// channels; each sweep visits cells in a fresh random order and every cell
// that shares a channel with a neighbour re-draws uniformly among the
// channels its neighbours leave free. With none free it applies `fallback`.
// Stops when interference-free or after max_sweeps sweeps.
//
// The uniform fallback stalls when F equals the chromatic number (Moore,
// F = 5 on 10x10 keeps ~30 conflicts after 10^4 sweeps); without the noise
// term the least-conflicted rule can sit on a single conflict forever.
inline SonResult son_allocate(std::size_t width, std::size_t height, Channel channels, Neighborhood nb,
                              std::uint64_t seed, std::size_t max_sweeps, Boundary boundary = Boundary::toroidal,
                              SonFallback fallback = SonFallback::least_conflicted) {
  if (channels == 0) throw PreconditionError("channel count must be positive");
  Rng rng(seed);
  std::vector<Channel> init(width * height);
  for (auto& c : init) c = static_cast<Channel>(rng.below(channels));
  SonResult res{ChannelLattice(width, height, channels, nb, boundary, std::move(init))};
  auto& l = res.lattice;
  std::vector<std::size_t> order(l.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::size_t> used(channels);
  std::vector<Channel> best;
  res.final_conflicts = conflict_count(l);
  while (res.final_conflicts > 0 && res.sweeps < max_sweeps) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t cell : order) {
      if (cell_conflicts(l, cell) == 0) continue;
      std::fill(used.begin(), used.end(), 0);
      for (std::size_t n : l.neighbors(cell)) ++used[l.at(n)];
      const std::size_t fewest = *std::min_element(used.begin(), used.end());
      if (fewest > 0 && (fallback == SonFallback::uniform || rng.uniform01() < kSonFallbackNoise)) {
        l.set(cell, static_cast<Channel>(rng.below(channels)));
        continue;
      }
      best.clear();
      for (Channel c = 0; c < channels; ++c)
        if (used[c] == fewest) best.push_back(c);
      l.set(cell, best[rng.below(best.size())]);
    }
    ++res.sweeps;
    res.final_conflicts = conflict_count(l);
  }
  res.converged = res.final_conflicts == 0;
  return res;
}

struct CellChange {
  CellCoord cell;
  Channel channel = 0;
  friend bool operator==(const CellChange&, const CellChange&) = default;
};

struct StabilityRecord {
  CellCoord cell;
  Channel forced_channel = 0;
  // Minimum number of other cells to change; empty when the budget ran out.
  std::optional<std::size_t> repair_distance;
  // Witness repair; size equals *repair_distance.
  std::vector<CellChange> changed_cells;
  bool budget_exceeded() const noexcept { return !repair_distance.has_value(); }
};

namespace detail {

// Depth-limited search for a set of at most `depth` cell changes that makes
// the lattice interference-free. Cells that have been assigned (the clamped
// cell and every changed cell) are frozen: a minimal repair never changes a
// cell twice. The initial lattice is interference-free, so every conflict
// touches a frozen cell.
class RepairSearch {
 public:
  RepairSearch(const ChannelLattice& l, std::size_t clamped) : l_(l), frozen_(l.size(), 0) {
    frozen_[clamped] = 1;
    touched_.push_back(clamped);
  }

  bool run(std::size_t depth) { return dfs(depth); }
  const std::vector<std::pair<std::size_t, Channel>>& changes() const noexcept { return changes_; }

 private:
  struct Conflict {
    std::size_t a, b;
  };

  void collect_conflicts() {
    conflicts_.clear();
    for (std::size_t t : touched_)
      for (std::size_t n : l_.neighbors(t))
        if (l_.at(n) == l_.at(t) && !(frozen_[n] && n < t)) conflicts_.push_back({t, n});
  }

  bool dfs(std::size_t depth) {
    collect_conflicts();
    if (conflicts_.empty()) return true;
    if (depth == 0) return false;

    // Every conflict pairs a frozen cell with a free one, and the free one
    // must change. Distinct such cells bound the remaining depth from below.
    std::vector<std::size_t> forced;
    for (const auto& c : conflicts_) {
      const bool fa = frozen_[c.a], fb = frozen_[c.b];
      if (fa && fb) return false;
      const std::size_t v = fa ? c.b : c.a;
      if (std::find(forced.begin(), forced.end(), v) == forced.end()) forced.push_back(v);
    }
    if (forced.size() > depth) return false;

    // Branch on the forced cell with the fewest admissible channels.
    std::size_t v = forced.front();
    std::size_t best = l_.channels() + 1;
    for (std::size_t cand : forced) {
      std::size_t options = 0;
      for (Channel ch = 0; ch < l_.channels(); ++ch)
        if (ch != l_.at(cand) && !clashes_with_frozen(cand, ch)) ++options;
      if (options < best) {
        best = options;
        v = cand;
      }
    }
    if (best == 0) return false;
    const Channel original = l_.at(v);
    for (Channel ch = 0; ch < l_.channels(); ++ch) {
      if (ch == original || clashes_with_frozen(v, ch)) continue;
      l_.set(v, ch);
      frozen_[v] = 1;
      touched_.push_back(v);
      changes_.emplace_back(v, ch);
      if (dfs(depth - 1)) return true;
      changes_.pop_back();
      touched_.pop_back();
      frozen_[v] = 0;
      l_.set(v, original);
    }
    return false;
  }

  bool clashes_with_frozen(std::size_t v, Channel ch) const {
    for (std::size_t n : l_.neighbors(v))
      if (frozen_[n] && l_.at(n) == ch) return true;
    return false;
  }

  ChannelLattice l_;
  std::vector<unsigned char> frozen_;
  std::vector<std::size_t> touched_;
  std::vector<Conflict> conflicts_;
  std::vector<std::pair<std::size_t, Channel>> changes_;
};

}  // namespace detail

// Clamps `cell` to `forced_channel` and finds, by iterative deepening, the
// fewest other cells whose channels must change to remove all interference.
// Requires an interference-free lattice.
inline StabilityRecord repair_distance(const ChannelLattice& l, CellCoord cell, Channel forced_channel,
                                       std::size_t budget) {
  if (cell.x >= l.width() || cell.y >= l.height()) throw PreconditionError("perturbed cell outside the lattice");
  if (forced_channel >= l.channels())
    throw PreconditionError("forced channel " + std::to_string(forced_channel) + " >= channel count " +
                            std::to_string(l.channels()));
  if (conflict_count(l) != 0) throw PreconditionError("repair distance requires an interference-free lattice");
  StabilityRecord rec{cell, forced_channel, std::nullopt, {}};
  ChannelLattice perturbed = l;
  const auto idx = l.index(cell.x, cell.y);
  perturbed.set(idx, forced_channel);
  for (std::size_t depth = 0; depth <= budget; ++depth) {
    detail::RepairSearch search(perturbed, idx);
    if (search.run(depth)) {
      rec.repair_distance = search.changes().size();
      for (const auto& [i, ch] : search.changes()) rec.changed_cells.push_back({l.coord(i), ch});
      return rec;
    }
  }
  return rec;
}

// Applies a record's perturbation and witness to a copy of `l`.
inline ChannelLattice apply_repair(const ChannelLattice& l, const StabilityRecord& rec) {
  ChannelLattice out = l;
  out.set(rec.cell.x, rec.cell.y, rec.forced_channel);
  for (const auto& ch : rec.changed_cells) out.set(ch.cell.x, ch.cell.y, ch.channel);
  return out;
}

struct StabilityConfig {
  Allocator allocator = Allocator::son;
  std::size_t width = 8;
  std::size_t height = 8;
  Channel channels = 5;
  Neighborhood neighborhood = Neighborhood::moore;
  Boundary boundary = Boundary::toroidal;
  std::size_t instances = 20;
  std::uint64_t seed = 1;
  std::size_t budget = 8;
  std::size_t max_sweeps = 10'000;
  SonFallback fallback = SonFallback::least_conflicted;
  // Perturb this many randomly chosen cells per instance; 0 = every cell.
  std::size_t cell_sample = 0;
};

struct StabilityRow {
  std::size_t instance = 0;
  StabilityRecord record;
};

struct StabilitySummary {
  std::map<std::size_t, std::uint64_t> histogram;
  std::uint64_t records = 0;
  std::uint64_t budget_exceeded = 0;
  double mean = 0.0;  // over records within budget
  double stddev = 0.0;
  double ci95 = 0.0;  // half-width of the normal-approximation interval
  std::size_t max = 0;
  std::size_t unconverged_instances = 0;
};

struct StabilityReport {
  StabilityConfig config;
  std::vector<StabilityRow> rows;
  StabilitySummary summary;
};

inline StabilitySummary summarize(const std::vector<StabilityRow>& rows) {
  StabilitySummary s;
  double sum = 0.0;
  std::uint64_t finite = 0;
  for (const auto& row : rows) {
    ++s.records;
    if (row.record.budget_exceeded()) {
      ++s.budget_exceeded;
      continue;
    }
    const auto c = *row.record.repair_distance;
    ++s.histogram[c];
    s.max = std::max(s.max, c);
    sum += static_cast<double>(c);
    ++finite;
  }
  if (finite == 0) return s;
  s.mean = sum / static_cast<double>(finite);
  if (finite > 1) {
    double ss = 0.0;
    for (const auto& row : rows)
      if (!row.record.budget_exceeded()) {
        const double d = static_cast<double>(*row.record.repair_distance) - s.mean;
        ss += d * d;
      }
    s.stddev = std::sqrt(ss / static_cast<double>(finite - 1));
    s.ci95 = 1.96 * s.stddev / std::sqrt(static_cast<double>(finite));
  }
  return s;
}

// Allocates `instances` lattices and records the repair distance of every
// (cell, channel) perturbation. SON instances that fail to converge are
// skipped and counted. Instances are independent and may run on `workers`
// threads without changing the report.
inline StabilityReport stability_experiment(const StabilityConfig& cfg, unsigned workers = 1) {
  StabilityReport rep{cfg, {}, {}};
  if (cfg.allocator == Allocator::centralized)
    (void)centralized_allocate(cfg.width, cfg.height, cfg.channels, cfg.neighborhood, cfg.boundary);
  else if (cfg.channels < 1)
    throw PreconditionError("channel count must be positive");
  std::vector<std::vector<StabilityRow>> per_instance(cfg.instances);
  std::vector<unsigned char> converged(cfg.instances, 1);
  parallel_for(cfg.instances, workers, [&](std::size_t i) {
    const auto inst_seed = derive_seed(cfg.seed, {i});
    std::optional<ChannelLattice> lattice;
    if (cfg.allocator == Allocator::centralized) {
      lattice = centralized_allocate(cfg.width, cfg.height, cfg.channels, cfg.neighborhood, cfg.boundary);
    } else {
      auto res = son_allocate(cfg.width, cfg.height, cfg.channels, cfg.neighborhood, inst_seed, cfg.max_sweeps,
                              cfg.boundary, cfg.fallback);
      if (!res.converged) {
        converged[i] = 0;
        return;
      }
      lattice = std::move(res.lattice);
    }
    std::vector<std::size_t> cells(lattice->size());
    for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
    if (cfg.cell_sample > 0 && cfg.cell_sample < cells.size()) {
      Rng rng(derive_seed(inst_seed, {0x5a3b1eULL}));
      rng.shuffle(cells.begin(), cells.end());
      cells.resize(cfg.cell_sample);
      std::sort(cells.begin(), cells.end());
    }
    auto& rows = per_instance[i];
    for (std::size_t c : cells)
      for (Channel ch = 0; ch < cfg.channels; ++ch)
        rows.push_back({i, repair_distance(*lattice, lattice->coord(c), ch, cfg.budget)});
  });
  for (auto& rows : per_instance)
    for (auto& row : rows) rep.rows.push_back(std::move(row));
  rep.summary = summarize(rep.rows);
  rep.summary.unconverged_instances =
      static_cast<std::size_t>(std::count(converged.begin(), converged.end(), static_cast<unsigned char>(0)));
  return rep;
}

inline void write_stability_csv_header(std::ostream& out) {
  out << "allocator,instance,cell_x,cell_y,forced_channel,c_or_exceeded\n";
}

inline void write_stability_rows(std::ostream& out, const StabilityReport& rep) {
  for (const auto& row : rep.rows) {
    const auto& r = row.record;
    out << to_string(rep.config.allocator) << ',' << row.instance << ',' << r.cell.x << ',' << r.cell.y << ','
        << r.forced_channel << ',' << (r.budget_exceeded() ? std::string("exceeded") : std::to_string(*r.repair_distance))
        << '\n';
  }
}

inline void write_stability_summary(std::ostream& out, const StabilityReport& rep) {
  const auto& s = rep.summary;
  const std::string a = to_string(rep.config.allocator);
  out << "# summary " << a << '\n';
  out << "# " << a << ".records: " << s.records << '\n';
  out << "# " << a << ".mean_c: " << fmt(s.mean) << '\n';
  out << "# " << a << ".ci95: " << fmt(s.ci95) << '\n';
  out << "# " << a << ".max_c: " << s.max << '\n';
  out << "# " << a << ".budget_exceeded: " << s.budget_exceeded << '\n';
  out << "# " << a << ".unconverged_instances: " << s.unconverged_instances << '\n';
  out << "# " << a << ".histogram:";
  for (const auto& [c, n] : s.histogram) out << ' ' << c << ':' << n;
  out << '\n';
}

struct StabilityComparison {
  double son_mean = 0.0, son_ci95 = 0.0;
  double centralized_mean = 0.0, centralized_ci95 = 0.0;
  // The self-organized allocation needs fewer repairs on average.
  bool son_more_stable = false;
  // Intervals do not overlap.
  bool separated = false;
};

inline StabilityComparison compare_stability(const StabilitySummary& son, const StabilitySummary& centralized) {
  StabilityComparison c{son.mean, son.ci95, centralized.mean, centralized.ci95};
  c.son_more_stable = son.mean < centralized.mean;
  c.separated = son.mean + son.ci95 < centralized.mean - centralized.ci95 ||
                centralized.mean + centralized.ci95 < son.mean - son.ci95;
  return c;
}

}  // namespace cxnet
