#pragma once

// Command-line front end. Kept in a header so tests can drive commands
// in-process; tools/main.cpp is a thin wrapper.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cxnet/cxnet.hpp"

namespace cxnet::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kPreconditionError = 2 };

using Provenance = std::vector<std::pair<std::string, std::string>>;

// Every output starts with the tool version, command, resolved parameters and
// seed. The worker count is deliberately absent: it never changes results.
inline void write_header(std::ostream& out, const std::string& command, const Provenance& config, std::uint64_t seed) {
  out << "# cxnet " << kVersion << '\n';
  out << "# command: " << command << '\n';
  out << "# config:";
  for (const auto& [k, v] : config) out << ' ' << k << '=' << v;
  out << '\n';
  out << "# seed: " << seed << '\n';
}

inline std::pair<std::size_t, std::size_t> parse_dims(const std::string& s) {
  const auto x = s.find('x');
  std::size_t w = 0, h = 0, used_w = 0, used_h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    w = std::stoul(s.substr(0, x), &used_w);
    h = std::stoul(s.substr(x + 1), &used_h);
  } catch (const std::exception&) {
    throw InputError("dimensions '" + s + "' must look like WxH");
  }
  if (used_w != x || used_h != s.size() - x - 1) throw InputError("dimensions '" + s + "' must look like WxH");
  if (w == 0 || h == 0) throw PreconditionError("lattice dimensions must be positive");
  return {w, h};
}

// "5", "1,2,7" or "1..30".
inline std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) throw InputError("bad seed '" + t + "' in seed list '" + s + "'");
    return v;
  };
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const auto lo = num(s.substr(0, dots)), hi = num(s.substr(dots + 2));
    if (hi < lo) throw PreconditionError("empty seed range '" + s + "'");
    if (hi - lo > 1'000'000) throw PreconditionError("seed range '" + s + "' too large");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(num(tok));
  if (out.empty()) throw InputError("empty seed list");
  return out;
}

inline std::vector<Offset> parse_offsets(const std::string& s) {
  std::vector<Offset> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (tok.empty()) continue;
    const auto comma = tok.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(tok);
      out.push_back({std::stoll(tok.substr(0, comma)), std::stoll(tok.substr(comma + 1))});
    } catch (const std::exception&) {
      throw InputError("template offset '" + tok + "' must look like dx,dy");
    }
  }
  return out;
}

inline std::string dims_str(std::size_t w, std::size_t h) { return std::to_string(w) + "x" + std::to_string(h); }

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  unsigned workers = 1;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& argv) {
    CLI::App app{"cxnet: complex-systems metrics and simulations for networks", "cxnet"};
    app.set_config("--config", "", "Read options from an INI/TOML file ([subcommand] sections)");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    define_cfc(app);
    define_son_stability(app);
    define_son_run(app);
    define_excess_entropy(app);
    define_abm(app);
    define_correlate(app);

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    if (!args.empty()) args.pop_back();  // program name
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kOk : kInputError;
    }
    try {
      const CLI::App* chosen = app.get_subcommands().front();
      common_ = *common_of_.at(chosen);
      if (auto it = lattice_of_.find(chosen); it != lattice_of_.end()) lat_ = it->second;
      if (common_.workers == 0) throw PreconditionError("--workers must be >= 1");
      std::ostringstream buf;
      action_(buf);
      emit(buf.str());
      return kOk;
    } catch (const PreconditionError& e) {
      err_ << "error: " << e.what() << '\n';
      return kPreconditionError;
    } catch (const InputError& e) {
      err_ << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kInputError;
    }
  }

 private:
  // Each subcommand has its own defaults; the chosen one is copied into
  // common_ before its action runs.
  void add_common(CLI::App* sub, std::uint64_t default_seed) {
    Common& c = per_command_.emplace_back();
    c.seed = default_seed;
    sub->add_option("--seed", c.seed, "Base RNG seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output file (default: standard output)");
    sub->add_option("--workers", c.workers, "Worker threads; results do not depend on it")->capture_default_str();
    common_of_[sub] = &c;
  }

  void emit(const std::string& text) {
    if (common_.out.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(common_.out, std::ios::binary);
    if (!f) throw InputError("cannot open output file '" + common_.out + "'");
    f << text;
  }

  void add_sampling(CLI::App* sub) {
    sub->add_option("--mode", sampling_mode_, "Subgraph evaluation: exhaustive or sample")
        ->check(CLI::IsMember({"exhaustive", "sample"}))
        ->capture_default_str();
    sub->add_option("--samples", sampling_.sample_count, "Subsets drawn per (scale, size) when sampling")->capture_default_str();
    sub->add_option("--exhaustive-limit", sampling_.exhaustive_limit, "Largest C(N,j) evaluated exhaustively")
        ->capture_default_str();
  }

  SamplingPolicy resolved_sampling() const {
    SamplingPolicy p = sampling_;
    p.mode = sampling_mode_ == "sample" ? SamplingMode::uniform_sample : SamplingMode::exhaustive;
    p.seed = common_.seed;
    if (p.mode == SamplingMode::uniform_sample && p.sample_count == 0)
      throw PreconditionError("--samples must be positive");
    return p;
  }

  void sampling_provenance(Provenance& p) const {
    p.emplace_back("mode", sampling_mode_);
    p.emplace_back("samples", std::to_string(sampling_.sample_count));
    p.emplace_back("exhaustive_limit", std::to_string(sampling_.exhaustive_limit));
  }

  void add_ensemble(CLI::App* sub) {
    sub->add_option("--kind", kind_, "erdos-renyi, watts-strogatz or barabasi-albert")->capture_default_str();
    sub->add_option("--nodes", ensemble_.nodes, "Nodes per graph")->capture_default_str();
    sub->add_option("--p", ensemble_.edge_probability, "Erdos-Renyi edge probability")->capture_default_str();
    sub->add_option("--ring-degree", ensemble_.ring_degree, "Watts-Strogatz ring degree")->capture_default_str();
    sub->add_option("--rewire", ensemble_.rewiring_probability, "Watts-Strogatz rewiring probability")->capture_default_str();
    sub->add_option("--attachment", ensemble_.attachment, "Barabasi-Albert attachment count")->capture_default_str();
    sub->add_option("--graphs", ensemble_.graph_count, "Graphs in the ensemble")->capture_default_str();
    sub->add_flag("--allow-disconnected", allow_disconnected_, "Keep disconnected draws");
    sub->add_option("--max-retries", ensemble_.max_retries, "Redraws per graph under the connectivity filter")
        ->capture_default_str();
  }

  EnsembleSpec resolved_ensemble() const {
    EnsembleSpec s = ensemble_;
    s.kind = parse_ensemble_kind(kind_);
    s.seed = common_.seed;
    s.connected = !allow_disconnected_;
    return s;
  }

  void ensemble_provenance(Provenance& p, const EnsembleSpec& s) const {
    p.emplace_back("kind", to_string(s.kind));
    p.emplace_back("nodes", std::to_string(s.nodes));
    switch (s.kind) {
      case EnsembleKind::erdos_renyi: p.emplace_back("p", fmt(s.edge_probability)); break;
      case EnsembleKind::watts_strogatz:
        p.emplace_back("ring_degree", std::to_string(s.ring_degree));
        p.emplace_back("rewire", fmt(s.rewiring_probability));
        break;
      case EnsembleKind::barabasi_albert: p.emplace_back("attachment", std::to_string(s.attachment)); break;
    }
    p.emplace_back("graphs", std::to_string(s.graph_count));
    p.emplace_back("connected", s.connected ? "true" : "false");
  }

  // ---- cfc ---------------------------------------------------------------
  void define_cfc(CLI::App& app) {
    auto* sub = app.add_subcommand("cfc", "Functional complexity of a graph file or a generated ensemble");
    add_common(sub, 0);
    sub->add_option("--graph", graph_path_, "Edge-list file");
    sub->add_flag("--ensemble", use_ensemble_, "Evaluate a generated ensemble instead of a file");
    add_sampling(sub);
    add_ensemble(sub);
    sub->callback([this] { action_ = [this](std::ostream& o) { cmd_cfc(o); }; });
  }

  void cmd_cfc(std::ostream& o) {
    const auto policy = resolved_sampling();
    Provenance prov;
    if (!use_ensemble_) {
      if (graph_path_.empty()) throw InputError("cfc needs --graph FILE or --ensemble");
      std::ifstream f(graph_path_);
      if (!f) throw InputError("cannot read graph file '" + graph_path_ + "'");
      const auto g = read_edge_list(f);
      prov.emplace_back("graph", graph_path_);
      sampling_provenance(prov);
      const auto profile = functional_complexity(g, policy, common_.workers);
      if (profile.degenerate_scale)
        err_ << "warning: diameter < 2, functional complexity defined as 0\n";
      write_header(o, "cfc", prov, common_.seed);
      write_profile_csv(o, profile);
      return;
    }
    const auto spec = resolved_ensemble();
    validate(spec);
    ensemble_provenance(prov, spec);
    sampling_provenance(prov);
    std::vector<ComplexityProfile> profiles(spec.graph_count);
    parallel_for(spec.graph_count, common_.workers,
                 [&](std::size_t i) { profiles[i] = functional_complexity(generate_graph(spec, i), policy); });
    write_header(o, "cfc", prov, common_.seed);
    o << "graph_id,N,R,c_f,c_f_stderr,degenerate\n";
    for (std::size_t i = 0; i < profiles.size(); ++i)
      o << i << ',' << profiles[i].node_count << ',' << profiles[i].diameter << ',' << fmt(profiles[i].c_f) << ','
        << fmt(profiles[i].standard_error) << ',' << (profiles[i].degenerate_scale ? 1 : 0) << '\n';
  }

  // ---- lattice options shared by son-* and excess-entropy ------------------
  void add_lattice(CLI::App* sub, const std::string& default_dims, Channel default_channels) {
    LatticeOpts& l = lattice_opts_.emplace_back();
    l.dims = default_dims;
    l.channels = default_channels;
    sub->add_option("--dims", l.dims, "Lattice size WxH")->capture_default_str();
    sub->add_option("--channels", l.channels, "Channel count F")->capture_default_str();
    sub->add_option("--neighborhood", l.neighborhood, "moore or von-neumann")->capture_default_str();
    sub->add_option("--boundary", l.boundary, "toroidal or bounded")->capture_default_str();
    sub->add_option("--max-sweeps", l.max_sweeps, "Sweep limit for the self-organizing allocator")->capture_default_str();
    sub->add_option("--son-fallback", l.fallback, "Recolouring when no channel is free: least-conflicted or uniform")
        ->capture_default_str();
    lattice_of_[sub] = &l;
  }

  void lattice_provenance(Provenance& p) const { lattice_provenance(p, parse_neighborhood(lat_->neighborhood)); }
  void lattice_provenance(Provenance& p, Neighborhood nb) const {
    p.emplace_back("dims", lat_->dims);
    p.emplace_back("channels", std::to_string(lat_->channels));
    p.emplace_back("neighborhood", to_string(nb));
    p.emplace_back("boundary", to_string(parse_boundary(lat_->boundary)));
    p.emplace_back("max_sweeps", std::to_string(lat_->max_sweeps));
    p.emplace_back("son_fallback", to_string(parse_son_fallback(lat_->fallback)));
  }

  // ---- son-stability ------------------------------------------------------
  void define_son_stability(CLI::App& app) {
    auto* sub = app.add_subcommand("son-stability", "Repair-distance stability of SON vs centralized allocations");
    add_common(sub, 1);
    add_lattice(sub, "8x8", 5);
    lattice_opts_.back().neighborhood = "auto";
    sub->add_option("--allocator", allocator_, "son, centralized or both")->capture_default_str();
    sub->add_option("--instances", instances_, "Allocations per allocator")->capture_default_str();
    sub->add_option("--budget", budget_, "Largest repair searched exactly")->capture_default_str();
    sub->add_option("--cell-sample", cell_sample_, "Perturb this many random cells per instance (0 = all)")
        ->capture_default_str();
    sub->callback([this] { action_ = [this](std::ostream& o) { cmd_son_stability(o); }; });
  }

  // "auto": Moore, except von Neumann for a centralized-only run with fewer
  // channels than the Moore tile needs.
  Neighborhood stability_neighborhood(const std::vector<Allocator>& which) const {
    if (lat_->neighborhood != "auto") return parse_neighborhood(lat_->neighborhood);
    const bool centralized_only = which.size() == 1 && which.front() == Allocator::centralized;
    return centralized_only && lat_->channels < 4 ? Neighborhood::von_neumann : Neighborhood::moore;
  }

  void cmd_son_stability(std::ostream& o) {
    const auto [w, h] = parse_dims(lat_->dims);
    std::vector<Allocator> which;
    if (allocator_ == "both")
      which = {Allocator::son, Allocator::centralized};
    else
      which = {parse_allocator(allocator_)};
    StabilityConfig cfg;
    cfg.width = w;
    cfg.height = h;
    cfg.channels = lat_->channels;
    cfg.neighborhood = stability_neighborhood(which);
    cfg.boundary = parse_boundary(lat_->boundary);
    cfg.instances = instances_;
    cfg.seed = common_.seed;
    cfg.budget = budget_;
    cfg.max_sweeps = lat_->max_sweeps;
    cfg.fallback = parse_son_fallback(lat_->fallback);
    cfg.cell_sample = cell_sample_;
    if (lat_->channels < 1) throw PreconditionError("--channels must be positive");
    std::vector<StabilityReport> reports;
    for (Allocator a : which) {
      cfg.allocator = a;
      reports.push_back(stability_experiment(cfg, common_.workers));
    }
    Provenance prov{{"allocator", allocator_}};
    lattice_provenance(prov, cfg.neighborhood);
    prov.emplace_back("instances", std::to_string(instances_));
    prov.emplace_back("budget", std::to_string(budget_));
    prov.emplace_back("cell_sample", std::to_string(cell_sample_));
    write_header(o, "son-stability", prov, common_.seed);
    write_stability_csv_header(o);
    for (const auto& r : reports) write_stability_rows(o, r);
    for (const auto& r : reports) write_stability_summary(o, r);
    if (reports.size() == 2 && reports[0].summary.records > 0 && reports[1].summary.records > 0) {
      const auto cmp = compare_stability(reports[0].summary, reports[1].summary);
      o << "# comparison: son_mean=" << fmt(cmp.son_mean) << " +/- " << fmt(cmp.son_ci95)
        << " centralized_mean=" << fmt(cmp.centralized_mean) << " +/- " << fmt(cmp.centralized_ci95) << '\n';
      o << "# comparison: " << (cmp.son_more_stable ? "son more stable" : "DEVIATION: son not more stable")
        << (cmp.separated ? " (intervals separated)" : " (intervals overlap)") << '\n';
    }
  }

  // ---- son-run --------------------------------------------------------------
  void define_son_run(CLI::App& app) {
    auto* sub = app.add_subcommand("son-run", "Run the self-organizing allocator and write the lattice(s)");
    add_common(sub, 1);
    add_lattice(sub, "10x10", 5);
    sub->add_option("--runs", runs_, "Independent allocations (seeds derived from --seed)")->capture_default_str();
    sub->callback([this] { action_ = [this](std::ostream& o) { cmd_son_run(o); }; });
  }

  void cmd_son_run(std::ostream& o) {
    const auto [w, h] = parse_dims(lat_->dims);
    if (lat_->channels < 1) throw PreconditionError("--channels must be positive");
    const auto nb = parse_neighborhood(lat_->neighborhood);
    const auto bd = parse_boundary(lat_->boundary);
    const auto fb = parse_son_fallback(lat_->fallback);
    std::vector<std::optional<SonResult>> results(runs_);
    parallel_for(runs_, common_.workers, [&](std::size_t i) {
      results[i] = son_allocate(w, h, lat_->channels, nb, run_seed(i), lat_->max_sweeps, bd, fb);
    });
    Provenance prov;
    lattice_provenance(prov);
    prov.emplace_back("runs", std::to_string(runs_));
    write_header(o, "son-run", prov, common_.seed);
    for (std::size_t i = 0; i < runs_; ++i) {
      const auto& r = *results[i];
      o << "# run " << i << " seed=" << run_seed(i) << " sweeps=" << r.sweeps << " conflicts=" << r.final_conflicts
        << " converged=" << (r.converged ? "true" : "false") << '\n';
      write_lattice(o, r.lattice);
    }
  }

  std::uint64_t run_seed(std::size_t i) const { return runs_ == 1 ? common_.seed : derive_seed(common_.seed, {i}); }

  // ---- excess-entropy -------------------------------------------------------
  void define_excess_entropy(CLI::App& app) {
    auto* sub = app.add_subcommand("excess-entropy", "Conditional entropies h(M), entropy rate and excess entropy");
    add_common(sub, 1);
    add_lattice(sub, "32x32", 4);
    sub->add_option("--lattice", lattice_files_, "Lattice file(s); each may hold several lattices");
    sub->add_option("--generator", generator_, "Generate samples instead: son, iid or constant")
        ->check(CLI::IsMember({"son", "iid", "constant"}));
    sub->add_option("--lattices", lattice_count_, "Generated samples")->capture_default_str();
    sub->add_option("--mmax", m_max_, "Largest context size M")->capture_default_str();
    sub->add_option("--offsets", offsets_, "Context template as 'dx,dy;dx,dy;...' (default: Chebyshev rings)");
    sub->add_option("--tolerance", tolerance_, "Convergence tolerance on h(M_max) - h(M_max-1)")->capture_default_str();
    sub->callback([this] { action_ = [this](std::ostream& o) { cmd_excess_entropy(o); }; });
  }

  void cmd_excess_entropy(std::ostream& o) {
    if (m_max_ < 1) throw PreconditionError("--mmax must be >= 1");
    std::vector<ChannelLattice> samples;
    Provenance prov;
    if (!lattice_files_.empty()) {
      for (const auto& path : lattice_files_) {
        std::ifstream f(path);
        if (!f) throw InputError("cannot read lattice file '" + path + "'");
        for (auto& l : read_lattices(f)) samples.push_back(std::move(l));
      }
      std::string joined;
      for (const auto& p : lattice_files_) joined += (joined.empty() ? "" : ",") + p;
      prov.emplace_back("lattice", joined);
    } else if (!generator_.empty()) {
      const auto [w, h] = parse_dims(lat_->dims);
      if (lat_->channels < 1) throw PreconditionError("--channels must be positive");
      const auto nb = parse_neighborhood(lat_->neighborhood);
      const auto bd = parse_boundary(lat_->boundary);
    const auto fb = parse_son_fallback(lat_->fallback);
      std::vector<std::optional<ChannelLattice>> gen(lattice_count_);
      parallel_for(lattice_count_, common_.workers, [&](std::size_t i) {
        const auto s = derive_seed(common_.seed, {i});
        if (generator_ == "son") {
          gen[i] = son_allocate(w, h, lat_->channels, nb, s, lat_->max_sweeps, bd, fb).lattice;
        } else if (generator_ == "iid") {
          Rng rng(s);
          std::vector<Channel> cells(w * h);
          for (auto& c : cells) c = static_cast<Channel>(rng.below(lat_->channels));
          gen[i] = ChannelLattice(w, h, lat_->channels, nb, bd, std::move(cells));
        } else {
          gen[i] = ChannelLattice(w, h, lat_->channels, nb, bd);
        }
      });
      for (auto& l : gen) samples.push_back(std::move(*l));
      prov.emplace_back("generator", generator_);
      prov.emplace_back("lattices", std::to_string(lattice_count_));
      lattice_provenance(prov);
    } else {
      throw InputError("excess-entropy needs --lattice FILE... or --generator");
    }
    const auto tmpl = offsets_.empty() ? NeighborhoodTemplate::chebyshev_for(m_max_)
                                       : NeighborhoodTemplate(parse_offsets(offsets_));
    prov.emplace_back("mmax", std::to_string(m_max_));
    prov.emplace_back("template", offsets_.empty() ? std::string("chebyshev") : offsets_);
    prov.emplace_back("tolerance", fmt(tolerance_));
    const auto p = estimate_excess_entropy(samples, m_max_, tmpl, tolerance_);
    write_header(o, "excess-entropy", prov, common_.seed);
    o << "M,h\n";
    for (std::size_t m = 0; m < p.h_of_M.size(); ++m) o << (m + 1) << ',' << fmt(p.h_of_M[m]) << '\n';
    o << "# summary\n";
    o << "# samples: " << p.sample_count << '\n';
    o << "# observations: " << p.sample_count * samples.front().size() << '\n';
    o << "# h_hat: " << fmt(p.h_hat) << '\n';
    o << "# e_c: " << fmt(p.e_c) << '\n';
    o << "# converged: " << (p.converged ? "true" : "false") << '\n';
    o << "# offsets:";
    for (const auto& off : p.template_offsets) o << ' ' << off.dx << ',' << off.dy;
    o << '\n';
    if (!p.converged) err_ << "warning: h(M) has not converged at M_max = " << m_max_ << '\n';
  }

  // ---- abm ------------------------------------------------------------------
  void define_abm(CLI::App& app) {
    auto* sub = app.add_subcommand("abm", "Single-intersection traffic ABM with Aloha/CSMA sensor reporting");
    add_common(sub, 1);
    sub->add_option("--mac", mac_, "aloha, csma or ideal")->capture_default_str();
    sub->add_flag("--ideal-channel", ideal_channel_, "Deliver every pending report (bypass the MAC)");
    sub->add_option("--iterations", scenario_.iterations, "World iterations per run")->capture_default_str();
    sub->add_option("--road-length", scenario_.road_length, "Approach cells per road")->capture_default_str();
    sub->add_option("--arrival-probability", scenario_.arrival_probability, "Per-edge arrival probability")
        ->capture_default_str();
    sub->add_option("--green-period", scenario_.lights.green_period, "Fixed-cycle green time")->capture_default_str();
    sub->add_option("--policy", policy_, "fixed or queue")->capture_default_str();
    sub->add_option("--min-green", scenario_.lights.min_green, "Queue policy minimum green time")->capture_default_str();
    sub->add_option("--hysteresis", scenario_.lights.hysteresis, "Queue policy switching margin")->capture_default_str();
    sub->add_option("--persistence", scenario_.mac.aloha_persistence, "Aloha transmit probability")->capture_default_str();
    sub->add_option("--backoff-window", scenario_.mac.aloha_backoff_window, "Aloha retransmission backoff window")
        ->capture_default_str();
    sub->add_option("--contention-window", scenario_.mac.csma_contention_window, "CSMA start offsets per slot")
        ->capture_default_str();
    sub->add_option("--message-slots", scenario_.mac.message_slots, "Slots per message")->capture_default_str();
    sub->add_option("--slots-per-iteration", scenario_.slots_per_iteration, "MAC slots per world iteration")
        ->capture_default_str();
    sub->add_option("--seeds", seeds_, "Seed list: N, a,b,c or lo..hi (overrides --seed)");
    sub->add_option("--summary", summary_path_, "Write the KPI summary as JSON to this file");
    sub->callback([this] { action_ = [this](std::ostream& o) { cmd_abm(o); }; });
  }

  void cmd_abm(std::ostream& o) {
    auto cfg = scenario_;
    cfg.mac.mac = ideal_channel_ ? traffic::Mac::ideal : traffic::parse_mac(mac_);
    if (policy_ == "fixed")
      cfg.lights.kind = traffic::LightPolicyKind::fixed_cycle;
    else if (policy_ == "queue")
      cfg.lights.kind = traffic::LightPolicyKind::queue_responsive;
    else
      throw PreconditionError("unknown light policy '" + policy_ + "' (expected fixed or queue)");
    const auto seeds = seeds_.empty() ? std::vector<std::uint64_t>{common_.seed} : parse_seeds(seeds_);
    const auto runs = traffic::run_seeds(cfg, seeds, common_.workers);

    Provenance prov{{"mac", traffic::to_string(cfg.mac.mac)},
                    {"iterations", std::to_string(cfg.iterations)},
                    {"road_length", std::to_string(cfg.road_length)},
                    {"arrival_probability", fmt(cfg.arrival_probability)},
                    {"policy", policy_},
                    {"green_period", std::to_string(cfg.lights.green_period)},
                    {"min_green", std::to_string(cfg.lights.min_green)},
                    {"hysteresis", std::to_string(cfg.lights.hysteresis)},
                    {"persistence", fmt(cfg.mac.aloha_persistence)},
                    {"backoff_window", std::to_string(cfg.mac.aloha_backoff_window)},
                    {"contention_window", std::to_string(cfg.mac.csma_contention_window)},
                    {"message_slots", std::to_string(cfg.mac.message_slots)},
                    {"slots_per_iteration", std::to_string(cfg.slots_per_iteration)},
                    {"seeds", seeds_.empty() ? std::to_string(common_.seed) : seeds_}};
    write_header(o, "abm", prov, seeds.front());
    traffic::write_trace_header(o);
    for (const auto& r : runs) traffic::write_trace_rows(o, r);

    nlohmann::ordered_json summary;
    summary["mac"] = traffic::to_string(cfg.mac.mac);
    summary["runs"] = nlohmann::ordered_json::array();
    std::vector<double> mean_gaps;
    for (const auto& r : runs) {
      const auto& s = r.summary;
      mean_gaps.push_back(s.mean_gap);
      nlohmann::ordered_json hist = nlohmann::ordered_json::object();
      for (const auto& [g, n] : s.gap_histogram) hist[std::to_string(g)] = n;
      summary["runs"].push_back({{"seed", r.config.seed},
                                 {"mean_gap", s.mean_gap},
                                 {"mean_abs_gap", s.mean_abs_gap},
                                 {"delivery_ratio", s.delivery_ratio},
                                 {"collision_rate", s.collision_rate},
                                 {"deliveries", s.deliveries},
                                 {"attempts", s.attempts},
                                 {"collisions", s.collisions},
                                 {"cars_created", s.cars_created},
                                 {"cars_departed", s.cars_departed},
                                 {"cars_on_grid", s.cars_on_grid},
                                 {"blocked_arrivals", s.blocked_arrivals},
                                 {"invariants_held", s.invariants_held},
                                 {"gap_histogram", hist}});
    }
    const auto agg = traffic::mean_interval(mean_gaps);
    summary["aggregate"] = {{"seeds", agg.n}, {"mean_gap", agg.mean}, {"ci95", agg.ci95}};
    const std::string dumped = summary.dump(2);
    std::istringstream lines(dumped);
    std::string line;
    o << "# summary\n";
    while (std::getline(lines, line)) o << "# " << line << '\n';
    if (!summary_path_.empty()) {
      std::ofstream f(summary_path_, std::ios::binary);
      if (!f) throw InputError("cannot open summary file '" + summary_path_ + "'");
      f << dumped << '\n';
    }
  }

  // ---- correlate --------------------------------------------------------------
  void define_correlate(CLI::App& app) {
    auto* sub = app.add_subcommand("correlate", "Correlate functional complexity with classical topology metrics");
    add_common(sub, 11);
    add_ensemble(sub);
    add_sampling(sub);
    sub->callback([this] { action_ = [this](std::ostream& o) { cmd_correlate(o); }; });
  }

  void cmd_correlate(std::ostream& o) {
    const auto spec = resolved_ensemble();
    const auto policy = resolved_sampling();
    const auto rep = correlation_report(spec, policy, common_.workers);
    Provenance prov;
    ensemble_provenance(prov, spec);
    sampling_provenance(prov);
    write_header(o, "correlate", prov, common_.seed);
    write_correlation_csv(o, rep);
    if (!rep.violations.empty()) err_ << "warning: |rho| >= 0.5 for some metrics (see report)\n";
  }

  std::ostream& out_;
  std::ostream& err_;
  std::function<void(std::ostream&)> action_;
  Common common_;
  std::deque<Common> per_command_;
  std::map<const CLI::App*, Common*> common_of_;

  std::string graph_path_;
  bool use_ensemble_ = false;
  SamplingPolicy sampling_;
  std::string sampling_mode_ = "exhaustive";
  EnsembleSpec ensemble_;
  std::string kind_ = "erdos-renyi";
  bool allow_disconnected_ = false;

  struct LatticeOpts {
    std::string dims;
    Channel channels = 5;
    std::string neighborhood = "moore";
    std::string boundary = "toroidal";
    std::size_t max_sweeps = 10'000;
    std::string fallback = "least-conflicted";
  };
  std::deque<LatticeOpts> lattice_opts_;
  std::map<const CLI::App*, LatticeOpts*> lattice_of_;
  const LatticeOpts* lat_ = nullptr;
  std::string allocator_ = "both";
  std::size_t instances_ = 20;
  std::size_t budget_ = 8;
  std::size_t cell_sample_ = 0;
  std::size_t runs_ = 1;

  std::vector<std::string> lattice_files_;
  std::string generator_;
  std::size_t lattice_count_ = 100;
  std::size_t m_max_ = 4;
  std::string offsets_;
  double tolerance_ = 1e-2;

  traffic::ScenarioConfig scenario_;
  std::string mac_ = "csma";
  bool ideal_channel_ = false;
  std::string policy_ = "fixed";
  std::string seeds_;
  std::string summary_path_;
};

inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Runner r(out, err);
  return r.run(argv);
}

}  // namespace cxnet::cli
