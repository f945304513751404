#pragma once

// Agent-based model of a single signalised intersection observed by roadside
// sensors that report to a decision maker (DM) over a shared wireless
// channel. The quantity of interest is the gap between the number of cars
// actually waiting and the number the DM believes are waiting.
//
// Geometry: two perpendicular roads cross in a 2x2 box. Each of the four
// directional lanes is a path of 2L+2 cells: approach cells 0..L-1 (stop line
// at L-1), box cells L and L+1, exit cells L+2..2L+1. Every box cell is
// shared by one vertical and one horizontal lane.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <ostream>
#include <string>
#include <vector>

#include "cxnet/error.hpp"
#include "cxnet/format.hpp"
#include "cxnet/parallel.hpp"
#include "cxnet/rng.hpp"

namespace cxnet::traffic {

enum class Lane : std::size_t { southbound = 0, northbound = 1, eastbound = 2, westbound = 3 };
inline constexpr std::size_t kLanes = 4;

// Axis 0 carries the vertical lanes, axis 1 the horizontal ones.
inline constexpr std::size_t axis_of(std::size_t lane) noexcept { return lane < 2 ? 0 : 1; }

enum class Light { green, red };

struct Car {
  std::uint64_t id = 0;
  std::size_t lane = 0;
  std::size_t pos = 0;
  bool moved = true;  // displaced during the last step (arrivals count as moved)
};

class TrafficWorld {
 public:
  TrafficWorld(std::size_t road_length, double arrival_probability)
      : road_length_(road_length), arrival_probability_(arrival_probability) {
    if (road_length_ < 1) throw PreconditionError("road length must be >= 1");
    if (!(arrival_probability_ >= 0.0 && arrival_probability_ <= 1.0))
      throw PreconditionError("arrival probability outside [0, 1]");
    const auto side = grid_side();
    occupancy_.assign(side * side, kEmpty);
  }

  std::size_t road_length() const noexcept { return road_length_; }
  std::size_t lane_length() const noexcept { return 2 * road_length_ + 2; }
  std::size_t stop_line() const noexcept { return road_length_ - 1; }
  std::size_t grid_side() const noexcept { return 2 * road_length_ + 2; }

  const std::vector<Car>& cars() const noexcept { return cars_; }
  std::uint64_t created() const noexcept { return created_; }
  std::uint64_t departed() const noexcept { return departed_; }
  std::uint64_t blocked_arrivals() const noexcept { return blocked_; }
  std::uint64_t iteration() const noexcept { return iteration_; }

  Light light(std::size_t axis) const { return lights_.at(axis); }
  void set_green(std::size_t axis) {
    lights_[0] = axis == 0 ? Light::green : Light::red;
    lights_[1] = axis == 1 ? Light::green : Light::red;
  }

  // Grid cell index of (lane, pos).
  std::size_t cell_of(std::size_t lane, std::size_t pos) const {
    const std::size_t l = road_length_, last = lane_length() - 1, side = grid_side();
    std::size_t x = 0, y = 0;
    switch (static_cast<Lane>(lane)) {
      case Lane::southbound: x = l + 1; y = pos; break;
      case Lane::northbound: x = l; y = last - pos; break;
      case Lane::eastbound: x = pos; y = l; break;
      case Lane::westbound: x = last - pos; y = l + 1; break;
    }
    return y * side + x;
  }

  bool occupied(std::size_t lane, std::size_t pos) const { return occupancy_[cell_of(lane, pos)] != kEmpty; }

  // Car occupying (lane, pos), if any.
  std::optional<Car> car_at(std::size_t lane, std::size_t pos) const {
    const auto slot = occupancy_[cell_of(lane, pos)];
    if (slot == kEmpty) return std::nullopt;
    return cars_[slot];
  }

  // Place a car directly (tests and scenario setup).
  void place_car(std::size_t lane, std::size_t pos) {
    if (lane >= kLanes || pos >= lane_length()) throw PreconditionError("car position outside the road network");
    if (occupied(lane, pos)) throw PreconditionError("cell already occupied");
    occupancy_[cell_of(lane, pos)] = cars_.size();
    cars_.push_back({next_id_++, lane, pos, true});
    ++created_;
  }

  // One iteration: arrivals at the four edges, then car movement in lane
  // order from the front of each lane backwards, then removal of cars that
  // drove off the far edge. New arrivals do not move in their first step.
  void step(Rng& rng) {
    for (auto& car : cars_) car.moved = false;
    const std::size_t existing = cars_.size();
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
      if (!rng.bernoulli(arrival_probability_)) continue;
      if (occupied(lane, 0)) {
        ++blocked_;
        continue;
      }
      occupancy_[cell_of(lane, 0)] = cars_.size();
      cars_.push_back({next_id_++, lane, 0, true});
      ++created_;
    }

    std::vector<std::size_t> order(existing);
    for (std::size_t i = 0; i < existing; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (cars_[a].lane != cars_[b].lane) return cars_[a].lane < cars_[b].lane;
      return cars_[a].pos > cars_[b].pos;
    });
    std::vector<unsigned char> gone(cars_.size(), 0);
    for (std::size_t i : order) {
      Car& car = cars_[i];
      const std::size_t next = car.pos + 1;
      if (next == lane_length()) {
        occupancy_[cell_of(car.lane, car.pos)] = kEmpty;
        gone[i] = 1;
        car.moved = true;
        continue;
      }
      if (car.pos == stop_line()) {
        // Enter the box only on green and only when both box cells are free.
        if (lights_[axis_of(car.lane)] != Light::green) continue;
        if (occupied(car.lane, next) || occupied(car.lane, next + 1)) continue;
      }
      if (occupied(car.lane, next)) continue;
      occupancy_[cell_of(car.lane, car.pos)] = kEmpty;
      car.pos = next;
      car.moved = true;
      occupancy_[cell_of(car.lane, car.pos)] = i;
    }
    std::vector<Car> kept;
    kept.reserve(cars_.size());
    for (std::size_t i = 0; i < cars_.size(); ++i) {
      if (gone[i])
        ++departed_;
      else
        kept.push_back(cars_[i]);
    }
    cars_ = std::move(kept);
    for (std::size_t i = 0; i < cars_.size(); ++i) occupancy_[cell_of(cars_[i].lane, cars_[i].pos)] = i;
    ++iteration_;
  }

  // created == on grid + departed
  bool conserves_cars() const noexcept { return created_ == cars_.size() + departed_; }

  // At most one car per cell and the occupancy map agrees with the car list.
  bool single_occupancy() const {
    std::vector<unsigned char> seen(occupancy_.size(), 0);
    for (std::size_t i = 0; i < cars_.size(); ++i) {
      const auto cell = cell_of(cars_[i].lane, cars_[i].pos);
      if (seen[cell] || occupancy_[cell] != i) return false;
      seen[cell] = 1;
    }
    return std::count_if(occupancy_.begin(), occupancy_.end(), [](auto v) { return v != kEmpty; }) ==
           static_cast<std::ptrdiff_t>(cars_.size());
  }

 private:
  static constexpr std::size_t kEmpty = ~std::size_t{0};

  std::size_t road_length_;
  double arrival_probability_;
  std::vector<Car> cars_;
  // Index into cars_ per grid cell.
  std::vector<std::size_t> occupancy_;
  std::array<Light, 2> lights_{Light::green, Light::red};
  std::uint64_t next_id_ = 0, created_ = 0, departed_ = 0, blocked_ = 0, iteration_ = 0;
};

// ---------------------------------------------------------------------------
// Sensors: one per approach cell, id = lane * L + pos.
// ---------------------------------------------------------------------------

enum class SensorState : std::uint8_t { inactive, moving_car, static_car };

inline std::string to_string(SensorState s) {
  switch (s) {
    case SensorState::inactive: return "inactive";
    case SensorState::moving_car: return "moving";
    case SensorState::static_car: return "static";
  }
  return "?";
}

struct SensorField {
  std::vector<SensorState> state;
  // Report waiting to be sent; carries the latest state.
  std::vector<unsigned char> pending;

  explicit SensorField(std::size_t road_length = 0)
      : state(kLanes * road_length, SensorState::inactive), pending(kLanes * road_length, 0) {}

  std::size_t size() const noexcept { return state.size(); }
  std::vector<std::size_t> pending_ids() const {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < pending.size(); ++i)
      if (pending[i]) ids.push_back(i);
    return ids;
  }
};

// Reads every approach cell. Sensors whose reading changed queue a report.
inline void sense(const TrafficWorld& w, SensorField& s) {
  const std::size_t l = w.road_length();
  for (std::size_t lane = 0; lane < kLanes; ++lane)
    for (std::size_t pos = 0; pos < l; ++pos) {
      const auto car = w.car_at(lane, pos);
      const SensorState now = !car ? SensorState::inactive : car->moved ? SensorState::moving_car : SensorState::static_car;
      const std::size_t id = lane * l + pos;
      if (now != s.state[id]) s.pending[id] = 1;
      s.state[id] = now;
    }
}

// Cars standing still on approach cells, per axis.
inline std::array<std::size_t, 2> waiting_per_axis(std::span<const SensorState> states, std::size_t road_length) {
  std::array<std::size_t, 2> out{0, 0};
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == SensorState::static_car) ++out[axis_of(i / road_length)];
  return out;
}

// ---------------------------------------------------------------------------
// Medium access
// ---------------------------------------------------------------------------

enum class Mac { aloha, csma, ideal };

inline std::string to_string(Mac m) {
  switch (m) {
    case Mac::aloha: return "aloha";
    case Mac::csma: return "csma";
    case Mac::ideal: return "ideal";
  }
  return "?";
}

inline Mac parse_mac(const std::string& s) {
  if (s == "aloha") return Mac::aloha;
  if (s == "csma") return Mac::csma;
  if (s == "ideal") return Mac::ideal;
  throw PreconditionError("unknown MAC '" + s + "' (expected aloha, csma or ideal)");
}

struct MacParams {
  Mac mac = Mac::csma;
  // Aloha: probability that an eligible pending sensor transmits in a slot.
  double aloha_persistence = 1.0;
  // Aloha: after a collision a sender waits 1..W slots before it is eligible again.
  std::size_t aloha_backoff_window = 32;
  // CSMA: senders pick a start offset in [0, W) within the slot; the earliest
  // claims the channel and everyone later senses it busy.
  std::size_t csma_contention_window = 32;
  // Slots a message occupies the channel.
  std::size_t message_slots = 1;
};

struct Delivery {
  std::size_t sensor = 0;
  SensorState state = SensorState::inactive;
};

struct MacOutcome {
  std::vector<Delivery> delivered;
  std::size_t collisions = 0;  // collision events (slots with >= 2 simultaneous starters)
  std::size_t attempts = 0;    // transmissions started
};

// Shared channel state carried across slots.
class MacChannel {
 public:
  MacChannel(MacParams params, std::size_t sensors) : p_(params), backoff_(sensors, 0) {
    if (!(p_.aloha_persistence >= 0.0 && p_.aloha_persistence <= 1.0))
      throw PreconditionError("Aloha persistence outside [0, 1]");
    if (p_.message_slots < 1) throw PreconditionError("message duration must be >= 1 slot");
    if (p_.csma_contention_window < 1) throw PreconditionError("CSMA contention window must be >= 1");
  }

  const MacParams& params() const noexcept { return p_; }
  bool busy() const noexcept { return remaining_ > 0; }
  std::optional<std::size_t> owner() const noexcept {
    return remaining_ > 0 ? std::optional<std::size_t>(owner_) : std::nullopt;
  }

  // Start a transmission that keeps the channel for the configured duration
  // (used by tests to model a sender that started in an earlier slot).
  void seize(std::size_t sensor, SensorState content, std::size_t slots_left) {
    owner_ = sensor;
    content_ = content;
    remaining_ = slots_left;
  }

  // One slot. Senders that start a transmission leave the pending set; losers
  // of a collision and deferring senders stay pending.
  MacOutcome round(SensorField& sensors, Rng& rng) {
    MacOutcome out;
    const auto pending = sensors.pending_ids();
    switch (p_.mac) {
      case Mac::ideal:
        for (auto id : pending) {
          out.delivered.push_back({id, sensors.state[id]});
          sensors.pending[id] = 0;
        }
        out.attempts = pending.size();
        break;
      case Mac::aloha: aloha(pending, sensors, rng, out); break;
      case Mac::csma: csma(pending, sensors, rng, out); break;
    }
    return out;
  }

 private:
  void finish_slot(MacOutcome& out) {
    if (remaining_ == 0) return;
    if (--remaining_ == 0) out.delivered.push_back({owner_, content_});
  }

  void aloha(const std::vector<std::size_t>& pending, SensorField& sensors, Rng& rng, MacOutcome& out) {
    std::vector<std::size_t> senders;
    for (auto id : pending) {
      if (backoff_[id] > 0) {
        --backoff_[id];
        continue;
      }
      if (rng.bernoulli(p_.aloha_persistence)) senders.push_back(id);
    }
    out.attempts = senders.size();
    if (senders.size() >= 2 || (busy() && !senders.empty())) {
      ++out.collisions;
      for (auto id : senders)
        backoff_[id] = p_.aloha_backoff_window == 0 ? 0 : 1 + rng.below(p_.aloha_backoff_window);
      if (busy()) {
        // No carrier sense: the ongoing message is destroyed and re-queued.
        remaining_ = 0;
        sensors.pending[owner_] = 1;
      }
    } else if (senders.size() == 1 && !busy()) {
      start(senders.front(), sensors);
    }
    finish_slot(out);
  }

  void csma(const std::vector<std::size_t>& pending, SensorField& sensors, Rng& rng, MacOutcome& out) {
    if (!busy() && !pending.empty()) {
      std::size_t earliest = p_.csma_contention_window;
      std::vector<std::size_t> starters;
      for (auto id : pending) {
        const auto offset = rng.below(p_.csma_contention_window);
        if (offset < earliest) {
          earliest = offset;
          starters.assign(1, id);
        } else if (offset == earliest) {
          starters.push_back(id);
        }
      }
      out.attempts = starters.size();
      if (starters.size() >= 2)
        ++out.collisions;
      else
        start(starters.front(), sensors);
    }
    finish_slot(out);
  }

  void start(std::size_t id, SensorField& sensors) {
    owner_ = id;
    content_ = sensors.state[id];
    remaining_ = p_.message_slots;
    sensors.pending[id] = 0;
  }

  MacParams p_;
  std::vector<std::size_t> backoff_;
  std::size_t owner_ = 0;
  SensorState content_ = SensorState::inactive;
  std::size_t remaining_ = 0;
};

// ---------------------------------------------------------------------------
// Decision maker and light control
// ---------------------------------------------------------------------------

struct DecisionMakerState {
  std::size_t road_length = 0;
  // Last state received from each sensor.
  std::vector<SensorState> perceived;
  // Perceived static cars per axis.
  std::array<std::size_t, 2> waiting{0, 0};

  explicit DecisionMakerState(std::size_t road_length_ = 0)
      : road_length(road_length_), perceived(kLanes * road_length_, SensorState::inactive) {}

  std::size_t perceived_waiting() const noexcept { return waiting[0] + waiting[1]; }
};

inline void dm_update(DecisionMakerState& dm, std::span<const Delivery> delivered) {
  if (delivered.empty()) return;
  for (const auto& d : delivered) dm.perceived.at(d.sensor) = d.state;
  dm.waiting = waiting_per_axis(dm.perceived, dm.road_length);
}

enum class LightPolicyKind { fixed_cycle, queue_responsive };

struct LightPolicy {
  LightPolicyKind kind = LightPolicyKind::fixed_cycle;
  std::size_t green_period = 20;
  // Queue-responsive: minimum green time before a switch is considered, and
  // the margin by which the other axis must exceed the current one.
  std::size_t min_green = 10;
  std::size_t hysteresis = 0;
};

struct LightState {
  std::size_t green_axis = 0;
  std::uint64_t phase_start = 0;
};

// Green axis for `iteration`.
inline LightState control_lights(const DecisionMakerState& dm, const LightPolicy& policy, std::uint64_t iteration,
                                 LightState current) {
  if (policy.kind == LightPolicyKind::fixed_cycle) {
    const std::size_t g = std::max<std::size_t>(1, policy.green_period);
    const std::size_t axis = (iteration / g) % 2;
    if (axis != current.green_axis) current = {axis, iteration};
    return current;
  }
  if (iteration - current.phase_start < policy.min_green) return current;
  const std::size_t other = 1 - current.green_axis;
  if (dm.waiting[other] > dm.waiting[current.green_axis] + policy.hysteresis) current = {other, iteration};
  return current;
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct ScenarioConfig {
  std::size_t iterations = 2000;
  std::size_t road_length = 20;
  double arrival_probability = 0.5;
  MacParams mac;
  LightPolicy lights;
  // MAC slots per world iteration.
  std::size_t slots_per_iteration = 1;
  std::uint64_t seed = 1;
};

struct TraceRecord {
  std::uint64_t iteration = 0;
  long long actual = 0;
  long long perceived = 0;
  long long gap = 0;  // actual - perceived
  std::size_t deliveries = 0;
  std::size_t collisions = 0;
};

struct ScenarioSummary {
  double mean_gap = 0.0;
  double mean_abs_gap = 0.0;
  std::map<long long, std::uint64_t> gap_histogram;
  std::uint64_t deliveries = 0;
  std::uint64_t attempts = 0;
  std::uint64_t collisions = 0;
  std::uint64_t slots = 0;
  double delivery_ratio = 1.0;  // deliveries / attempts
  double collision_rate = 0.0;  // collision events / slots
  std::uint64_t cars_created = 0;
  std::uint64_t cars_departed = 0;
  std::uint64_t cars_on_grid = 0;
  std::uint64_t blocked_arrivals = 0;
  // Car conservation and single occupancy held after every iteration.
  bool invariants_held = true;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<TraceRecord> trace;
  ScenarioSummary summary;
};

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.road_length < 1) throw PreconditionError("road_length must be >= 1");
  if (!(cfg.arrival_probability >= 0.0 && cfg.arrival_probability <= 1.0))
    throw PreconditionError("arrival_probability outside [0, 1]");
  if (cfg.slots_per_iteration < 1) throw PreconditionError("slots_per_iteration must be >= 1");
  if (cfg.lights.green_period < 1) throw PreconditionError("green_period must be >= 1");
  MacChannel(cfg.mac, 0);
}

// Loop per iteration: lights -> world step -> sense -> MAC slot(s) -> DM update.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  ScenarioResult res{cfg, {}, {}};
  TrafficWorld world(cfg.road_length, cfg.arrival_probability);
  SensorField sensors(cfg.road_length);
  DecisionMakerState dm(cfg.road_length);
  MacChannel channel(cfg.mac, sensors.size());
  Rng world_rng(derive_seed(cfg.seed, {1}));
  Rng mac_rng(derive_seed(cfg.seed, {2}));
  LightState lights{0, 0};
  auto& s = res.summary;
  res.trace.reserve(cfg.iterations);
  long long gap_sum = 0, abs_sum = 0;
  for (std::uint64_t t = 0; t < cfg.iterations; ++t) {
    lights = control_lights(dm, cfg.lights, t, lights);
    world.set_green(lights.green_axis);
    world.step(world_rng);
    s.invariants_held = s.invariants_held && world.conserves_cars() && world.single_occupancy();
    sense(world, sensors);
    TraceRecord rec{t};
    for (std::size_t slot = 0; slot < cfg.slots_per_iteration; ++slot) {
      auto out = channel.round(sensors, mac_rng);
      dm_update(dm, out.delivered);
      rec.deliveries += out.delivered.size();
      rec.collisions += out.collisions;
      s.attempts += out.attempts;
      ++s.slots;
    }
    const auto actual = waiting_per_axis(sensors.state, cfg.road_length);
    rec.actual = static_cast<long long>(actual[0] + actual[1]);
    rec.perceived = static_cast<long long>(dm.perceived_waiting());
    rec.gap = rec.actual - rec.perceived;
    s.deliveries += rec.deliveries;
    s.collisions += rec.collisions;
    ++s.gap_histogram[rec.gap];
    gap_sum += rec.gap;
    abs_sum += rec.gap < 0 ? -rec.gap : rec.gap;
    res.trace.push_back(rec);
  }
  if (cfg.iterations > 0) {
    s.mean_gap = static_cast<double>(gap_sum) / static_cast<double>(cfg.iterations);
    s.mean_abs_gap = static_cast<double>(abs_sum) / static_cast<double>(cfg.iterations);
  }
  s.delivery_ratio = s.attempts == 0 ? 1.0 : static_cast<double>(s.deliveries) / static_cast<double>(s.attempts);
  s.collision_rate = s.slots == 0 ? 0.0 : static_cast<double>(s.collisions) / static_cast<double>(s.slots);
  s.cars_created = world.created();
  s.cars_departed = world.departed();
  s.cars_on_grid = world.cars().size();
  s.blocked_arrivals = world.blocked_arrivals();
  return res;
}

// Runs one scenario per seed; results are in seed order regardless of workers.
inline std::vector<ScenarioResult> run_seeds(ScenarioConfig cfg, std::span<const std::uint64_t> seeds,
                                             unsigned workers = 1) {
  validate(cfg);
  std::vector<ScenarioResult> out(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    ScenarioConfig c = cfg;
    c.seed = seeds[i];
    out[i] = run_scenario(c);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Comparing perception gaps across MAC protocols
// ---------------------------------------------------------------------------

struct MeanInterval {
  double mean = 0.0;
  double ci95 = 0.0;  // half-width, normal approximation
  std::size_t n = 0;
};

inline MeanInterval mean_interval(std::span<const double> xs) {
  MeanInterval m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.ci95 = 1.96 * std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
  }
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
inline std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, k = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && k < b.size()) {
    const double x = std::min(a[i], b[k]);
    while (i < a.size() && a[i] == x) ++i;
    while (k < b.size() && b[k] == x) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // The series does not converge for small lambda, where p is 1.
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) return {d, std::clamp(p, 0.0, 1.0)};
  }
  return {d, 1.0};
}

struct GapComparison {
  MeanInterval first, second;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  bool intervals_separated = false;
  // Intervals separated or KS rejects equality at 5%.
  bool differ = false;
};

// Compares per-seed mean gaps of two batches of runs.
inline GapComparison compare_gaps(const std::vector<ScenarioResult>& first, const std::vector<ScenarioResult>& second) {
  std::vector<double> a, b;
  for (const auto& r : first) a.push_back(r.summary.mean_gap);
  for (const auto& r : second) b.push_back(r.summary.mean_gap);
  GapComparison c;
  c.first = mean_interval(a);
  c.second = mean_interval(b);
  c.intervals_separated = c.first.mean + c.first.ci95 < c.second.mean - c.second.ci95 ||
                          c.second.mean + c.second.ci95 < c.first.mean - c.first.ci95;
  std::tie(c.ks_statistic, c.ks_p_value) = ks_two_sample(a, b);
  c.differ = c.intervals_separated || c.ks_p_value < 0.05;
  return c;
}

inline void write_trace_header(std::ostream& out) {
  out << "seed,mac,iteration,actual,perceived,gap,deliveries,collisions\n";
}

inline void write_trace_rows(std::ostream& out, const ScenarioResult& r) {
  const std::string mac = to_string(r.config.mac.mac);
  for (const auto& t : r.trace)
    out << r.config.seed << ',' << mac << ',' << t.iteration << ',' << t.actual << ',' << t.perceived << ',' << t.gap
        << ',' << t.deliveries << ',' << t.collisions << '\n';
}

}  // namespace cxnet::traffic
