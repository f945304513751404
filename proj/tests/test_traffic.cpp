#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "cxnet/traffic.hpp"

using namespace cxnet;
using namespace cxnet::traffic;

namespace {

constexpr std::size_t kSouth = 0, kEast = 2, kWest = 3;

SensorField with_pending(std::size_t road_length, std::vector<std::size_t> ids) {
  SensorField s(road_length);
  for (auto id : ids) {
    s.pending[id] = 1;
    s.state[id] = SensorState::static_car;
  }
  return s;
}

ScenarioConfig small(Mac mac, std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  cfg.iterations = 300;
  cfg.road_length = 8;
  cfg.arrival_probability = 0.3;
  cfg.mac.mac = mac;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(World, CarAdvancesOnFreeRoad) {
  TrafficWorld w(3, 0.0);
  w.place_car(kSouth, 0);
  Rng rng(1);
  w.step(rng);
  ASSERT_TRUE(w.car_at(kSouth, 1));
  EXPECT_TRUE(w.car_at(kSouth, 1)->moved);
  EXPECT_FALSE(w.occupied(kSouth, 0));
}

TEST(World, RedLightHoldsCarAtStopLine) {
  TrafficWorld w(3, 0.0);
  w.set_green(1);
  w.place_car(kSouth, 2);
  w.place_car(kSouth, 1);
  Rng rng(1);
  w.step(rng);
  EXPECT_TRUE(w.occupied(kSouth, 2));
  EXPECT_FALSE(w.car_at(kSouth, 2)->moved);
  EXPECT_FALSE(w.car_at(kSouth, 1)->moved);
  w.set_green(0);
  w.step(rng);
  EXPECT_TRUE(w.occupied(kSouth, 3));
  EXPECT_TRUE(w.occupied(kSouth, 2));
}

TEST(World, BoxMustBeClearToEnter) {
  TrafficWorld w(3, 0.0);
  w.set_green(0);
  w.place_car(kSouth, 2);
  // Westbound lanes move after southbound ones, so this car still holds the
  // shared box cell when the southbound car checks it.
  std::size_t shared = 0;
  while (shared < w.lane_length() && w.cell_of(kWest, shared) != w.cell_of(kSouth, 4)) ++shared;
  ASSERT_EQ(shared, 3u);
  w.place_car(kWest, shared);
  Rng rng(1);
  w.step(rng);
  EXPECT_TRUE(w.occupied(kSouth, 2));
  EXPECT_FALSE(w.car_at(kSouth, 2)->moved);
  w.step(rng);
  EXPECT_TRUE(w.occupied(kSouth, 3));
}

TEST(World, FrontCarClearsBoxFirst) {
  TrafficWorld w(3, 0.0);
  w.set_green(0);
  w.place_car(kSouth, 2);
  w.place_car(kSouth, 4);
  Rng rng(1);
  w.step(rng);
  EXPECT_TRUE(w.occupied(kSouth, 3));
  EXPECT_TRUE(w.occupied(kSouth, 5));
}

TEST(World, CarsLeaveAtFarEdge) {
  TrafficWorld w(2, 0.0);
  w.place_car(kEast, w.lane_length() - 1);
  Rng rng(1);
  w.step(rng);
  EXPECT_TRUE(w.cars().empty());
  EXPECT_EQ(w.departed(), 1u);
  EXPECT_TRUE(w.conserves_cars());
}

TEST(World, ArrivalsAndBlocking) {
  TrafficWorld w(1, 1.0);
  w.set_green(1);
  Rng rng(1);
  w.step(rng);
  EXPECT_EQ(w.created(), 4u);
  for (const auto& c : w.cars()) EXPECT_TRUE(c.moved);
  // Arrivals precede movement, so every entry cell is still taken.
  w.step(rng);
  EXPECT_EQ(w.blocked_arrivals(), 4u);
  // With L = 1 the entry cell is the stop line; only the green axis clears it.
  w.step(rng);
  EXPECT_EQ(w.blocked_arrivals(), 6u);
}

TEST(World, InvariantsOverLongRun) {
  TrafficWorld w(10, 0.6);
  Rng rng(99);
  for (int t = 0; t < 20'000; ++t) {
    w.set_green((t / 15) % 2);
    w.step(rng);
    ASSERT_TRUE(w.conserves_cars() && w.single_occupancy()) << "t=" << t;
  }
}

TEST(World, Preconditions) {
  EXPECT_THROW(TrafficWorld(0, 0.5), PreconditionError);
  EXPECT_THROW(TrafficWorld(3, 1.5), PreconditionError);
  TrafficWorld w(3, 0.0);
  w.place_car(0, 0);
  EXPECT_THROW(w.place_car(0, 0), PreconditionError);
  EXPECT_THROW(w.place_car(4, 0), PreconditionError);
}

TEST(Sensors, ReportChangesOnly) {
  TrafficWorld w(3, 0.0);
  w.set_green(1);
  w.place_car(kSouth, 2);
  SensorField s(3);
  sense(w, s);
  EXPECT_EQ(s.state[2], SensorState::moving_car);
  EXPECT_EQ(s.pending_ids(), std::vector<std::size_t>{2});
  s.pending[2] = 0;
  Rng rng(1);
  w.step(rng);
  sense(w, s);
  EXPECT_EQ(s.state[2], SensorState::static_car);
  EXPECT_EQ(s.pending_ids(), std::vector<std::size_t>{2});
  s.pending[2] = 0;
  w.step(rng);
  sense(w, s);
  EXPECT_TRUE(s.pending_ids().empty());
  const auto wait = waiting_per_axis(s.state, 3);
  EXPECT_EQ(wait[0], 1u);
  EXPECT_EQ(wait[1], 0u);
}

TEST(Mac, SingleSenderDelivers) {
  for (Mac m : {Mac::aloha, Mac::csma, Mac::ideal}) {
    auto s = with_pending(2, {3});
    MacChannel ch({m}, s.size());
    Rng rng(1);
    const auto out = ch.round(s, rng);
    ASSERT_EQ(out.delivered.size(), 1u) << to_string(m);
    EXPECT_EQ(out.delivered[0].sensor, 3u);
    EXPECT_EQ(out.delivered[0].state, SensorState::static_car);
    EXPECT_EQ(out.collisions, 0u);
    EXPECT_TRUE(s.pending_ids().empty());
  }
}

TEST(Mac, AlohaTwoSendersCollide) {
  auto s = with_pending(2, {0, 5});
  MacChannel ch({Mac::aloha}, s.size());
  Rng rng(1);
  const auto out = ch.round(s, rng);
  EXPECT_EQ(out.collisions, 1u);
  EXPECT_EQ(out.attempts, 2u);
  EXPECT_TRUE(out.delivered.empty());
  EXPECT_EQ(s.pending_ids().size(), 2u);
}

TEST(Mac, AlohaZeroPersistenceNeverSends) {
  auto s = with_pending(2, {1});
  MacParams p{Mac::aloha};
  p.aloha_persistence = 0.0;
  MacChannel ch(p, s.size());
  Rng rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(ch.round(s, rng).attempts, 0u);
}

TEST(Mac, AlohaDestroysOngoingMessage) {
  auto s = with_pending(2, {4});
  MacParams p{Mac::aloha};
  p.message_slots = 3;
  MacChannel ch(p, s.size());
  ch.seize(1, SensorState::moving_car, 2);
  Rng rng(1);
  const auto out = ch.round(s, rng);
  EXPECT_EQ(out.collisions, 1u);
  EXPECT_TRUE(out.delivered.empty());
  EXPECT_FALSE(ch.busy());
  EXPECT_EQ(s.pending_ids(), (std::vector<std::size_t>{1, 4}));
}

TEST(Mac, CsmaDefersWhileBusy) {
  auto s = with_pending(2, {4});
  MacParams p{Mac::csma};
  MacChannel ch(p, s.size());
  ch.seize(1, SensorState::moving_car, 2);
  Rng rng(1);
  auto out = ch.round(s, rng);
  EXPECT_EQ(out.attempts, 0u);
  EXPECT_TRUE(out.delivered.empty());
  EXPECT_EQ(*ch.owner(), 1u);
  out = ch.round(s, rng);
  ASSERT_EQ(out.delivered.size(), 1u);
  EXPECT_EQ(out.delivered[0].sensor, 1u);
  EXPECT_EQ(s.pending_ids(), std::vector<std::size_t>{4});
  out = ch.round(s, rng);
  ASSERT_EQ(out.delivered.size(), 1u);
  EXPECT_EQ(out.delivered[0].sensor, 4u);
}

TEST(Mac, CsmaWindowOneAlwaysCollides) {
  auto s = with_pending(2, {0, 1, 2});
  MacParams p{Mac::csma};
  p.csma_contention_window = 1;
  MacChannel ch(p, s.size());
  Rng rng(1);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(ch.round(s, rng).collisions, 1u);
}

TEST(Mac, IdealDeliversEverything) {
  auto s = with_pending(3, {0, 4, 7, 11});
  MacChannel ch({Mac::ideal}, s.size());
  Rng rng(1);
  EXPECT_EQ(ch.round(s, rng).delivered.size(), 4u);
}

TEST(Mac, Preconditions) {
  MacParams p{Mac::aloha};
  p.aloha_persistence = 2.0;
  EXPECT_THROW(MacChannel(p, 4), PreconditionError);
  p = {Mac::csma};
  p.message_slots = 0;
  EXPECT_THROW(MacChannel(p, 4), PreconditionError);
  EXPECT_THROW(parse_mac("tdma"), PreconditionError);
}

TEST(DecisionMaker, UpdatesPerceivedQueues) {
  DecisionMakerState dm(2);
  const std::vector<Delivery> d{{0, SensorState::static_car}, {1, SensorState::static_car}, {4, SensorState::static_car}};
  dm_update(dm, d);
  EXPECT_EQ(dm.waiting[0], 2u);
  EXPECT_EQ(dm.waiting[1], 1u);
  const std::vector<Delivery> d2{{1, SensorState::moving_car}};
  dm_update(dm, d2);
  EXPECT_EQ(dm.waiting[0], 1u);
  EXPECT_EQ(dm.perceived_waiting(), 2u);
  dm_update(dm, {});
  EXPECT_EQ(dm.perceived_waiting(), 2u);
}

TEST(Lights, FixedCycle) {
  DecisionMakerState dm(2);
  LightPolicy p;
  p.green_period = 5;
  LightState s;
  s = control_lights(dm, p, 4, s);
  EXPECT_EQ(s.green_axis, 0u);
  s = control_lights(dm, p, 5, s);
  EXPECT_EQ(s.green_axis, 1u);
  EXPECT_EQ(s.phase_start, 5u);
  EXPECT_EQ(control_lights(dm, p, 10, s).green_axis, 0u);
}

TEST(Lights, QueueResponsive) {
  DecisionMakerState dm(4);
  dm.waiting = {1, 3};
  LightPolicy p{LightPolicyKind::queue_responsive, 20, 10, 0};
  LightState s{0, 0};
  EXPECT_EQ(control_lights(dm, p, 9, s).green_axis, 0u);
  s = control_lights(dm, p, 10, s);
  EXPECT_EQ(s.green_axis, 1u);
  EXPECT_EQ(s.phase_start, 10u);
  p.hysteresis = 2;
  EXPECT_EQ(control_lights(dm, p, 10, LightState{0, 0}).green_axis, 0u);
  dm.waiting = {2, 2};
  p.hysteresis = 0;
  EXPECT_EQ(control_lights(dm, p, 30, LightState{0, 0}).green_axis, 0u);
}

TEST(Scenario, NoArrivalsMeansNoGap) {
  for (Mac m : {Mac::aloha, Mac::csma}) {
    auto cfg = small(m);
    cfg.arrival_probability = 0.0;
    const auto r = run_scenario(cfg);
    for (const auto& t : r.trace) EXPECT_EQ(t.gap, 0);
    EXPECT_EQ(r.summary.cars_created, 0u);
  }
}

TEST(Scenario, IdealChannelHasNoGap) {
  const auto r = run_scenario(small(Mac::ideal));
  for (const auto& t : r.trace) ASSERT_EQ(t.gap, 0) << "iteration " << t.iteration;
  EXPECT_GT(r.summary.deliveries, 0u);
  EXPECT_TRUE(r.summary.invariants_held);
}

TEST(Scenario, TraceConsistency) {
  const auto r = run_scenario(small(Mac::aloha, 4));
  ASSERT_EQ(r.trace.size(), 300u);
  std::uint64_t deliveries = 0;
  for (const auto& t : r.trace) {
    EXPECT_EQ(t.gap, t.actual - t.perceived);
    EXPECT_GE(t.actual, 0);
    deliveries += t.deliveries;
  }
  EXPECT_EQ(deliveries, r.summary.deliveries);
  EXPECT_EQ(r.summary.cars_created, r.summary.cars_departed + r.summary.cars_on_grid);
  EXPECT_GT(r.summary.collisions, 0u);
}

TEST(Scenario, DeterministicPerSeed) {
  const auto a = run_scenario(small(Mac::csma, 9)), b = run_scenario(small(Mac::csma, 9));
  std::ostringstream sa, sb;
  write_trace_rows(sa, a);
  write_trace_rows(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  const auto one = run_seeds(small(Mac::aloha), seeds, 1), many = run_seeds(small(Mac::aloha), seeds, 8);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    EXPECT_EQ(one[i].config.seed, seeds[i]);
    EXPECT_EQ(one[i].summary.mean_gap, many[i].summary.mean_gap);
  }
}

TEST(Scenario, ZeroIterations) {
  auto cfg = small(Mac::csma);
  cfg.iterations = 0;
  const auto r = run_scenario(cfg);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.summary.mean_gap, 0.0);
}

TEST(Scenario, Preconditions) {
  auto cfg = small(Mac::csma);
  cfg.slots_per_iteration = 0;
  EXPECT_THROW(run_scenario(cfg), PreconditionError);
  cfg = small(Mac::csma);
  cfg.lights.green_period = 0;
  EXPECT_THROW(run_scenario(cfg), PreconditionError);
}

TEST(Stats, MeanInterval) {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto m = mean_interval(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  // sample sd = sqrt(5/3)
  EXPECT_NEAR(m.ci95, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
  EXPECT_EQ(mean_interval(std::vector<double>{7}).ci95, 0.0);
}

TEST(Stats, KsStatistic) {
  auto [d, p] = ks_two_sample({1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
  EXPECT_DOUBLE_EQ(d, 1.0);
  EXPECT_LT(p, 0.05);
  std::tie(d, p) = ks_two_sample({1, 2, 3}, {1, 2, 3});
  EXPECT_EQ(d, 0.0);
  EXPECT_DOUBLE_EQ(p, 1.0);
  std::tie(d, p) = ks_two_sample({1, 3}, {2, 4});
  EXPECT_DOUBLE_EQ(d, 0.5);
  EXPECT_THROW(ks_two_sample({}, {1}), PreconditionError);
}
