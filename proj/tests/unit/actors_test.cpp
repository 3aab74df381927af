#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "dve/actors/dispatcher.hpp"
#include "dve/actors/galton.hpp"
#include "dve/actors/messages.hpp"
#include "dve/actors/physics_actor.hpp"
#include "dve/actors/script_actor.hpp"
#include "dve/error.hpp"
#include "dve/stats/distribution.hpp"

using namespace dve;

namespace {

const NodeId kScript{1}, kDispatcher{2}, kPhysics{10}, kPhysics2{11};

/// A physics simulator on its own, with a sink for everything it sends.
struct PhysicsBench {
  GaltonGeometry geometry;
  Engine engine;
  Network network{engine};
  PartitionMap map = PartitionMap::single(RegionSpec{}, PartitionId{1}, kPhysics);
  std::unique_ptr<PhysicsActor> physics;
  std::uint64_t next_id = 1;

  explicit PhysicsBench(PhysicsParams params) {
    network.add_link(LinkSpec{kPhysics, kDispatcher, SimDuration::from_ms(1), 1e12, {}});
    physics = std::make_unique<PhysicsActor>(kPhysics, PartitionId{1}, kDispatcher, geometry, map, params, engine,
                                             network, NodeClock{kPhysics, {}}, MessageSizes{});
  }

  /// Delivers a create for a new ball of `row` directly to the simulator.
  void create_ball(int row = 1) {
    Ball b;
    b.id = EntityId{next_id++};
    b.row = static_cast<std::uint16_t>(row);
    b.created_at = engine.now();
    b.stream = RandomStream(1, "ball-descent", b.id.value);
    const Vec2 p = b.position(geometry);
    Message m;
    m.kind = MessageKind::create;
    m.size_bytes = 1024;
    m.carries_entity = true;
    m.payload = make_payload(CreatePayload{
        b, PropertyUpdate{b.id, UpdateKind::create, {{Property::position, Vec3{p.x, p.y, 100}}},
                          Stamp{Timestamp{engine.now().us}, kScript, b.id.value}}});
    physics->on_message(m);
  }

  double mean_interval() const {
    double s = 0;
    for (const auto& c : physics->collections()) s += c.interval_s;
    return s / static_cast<double>(physics->collections().size());
  }
};

PhysicsParams params(int capacity, double contention = 0.0) {
  PhysicsParams p;
  p.capacity = capacity;
  p.contention_scale = contention;
  return p;
}

}  // namespace

TEST(GaltonGeometry, DefaultBoard) {
  const GaltonGeometry g;
  EXPECT_EQ(g.bucket_count(), 96);
  EXPECT_EQ(g.droppers(), 108);
  EXPECT_EQ(g.total_balls(), 37800);
  EXPECT_NO_THROW(g.validate());
}

TEST(GaltonGeometry, ExtremeBuckets) {
  const GaltonGeometry g;
  EXPECT_EQ(g.bucket_of(0, -93), 0);
  EXPECT_EQ(g.bucket_of(2, 93), 95);
  EXPECT_EQ(g.bucket_of(1, 1), 48);
}

TEST(GaltonGeometry, RowsStraddleTheCenter) {
  const GaltonGeometry g;
  EXPECT_LT(g.x_of(0, 0), 128.0);
  EXPECT_EQ(g.x_of(1, 0), 128.0);
  EXPECT_GT(g.x_of(2, 0), 128.0);
  GaltonGeometry wide = g;
  wide.bucket_width_m = 3.0;
  EXPECT_THROW(wide.validate(), Error);
}

TEST(Descent, ForcedDrawsMoveLeftOrRight) {
  Ball b;
  descend_with_draw(b, 0.2);
  EXPECT_EQ(b.column, -1);
  EXPECT_EQ(b.level, 1);
  descend_with_draw(b, 0.5);
  EXPECT_EQ(b.column, 0);
}

TEST(Descent, ParityAndBoundAfterFullDescent) {
  for (std::uint64_t id = 0; id < 500; ++id) {
    Ball b;
    b.stream = RandomStream(3, "ball-descent", id);
    while (b.level < 93) {
      descend_one_level(b);
      ASSERT_LE(std::abs(b.column), b.level);
    }
    EXPECT_NE(b.column % 2, 0);
  }
}

TEST(Descent, TenLevelColumnsFollowBinomial) {
  constexpr int n = 10, balls = 100000;
  std::vector<double> observed(n + 1, 0.0);
  for (int i = 0; i < balls; ++i) {
    Ball b;
    b.stream = RandomStream(17, "ball-descent", static_cast<std::uint64_t>(i));
    for (int l = 0; l < n; ++l) descend_one_level(b);
    observed[static_cast<std::size_t>((b.column + n) / 2)] += 1;
  }
  const std::vector<double> pmf = binomial_pmf(n, 0.5);
  double chi2 = 0;
  for (int k = 0; k <= n; ++k) {
    const double expected = balls * pmf[static_cast<std::size_t>(k)];
    chi2 += (observed[static_cast<std::size_t>(k)] - expected) * (observed[static_cast<std::size_t>(k)] - expected) / expected;
  }
  const double p = 1.0 - boost::math::cdf(boost::math::chi_squared(n), chi2);
  EXPECT_GT(p, 0.01) << "chi2 = " << chi2;
}

TEST(Descent, LevelAfterIsUniformInTime) {
  const GaltonGeometry g;
  EXPECT_EQ(level_after(g, SimDuration{}), 0);
  EXPECT_EQ(level_after(g, g.nominal_descent()), 93);
  EXPECT_EQ(level_after(g, SimDuration::from_seconds(62.41)), 46);
  EXPECT_EQ(level_after(g, SimDuration::from_seconds(1000)), 93);
}

TEST(ScriptActor, OneCreationPerDropperPerTick) {
  GaltonGeometry g;
  Engine e;
  Network net(e);
  ScriptActor s(kScript, kDispatcher, g, SimDuration::from_seconds(6), e, net, NodeClock{kScript, {}}, MessageSizes{});
  const auto first = s.dropper_tick(SimTime{});
  EXPECT_EQ(first.size(), 108u);
  for (const auto& m : first) {
    EXPECT_EQ(m.kind, MessageKind::create);
    EXPECT_TRUE(m.carries_entity);
  }
  for (int i = 1; i < 350; ++i) s.dropper_tick(SimTime::from_seconds(6.0 * i));
  EXPECT_EQ(s.created(), 37800);
  EXPECT_TRUE(s.dropper_tick(SimTime::from_seconds(6.0 * 350)).empty());
}

TEST(ScriptActor, FullRunCreatesEveryBallOnSchedule) {
  GaltonGeometry g;
  Engine e;
  Network net(e);
  net.add_link(LinkSpec{kScript, kDispatcher, SimDuration::from_ms(1), 1e12, {}});
  std::vector<std::int64_t> tick_times;
  ScriptActor s(kScript, kDispatcher, g, SimDuration::from_seconds(6), e, net, NodeClock{kScript, {}}, MessageSizes{});
  net.set_handler(kDispatcher, [&](const Message& m) {
    const auto& p = payload_as<CreatePayload>(m);
    if (tick_times.empty() || tick_times.back() != p.ball.created_at.us) tick_times.push_back(p.ball.created_at.us);
  });
  s.start(SimTime{});
  e.run_until(SimTime::from_seconds(5000));
  EXPECT_EQ(s.created(), 37800);
  ASSERT_EQ(tick_times.size(), 350u);
  for (std::size_t i = 1; i < tick_times.size(); ++i) EXPECT_EQ(tick_times[i] - tick_times[i - 1], 6000000);
}

TEST(PhysicsActor, UnloadedBallsDescendInNominalTime) {
  PhysicsBench bench(params(100));
  for (int i = 0; i < 10; ++i) bench.create_ball();
  bench.physics->start(SimTime{});
  bench.engine.run_until(SimTime::from_seconds(400));
  ASSERT_EQ(bench.physics->collected(), 10);
  const double nominal = bench.geometry.nominal_descent_s;
  EXPECT_GE(bench.mean_interval(), 0.99 * nominal);
  EXPECT_LE(bench.mean_interval(), 1.01 * nominal);
}

TEST(PhysicsActor, DilationLawWithoutContention) {
  // 200 balls, 100 steps per tick: each ball moves every other tick.
  PhysicsBench bench(params(100));
  for (int i = 0; i < 200; ++i) bench.create_ball();
  std::size_t max_steps = 0;
  bench.physics->set_tick_observer([&](const TickReport& r) { max_steps = std::max(max_steps, r.stepped); });
  bench.physics->start(SimTime{});
  bench.engine.run_until(SimTime::from_seconds(1000));
  ASSERT_EQ(bench.physics->collected(), 200);
  const double expected = bench.geometry.nominal_descent_s * 200.0 / 100.0;
  EXPECT_NEAR(bench.mean_interval(), expected, 0.05 * expected);
  EXPECT_LE(max_steps, 100u);
}

TEST(PhysicsActor, DilationLawWithContention) {
  // Generalized law: interval = nominal * N / effective_capacity(N).
  const PhysicsParams p = params(300, 400.0);
  PhysicsBench bench(p);
  for (int i = 0; i < 600; ++i) bench.create_ball();
  bench.physics->start(SimTime{});
  bench.engine.run_until(SimTime::from_seconds(5000));
  ASSERT_EQ(bench.physics->collected(), 600);
  const double expected = bench.geometry.nominal_descent_s * 600.0 / effective_capacity(p, 600);
  EXPECT_NEAR(bench.mean_interval(), expected, 0.05 * expected);
}

TEST(PhysicsActor, EffectiveCapacity) {
  EXPECT_EQ(effective_capacity(params(6000, 0), 100000), 6000);
  EXPECT_EQ(effective_capacity(params(6000, 40000), 0), 6000);
  EXPECT_EQ(effective_capacity(params(6000, 40000), 40000), 3000);
  EXPECT_EQ(effective_capacity(params(1, 10), 1000000), 1);
}

TEST(PhysicsActor, WorkBoundHoldsEveryTick) {
  PhysicsBench bench(params(37, 50.0));
  for (int i = 0; i < 150; ++i) bench.create_ball(i % 3);
  bool ok = true;
  bench.physics->set_tick_observer([&](const TickReport& r) { ok &= r.stepped <= 37; });
  bench.physics->start(SimTime{});
  bench.engine.run_until(SimTime::from_seconds(5000));
  EXPECT_TRUE(ok);
  EXPECT_EQ(bench.physics->collected() + bench.physics->discarded(), 150);
  EXPECT_EQ(bench.physics->histogram().size(), 96u);
}

TEST(PhysicsActor, CollectionRecordsBucketAndBroadcastsDelete) {
  PhysicsBench bench(params(10));
  bench.create_ball(0);
  Ball b = bench.physics->owned().begin()->second;
  b.level = 93;
  b.column = -93;
  const Collection c = bench.physics->collect_ball(b, SimTime::from_seconds(5));
  EXPECT_EQ(c.bucket, 0);
  EXPECT_DOUBLE_EQ(c.interval_s, 5.0);
  EXPECT_FALSE(bench.physics->replica().is_live(b.id));
  const auto link = bench.network.find_link(kPhysics, kDispatcher);
  EXPECT_EQ(bench.network.depth(*link), 1u);
}

namespace {

/// Script, dispatcher and two physics nodes on a split region.
struct RelayBench {
  GaltonGeometry geometry;
  Engine engine;
  Network network{engine};
  PartitionMap map = PartitionMap::split_x(RegionSpec{}, 8, kPhysics, kPhysics2);
  DispatcherActor dispatcher{kDispatcher, kScript, map, network, MessageSizes{}};

  RelayBench() {
    for (NodeId n : {kScript, kPhysics, kPhysics2}) {
      network.add_link(LinkSpec{kDispatcher, n, SimDuration::from_ms(1), 1e7, {}});
      network.add_link(LinkSpec{n, kDispatcher, SimDuration::from_ms(1), 1e7, {}});
    }
  }
};

PropertyUpdate located(std::uint64_t id, double x, double y, std::uint64_t seq = 0) {
  return PropertyUpdate{EntityId{id}, UpdateKind::set, {{Property::position, Vec3{x, y, 0}}},
                        Stamp{Timestamp{0}, kPhysics, seq}};
}

}  // namespace

TEST(Dispatcher, CreateCarrierGoesOnlyToOwner) {
  RelayBench b;
  Ball ball;
  ball.id = EntityId{1};
  Message m;
  m.kind = MessageKind::create;
  m.size_bytes = 1024;
  m.origin = kScript;
  m.carries_entity = true;
  PropertyUpdate u = located(1, 200, 10);
  u.kind = UpdateKind::create;
  m.payload = make_payload(CreatePayload{ball, u});
  const auto out = b.dispatcher.dispatcher_relay(m);
  int carriers = 0;
  for (const auto& o : out) {
    if (o.msg.carries_entity) {
      ++carriers;
      EXPECT_EQ(o.to, kPhysics2);
    }
  }
  EXPECT_EQ(carriers, 1);
}

TEST(Dispatcher, UpdateFansOutToEverySubscriber) {
  // Three one-owner strips; the middle strip is one cell wide so a point in
  // it is inside every partition's interest area.
  GaltonGeometry g;
  Engine e;
  Network net(e);
  const NodeId third{12};
  const PartitionMap map(RegionSpec{},
                         {{0, 0, 7, 16, PartitionId{1}}, {7, 0, 8, 16, PartitionId{2}}, {8, 0, 16, 16, PartitionId{3}}},
                         {{PartitionId{1}, kPhysics}, {PartitionId{2}, kPhysics2}, {PartitionId{3}, third}});
  for (NodeId n : {kScript, kPhysics, kPhysics2, third}) net.add_link(LinkSpec{kDispatcher, n, {}, 1e9, {}});
  DispatcherActor d(kDispatcher, kScript, map, net, MessageSizes{});
  Message m;
  m.kind = MessageKind::update;
  m.size_bytes = 256;
  m.origin = kScript;
  m.payload = make_payload(UpdateBatch{{located(1, 120, 10)}});
  EXPECT_EQ(d.dispatcher_relay(m).size(), 3u);
}

TEST(Dispatcher, UpdatesFilteredByInterest) {
  RelayBench b;
  Message m;
  m.kind = MessageKind::update;
  m.origin = kPhysics;
  m.payload = make_payload(UpdateBatch{{located(1, 120, 10), located(2, 20, 10)}});
  m.size_bytes = 512;
  const auto out = b.dispatcher.dispatcher_relay(m);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].to, kScript);
  EXPECT_EQ(payload_as<UpdateBatch>(out[0].msg).updates.size(), 2u);
  EXPECT_EQ(out[1].to, kPhysics2);
  EXPECT_EQ(payload_as<UpdateBatch>(out[1].msg).updates.size(), 1u);
  EXPECT_EQ(out[1].msg.size_bytes, 256u);
}

TEST(Dispatcher, UnroutableDestination) {
  RelayBench b;
  Message m;
  m.kind = MessageKind::migrate;
  m.destination = NodeId{99};
  try {
    b.dispatcher.dispatcher_relay(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnroutableMessage);
  }
}

TEST(DispatcherProperty, RelayPreservesPerSourceOrder) {
  RelayBench b;
  std::vector<std::uint64_t> at_script;
  b.network.set_handler(kDispatcher, [&](const Message& m) { b.dispatcher.on_message(m); });
  b.network.set_handler(kScript, [&](const Message& m) {
    for (const auto& u : payload_as<UpdateBatch>(m).updates) at_script.push_back(u.stamp.seq);
  });
  b.network.set_handler(kPhysics2, [](const Message&) {});
  RandomStream r(4, "relay-order");
  std::uint64_t seq = 0;
  std::vector<std::uint64_t> emitted;
  std::function<void()> emit = [&] {
    UpdateBatch batch;
    const int n = 1 + static_cast<int>(r.uniform() * 5);
    for (int i = 0; i < n; ++i) {
      emitted.push_back(seq);
      batch.updates.push_back(located(seq, 100 + r.uniform() * 27, 10, seq));
      ++seq;
    }
    Message m;
    m.kind = MessageKind::update;
    m.size_bytes = static_cast<std::uint32_t>(256 * n);
    m.origin = kPhysics;
    m.payload = make_payload(std::move(batch));
    b.network.send(kPhysics, kDispatcher, std::move(m));
    if (seq < 3000) b.engine.schedule_after(SimDuration::from_us(1 + static_cast<std::int64_t>(r.uniform() * 300)), kPhysics, "emit", emit);
  };
  b.engine.schedule(SimTime{}, kPhysics, "emit", emit);
  b.engine.run_until(SimTime::from_seconds(100));
  EXPECT_EQ(at_script, emitted);
}
