#include "dve/actors/physics_actor.hpp"

#include <algorithm>
#include <cmath>

#include "dve/error.hpp"

namespace dve {

int effective_capacity(const PhysicsParams& params, std::size_t population) {
  if (params.contention_scale <= 0.0) return params.capacity;
  const double c = params.capacity / (1.0 + static_cast<double>(population) / params.contention_scale);
  return std::max(1, static_cast<int>(std::floor(c)));
}

PhysicsActor::PhysicsActor(NodeId self, PartitionId partition, NodeId dispatcher, const GaltonGeometry& geometry,
                           const PartitionMap& map, PhysicsParams params, Engine& engine, Network& network,
                           NodeClock clock, MessageSizes sizes)
    : self_(self),
      partition_(partition),
      dispatcher_(dispatcher),
      geometry_(geometry),
      map_(map),
      params_(params),
      engine_(engine),
      network_(network),
      clock_(clock),
      sizes_(sizes),
      replica_(self),
      histogram_(static_cast<std::size_t>(geometry.bucket_count()), 0) {
  if (params_.capacity < 1 || params_.tick.us <= 0 || params_.contention_scale < 0) {
    throw Error(ErrorCode::InvalidParameter, "physics needs capacity >= 1, tick > 0, contention_scale >= 0");
  }
}

void PhysicsActor::start(SimTime t0) {
  running_ = true;
  engine_.schedule(t0, self_, "physics-tick", [this] { tick_and_reschedule(); });
}

void PhysicsActor::tick_and_reschedule() {
  if (!running_) return;
  const TickReport r = physics_tick(engine_.now());
  if (observer_) observer_(r);
  if (running_) engine_.schedule_after(params_.tick, self_, "physics-tick", [this] { tick_and_reschedule(); });
}

void PhysicsActor::send(Message msg) {
  msg.origin = self_;
  network_.send(self_, dispatcher_, std::move(msg));
  ++msgs_sent_;
}

TickReport PhysicsActor::physics_tick(SimTime now) {
  TickReport r;
  r.at = now;
  r.active = owned_.size();
  r.load = static_cast<double>(r.active) / params_.capacity;
  peak_load_ = std::max(peak_load_, r.load);

  const std::size_t budget = std::min(owned_.size(), static_cast<std::size_t>(effective_capacity(params_, r.active)));
  std::vector<std::uint64_t> batch;
  batch.reserve(budget);
  auto it = owned_.lower_bound(cursor_);
  for (std::size_t i = 0; i < budget; ++i) {
    if (it == owned_.end()) it = owned_.begin();
    batch.push_back(it->first);
    ++it;
  }
  cursor_ = it == owned_.end() ? 0 : it->first;

  for (std::uint64_t id : batch) {
    auto node = owned_.find(id);
    Ball& ball = node->second;
    ball.fall += params_.tick;
    ++total_steps_;
    ++r.stepped;
    const int target = level_after(geometry_, ball.fall);
    if (target == ball.level) continue;
    while (ball.level < target) descend_one_level(ball);

    if (ball.level == geometry_.n_levels) {
      Ball done = std::move(ball);
      owned_.erase(node);
      const auto c = collect_ball(std::move(done), now);
      (c.bucket ? r.collected : r.discarded) += 1;
      continue;
    }
    const Vec2 p = ball.position(geometry_);
    if (!map_.contains(p)) {
      Ball gone = std::move(ball);
      owned_.erase(node);
      gone.level = -1;  // marks an out-of-region exit for collect_ball
      collect_ball(std::move(gone), now);
      ++r.discarded;
      continue;
    }
    const PartitionId owner = map_.owner_of(p);
    if (owner != partition_) {
      Ball moving = std::move(ball);
      owned_.erase(node);
      begin_migration(std::move(moving), owner, now);
      ++r.migrated_out;
      continue;
    }
    queue_position(ball);
  }
  flush_updates();
  return r;
}

Collection PhysicsActor::collect_ball(Ball ball, SimTime now) {
  Collection c;
  c.id = ball.id;
  c.at = now;
  c.interval_s = (now - ball.created_at).seconds();
  if (ball.level == geometry_.n_levels) c.bucket = geometry_.bucket_of(ball.row, ball.column);
  if (c.bucket) {
    ++histogram_[static_cast<std::size_t>(*c.bucket)];
    ++collected_;
  } else {
    ++discarded_;
  }
  collections_.push_back(c);

  const Stamp stamp = next_stamp();
  replica_.delete_entity(ball.id, stamp);
  Message msg;
  msg.kind = MessageKind::remove;
  msg.size_bytes = sizes_.remove;
  msg.payload = make_payload(RemovePayload{PropertyUpdate{ball.id, UpdateKind::remove, {}, stamp}});
  send(std::move(msg));
  return c;
}

void PhysicsActor::queue_position(const Ball& ball) {
  const Vec2 p = ball.position(geometry_);
  PropertyUpdate u{ball.id, UpdateKind::set, {{Property::position, Vec3{p.x, p.y, geometry_.z_of(ball.level)}}},
                   next_stamp()};
  replica_.apply_update(u);
  pending_updates_.push_back(std::move(u));
}

void PhysicsActor::flush_updates() {
  if (pending_updates_.empty()) return;
  Message msg;
  msg.kind = MessageKind::update;
  msg.size_bytes = static_cast<std::uint32_t>(pending_updates_.size()) * sizes_.update;
  msg.payload = make_payload(UpdateBatch{std::move(pending_updates_)});
  pending_updates_.clear();
  send(std::move(msg));
}

void PhysicsActor::begin_migration(Ball ball, PartitionId to, SimTime now) {
  const MigrationRecord& rec = migrations_.begin(ball.id, partition_, to, now);
  Message msg;
  msg.kind = MessageKind::migrate;
  msg.size_bytes = sizes_.migrate;
  msg.destination = map_.node_of(to);
  msg.carries_entity = true;
  msg.payload = make_payload(MigratePayload{ball, rec.id, partition_, to, self_});
  ghosts_.emplace(ball.id.value, std::move(ball));
  send(std::move(msg));
}

void PhysicsActor::adopt(Ball ball) {
  if (map_.owner_of(ball.position(geometry_)) != partition_) ++ownership_violations_;
  owned_.emplace(ball.id.value, std::move(ball));
}

void PhysicsActor::apply_remote(const PropertyUpdate& u) {
  try {
    replica_.apply_update(u);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnknownEntity) throw;
    ++unknown_entity_;
  }
}

void PhysicsActor::on_message(const Message& msg) {
  ++msgs_recv_;
  switch (msg.kind) {
    case MessageKind::create: {
      const auto& p = payload_as<CreatePayload>(msg);
      apply_remote(p.update);
      if (msg.carries_entity) adopt(p.ball);
      break;
    }
    case MessageKind::update:
      for (const auto& u : payload_as<UpdateBatch>(msg).updates) apply_remote(u);
      break;
    case MessageKind::remove:
      apply_remote(payload_as<RemovePayload>(msg).update);
      break;
    case MessageKind::migrate: {
      const auto& p = payload_as<MigratePayload>(msg);
      adopt(p.ball);
      queue_position(p.ball);
      Message ack;
      ack.kind = MessageKind::ack;
      ack.size_bytes = sizes_.ack;
      ack.destination = p.sender;
      ack.payload = make_payload(AckPayload{MigrationAck{p.ball.id, p.migration_id}});
      send(std::move(ack));
      break;
    }
    case MessageKind::ack: {
      const auto& a = payload_as<AckPayload>(msg).ack;
      migrations_.complete(a, engine_.now());
      ghosts_.erase(a.entity.value);
      break;
    }
    default:
      break;
  }
}

}  // namespace dve
