#include "dve/actors/script_actor.hpp"

#include "dve/error.hpp"

namespace dve {

ScriptActor::ScriptActor(NodeId self, NodeId dispatcher, const GaltonGeometry& geometry, SimDuration period,
                         Engine& engine, Network& network, NodeClock clock, MessageSizes sizes)
    : self_(self),
      dispatcher_(dispatcher),
      geometry_(geometry),
      period_(period),
      engine_(engine),
      network_(network),
      clock_(clock),
      sizes_(sizes),
      replica_(self) {
  if (period_.us <= 0) throw Error(ErrorCode::InvalidParameter, "drop period must be positive");
  for (int b = 0; b < geometry_.boxes; ++b) {
    for (int r = 0; r < geometry_.rows_per_box; ++r) {
      for (int d = 0; d < geometry_.droppers_per_row; ++d) {
        droppers_.push_back(Dropper{static_cast<std::uint16_t>(b), static_cast<std::uint16_t>(r),
                                    static_cast<std::uint16_t>(d), geometry_.balls_per_dropper});
      }
    }
  }
}

void ScriptActor::start(SimTime t0) {
  running_ = true;
  engine_.schedule(t0, self_, "dropper-tick", [this] { tick_and_reschedule(); });
}

void ScriptActor::tick_and_reschedule() {
  if (!running_) return;
  for (auto& msg : dropper_tick(engine_.now())) {
    network_.send(self_, dispatcher_, std::move(msg));
    ++msgs_sent_;
  }
  for (const auto& d : droppers_) {
    if (d.remaining > 0) {
      engine_.schedule_after(period_, self_, "dropper-tick", [this] { tick_and_reschedule(); });
      return;
    }
  }
}

Stamp ScriptActor::next_stamp() { return Stamp{engine_.local_now(clock_), self_, next_seq_++}; }

std::vector<Message> ScriptActor::dropper_tick(SimTime now) {
  std::vector<Message> out;
  for (auto& d : droppers_) {
    if (d.remaining <= 0) continue;
    --d.remaining;
    Ball ball;
    ball.id = EntityId{static_cast<std::uint64_t>(++created_)};
    ball.box = d.box;
    ball.row = d.row;
    ball.dropper = d.index;
    ball.created_at = now;
    ball.stream = RandomStream(engine_.seed(), "ball-descent", ball.id.value);

    const Vec2 p = ball.position(geometry_);
    PropertyUpdate u{ball.id,
                     UpdateKind::create,
                     {{Property::position, Vec3{p.x, p.y, geometry_.z_of(0)}},
                      {Property::tag, static_cast<std::int64_t>(d.box * 16 + d.row)}},
                     next_stamp()};
    replica_.apply_update(u);

    Message msg;
    msg.kind = MessageKind::create;
    msg.size_bytes = sizes_.create;
    msg.origin = self_;
    msg.carries_entity = true;
    msg.payload = make_payload(CreatePayload{ball, std::move(u)});
    out.push_back(std::move(msg));
  }
  return out;
}

void ScriptActor::on_message(const Message& msg) {
  ++msgs_recv_;
  auto apply = [this](const PropertyUpdate& u) {
    try {
      replica_.apply_update(u);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownEntity) throw;
      ++unknown_entity_;
    }
  };
  switch (msg.kind) {
    case MessageKind::update:
      for (const auto& u : payload_as<UpdateBatch>(msg).updates) apply(u);
      break;
    case MessageKind::remove:
      apply(payload_as<RemovePayload>(msg).update);
      break;
    default:
      break;
  }
}

}  // namespace dve
