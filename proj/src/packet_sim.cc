#include "fluidnet/packet_sim.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

struct Packet {
  long id;
  int flow;
  int hop;  // index of the queue the packet is heading to or waiting in
};

enum class EventType { kArrive, kDequeue, kAck, kWindow, kCross, kSample };

struct Event {
  double time;
  long seq;  // insertion order breaks ties deterministically
  EventType type;
  int target;  // queue, user or cross source
  Packet packet;
  double value;  // new window for kWindow
};

// Samples run after every other event at the same instant.
struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    bool sa = a.type == EventType::kSample, sb = b.type == EventType::kSample;
    if (sa != sb) return sa;
    return a.seq > b.seq;
  }
};

struct QueueState {
  double service;  // seconds per packet
  double next_free = -1e300;
  std::deque<Packet> waiting;
  bool dequeue_pending = false;
  std::vector<long> arrivals;    // per slot, cumulative
  std::vector<long> departures;  // per slot, cumulative
};

struct UserState {
  double window = 0.0;
  long flight = 0;
  long sent = 0;
  long acked = 0;
  bool silent = false;
};

class PacketSim {
 public:
  PacketSim(const Scenario& s, const PacketSimConfig& cfg);
  PacketTrace run();

 private:
  void push(double t, EventType type, int target, Packet p = {},
            double value = 0.0);
  void try_send(int user, double t);
  void arrive(const Packet& p, double t);
  void depart(int j, double t);
  void forward(const Packet& p, double t);
  void sample(double t);
  void log(PacketEvent::Kind k, const Packet& p, int queue, double t);

  const Scenario& s_;
  PacketSimConfig cfg_;
  Network net_;
  std::vector<std::vector<int>> slot_;  // [flow][hop]
  std::vector<QueueState> queues_;
  std::vector<UserState> users_;
  std::vector<long> cross_emitted_;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  long seq_ = 0;
  long next_packet_ = 0;
  PacketTrace out_;
  // Counter values at t = 0, subtracted from samples.
  std::vector<long> sent0_, acked0_;
  std::vector<std::vector<long>> arrivals0_, departures0_;
  bool have_origin_ = false;
};

PacketSim::PacketSim(const Scenario& s, const PacketSimConfig& cfg)
    : s_(s), cfg_(cfg), net_(Network::build(s.network)) {
  s.validate();
  for (const Protocol& p : s.protocols) {
    if (p.kind == Protocol::Kind::kFast) {
      throw ConfigError("the packet oracle supports scheduled windows only");
    }
  }
  if (!(cfg.sample_interval > 0.0) || !(cfg.horizon > 0.0) ||
      !(cfg.warmup >= 0.0)) {
    throw ConfigError("packet oracle: invalid horizon, warmup or interval");
  }
  queues_.resize(net_.queue_count());
  for (int j = 0; j < net_.queue_count(); ++j) {
    queues_[j].service = 1.0 / net_.capacity(j);
  }
  slot_.resize(net_.flows().size());
  std::vector<int> count(net_.queue_count(), 0);
  for (std::size_t f = 0; f < net_.flows().size(); ++f) {
    for (int j : net_.flows()[f].queues) slot_[f].push_back(count[j]++);
  }
  for (int j = 0; j < net_.queue_count(); ++j) {
    queues_[j].arrivals.assign(count[j], 0);
    queues_[j].departures.assign(count[j], 0);
  }
  users_.resize(net_.user_count());
  cross_emitted_.assign(net_.cross_count(), 0);
  out_.queue.resize(net_.queue_count());
  out_.arrivals.resize(net_.queue_count());
  out_.departures.resize(net_.queue_count());
  out_.departure_times.resize(net_.queue_count());
  for (int j = 0; j < net_.queue_count(); ++j) {
    out_.arrivals[j].resize(count[j]);
    out_.departures[j].resize(count[j]);
    out_.departure_times[j].resize(count[j]);
  }
  for (auto* v : {&out_.window, &out_.flight, &out_.sent, &out_.acked}) {
    v->resize(net_.user_count());
  }
  out_.silences.resize(net_.user_count());
}

void PacketSim::push(double t, EventType type, int target, Packet p,
                     double value) {
  events_.push(Event{t, seq_++, type, target, p, value});
}

void PacketSim::log(PacketEvent::Kind k, const Packet& p, int queue,
                    double t) {
  if (!cfg_.log_events) return;
  out_.events.push_back(PacketEvent{p.id, p.flow, k, queue, t});
}

void PacketSim::try_send(int i, double t) {
  UserState& u = users_[i];
  const FlowPath& path = net_.flows()[i];
  while (static_cast<double>(u.flight) + 1.0 <= u.window + 1e-9) {
    if (u.silent) {
      u.silent = false;
      out_.silences[i].back().resume = t;
    }
    Packet p{next_packet_++, i, 0};
    ++u.flight;
    ++u.sent;
    log(PacketEvent::Kind::kSend, p, -1, t);
    push(t + path.hop_delays[0], EventType::kArrive, path.queues[0], p);
  }
}

void PacketSim::arrive(const Packet& p, double t) {
  const int j = net_.flows()[p.flow].queues[p.hop];
  QueueState& q = queues_[j];
  ++q.arrivals[slot_[p.flow][p.hop]];
  log(PacketEvent::Kind::kEnqueue, p, j, t);
  q.waiting.push_back(p);
  if (q.waiting.size() == 1 && !q.dequeue_pending) {
    if (t >= q.next_free) {
      depart(j, t);
    } else {
      q.dequeue_pending = true;
      push(q.next_free, EventType::kDequeue, j);
    }
  }
}

void PacketSim::depart(int j, double t) {
  QueueState& q = queues_[j];
  Packet p = q.waiting.front();
  q.waiting.pop_front();
  const int slot = slot_[p.flow][p.hop];
  ++q.departures[slot];
  if (t >= 0.0) out_.departure_times[j][slot].push_back(t);
  log(PacketEvent::Kind::kDequeue, p, j, t);
  q.next_free = t + q.service;
  if (!q.waiting.empty()) {
    q.dequeue_pending = true;
    push(q.next_free, EventType::kDequeue, j);
  }
  forward(p, t);
}

void PacketSim::forward(const Packet& p, double t) {
  const FlowPath& path = net_.flows()[p.flow];
  const double delay = path.hop_delays[p.hop + 1];
  if (p.hop + 1 < static_cast<int>(path.queues.size())) {
    Packet next = p;
    ++next.hop;
    push(t + delay, EventType::kArrive, path.queues[next.hop], next);
  } else if (path.source == FlowPath::Source::kUser) {
    push(t + delay, EventType::kAck, path.source_index, p);
  }
}

void PacketSim::sample(double t) {
  if (!have_origin_) {
    have_origin_ = true;
    for (const UserState& u : users_) {
      sent0_.push_back(u.sent);
      acked0_.push_back(u.acked);
    }
    for (const QueueState& q : queues_) {
      arrivals0_.push_back(q.arrivals);
      departures0_.push_back(q.departures);
    }
  }
  out_.times.push_back(t);
  for (int j = 0; j < net_.queue_count(); ++j) {
    const QueueState& q = queues_[j];
    out_.queue[j].push_back(static_cast<double>(q.waiting.size()));
    for (std::size_t k = 0; k < q.arrivals.size(); ++k) {
      out_.arrivals[j][k].push_back(
          static_cast<double>(q.arrivals[k] - arrivals0_[j][k]));
      out_.departures[j][k].push_back(
          static_cast<double>(q.departures[k] - departures0_[j][k]));
    }
  }
  for (int i = 0; i < net_.user_count(); ++i) {
    const UserState& u = users_[i];
    out_.window[i].push_back(u.window);
    out_.flight[i].push_back(static_cast<double>(u.flight));
    out_.sent[i].push_back(static_cast<double>(u.sent - sent0_[i]));
    out_.acked[i].push_back(static_cast<double>(u.acked - acked0_[i]));
  }
}

PacketTrace PacketSim::run() {
  const double start = -cfg_.warmup;
  for (int i = 0; i < net_.user_count(); ++i) {
    const WindowSchedule& ws = s_.protocols[i].schedule;
    push(start, EventType::kWindow, i, {}, ws.window_at(start));
    for (const WindowStep& st : ws.steps) {
      if (st.time > start) push(st.time, EventType::kWindow, i, {}, st.window);
    }
  }
  for (int x = 0; x < net_.cross_count(); ++x) {
    if (!(s_.cross[x].mean > 0.0)) continue;
    double first = 0.5 / net_.capacity(net_.cross_queue(x));
    push(s_.cross[x].time_of_integral(first, start), EventType::kCross, x);
  }
  const long samples =
      std::lround(std::floor(cfg_.horizon / cfg_.sample_interval + 1e-9));
  for (long k = 0; k <= samples; ++k) {
    push(static_cast<double>(k) * cfg_.sample_interval, EventType::kSample, 0);
  }

  while (!events_.empty()) {
    Event e = events_.top();
    if (e.time > cfg_.horizon) break;
    events_.pop();
    switch (e.type) {
      case EventType::kArrive:
        arrive(e.packet, e.time);
        break;
      case EventType::kDequeue:
        queues_[e.target].dequeue_pending = false;
        depart(e.target, e.time);
        break;
      case EventType::kAck: {
        UserState& u = users_[e.target];
        --u.flight;
        ++u.acked;
        log(PacketEvent::Kind::kAck, e.packet, -1, e.time);
        try_send(e.target, e.time);
        break;
      }
      case EventType::kWindow: {
        UserState& u = users_[e.target];
        u.window = e.value;
        if (!u.silent && static_cast<double>(u.flight) + 1.0 > u.window + 1e-9 &&
            e.time > start) {
          u.silent = true;
          out_.silences[e.target].push_back({e.time, -1.0});
        }
        try_send(e.target, e.time);
        break;
      }
      case EventType::kCross: {
        // Packet k of the stream goes out once k - 1/2 packets' worth of
        // fluid has been injected.
        const int x = e.target;
        const int j = net_.cross_queue(x);
        const int flow = net_.user_count() + x;
        Packet p{next_packet_++, flow, 0};
        arrive(p, e.time);
        long k = ++cross_emitted_[x];
        double y = (static_cast<double>(k) + 0.5) / net_.capacity(j);
        push(s_.cross[x].time_of_integral(y, start), EventType::kCross, x);
        break;
      }
      case EventType::kSample:
        sample(e.time);
        break;
    }
  }
  return std::move(out_);
}

}  // namespace

const char* to_string(PacketEvent::Kind k) {
  switch (k) {
    case PacketEvent::Kind::kSend:
      return "send";
    case PacketEvent::Kind::kEnqueue:
      return "enqueue";
    case PacketEvent::Kind::kDequeue:
      return "dequeue";
    case PacketEvent::Kind::kAck:
      return "arrive-ack";
  }
  return "?";
}

PacketSimConfig PacketSimConfig::from(const Scenario& s) {
  PacketSimConfig c;
  c.warmup = s.run.init == InitMode::kCold ? 0.0 : s.run.packet_warmup;
  c.sample_interval = s.run.sample_interval;
  c.horizon = s.run.horizon;
  return c;
}

long PacketTrace::departures_between(int queue, int slot, double t0,
                                     double t1) const {
  const std::vector<double>& d = departure_times.at(queue).at(slot);
  auto a = std::lower_bound(d.begin(), d.end(), t0);
  auto b = std::lower_bound(d.begin(), d.end(), t1);
  return static_cast<long>(b - a);
}

double PacketTrace::mean_queue(int queue, double t0, double t1) const {
  double sum = 0.0;
  long n = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t0 || times[k] > t1) continue;
    sum += this->queue[queue][k];
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

PacketTrace packet_sim(const Scenario& s, const PacketSimConfig& cfg) {
  PacketSim sim(s, cfg);
  return sim.run();
}

void write_event_log(const PacketTrace& tr, const Network& n,
                     std::ostream& out) {
  out << "time[s],event,packet,flow,queue\n";
  for (const PacketEvent& e : tr.events) {
    out << e.time << ',' << to_string(e.kind) << ',' << e.packet << ','
        << n.flows()[e.flow].name << ','
        << (e.queue >= 0 ? n.queue_id(e.queue) : std::string()) << '\n';
  }
}

}  // namespace fluidnet
