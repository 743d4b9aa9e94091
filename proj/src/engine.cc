#include "fluidnet/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "fluidnet/channel.h"
#include "fluidnet/errors.h"
#include "fluidnet/protocol.h"

namespace fluidnet {

SimConfig SimConfig::from(const Scenario& s) {
  SimConfig c;
  c.dt = s.run.dt;
  c.horizon = s.run.horizon;
  c.init = s.run.init;
  return c;
}

int TraceSet::invertibility_violations() const {
  int n = 0;
  for (const FifoQueue& q : queues) n += q.diagnostics().invertibility_violations;
  return n;
}

CircuitBackward backward_circuit(const Network& n,
                                 const std::vector<FifoQueue>& queues,
                                 int user, double t, double width) {
  const Circuit& c = n.circuit_of(user);
  CircuitBackward b;
  double s = t - c.hop_delays.back();
  for (std::size_t k = c.queues.size(); k-- > 0;) {
    const FifoQueue& q = queues[c.queues[k]];
    try {
      b.rate *= q.backward_rate(s);
    } catch (const InvertibilityError&) {
      b.rate_defined = false;
    }
    s = q.backward_time(s);
    if (q.near_steep_input(s, width)) b.regular = false;
    s -= c.hop_delays[k];
  }
  b.time = s;
  return b;
}

std::vector<double> windows_before(const Scenario& s, double t) {
  std::vector<double> w;
  for (const Protocol& p : s.protocols) {
    if (p.kind == Protocol::Kind::kFast) {
      w.push_back(p.fast_initial_window);
      continue;
    }
    double v = p.schedule.initial;
    for (const WindowStep& st : p.schedule.steps) {
      if (st.time >= t) break;
      v = st.window;
    }
    w.push_back(v);
  }
  return w;
}

std::vector<double> cross_fractions(const Scenario& s, const Network& n,
                                    double t) {
  std::vector<double> d(n.queue_count(), 0.0);
  for (int x = 0; x < n.cross_count(); ++x) {
    d[n.cross_queue(x)] += s.cross[x].fraction(t);
  }
  return d;
}

namespace {

enum class TaskKind { kAck, kUser, kCross, kQueueStep, kQueueOut };

struct Task {
  TaskKind kind;
  int index;
};

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::kAck:
      return "ack";
    case TaskKind::kUser:
      return "user";
    case TaskKind::kCross:
      return "cross";
    case TaskKind::kQueueStep:
      return "queue";
    case TaskKind::kQueueOut:
      return "queue-output";
  }
  return "?";
}

class Engine {
 public:
  Engine(const Scenario& s, const SimConfig& cfg);
  TraceSet run();

 private:
  void validate_step() const;
  void build_slots();
  void build_schedule();
  void initialize();
  void tick(std::size_t k);
  void run_task(const Task& task, double t, bool first);
  void finish_users(double t);
  double queue_input(int flow, int hop, double t) const;
  void maybe_prune(double t);

  TraceSet tr_;
  double dt_;
  std::vector<Task> order_;
  std::vector<double> ack_now_;
  std::vector<double> fast_window_;
  std::vector<double> fast_rate_;  // continuous wdot of FAST users
  double max_rtt_seen_ = 0.0;
};

Engine::Engine(const Scenario& s, const SimConfig& cfg) : dt_(cfg.dt) {
  s.validate();
  tr_.scenario = s;
  tr_.network = Network::build(s.network);
  tr_.config = cfg;
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw ConfigError("dt must be finite and > 0");
  }
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw ConfigError("horizon must be finite and > 0");
  }
  validate_step();
  build_slots();
  build_schedule();
}

void Engine::validate_step() const {
  double smallest = std::numeric_limits<double>::infinity();
  for (const Edge& e : tr_.network.edges()) {
    if (e.kind == EdgeKind::kChannel && e.delay > 0.0) {
      smallest = std::min(smallest, e.delay);
    }
  }
  if (dt_ > smallest / 10.0 * (1.0 + 1e-9)) {
    throw ConfigError("dt " + std::to_string(dt_) +
                      " s exceeds a tenth of the smallest channel delay " +
                      std::to_string(smallest) + " s");
  }
}

void Engine::build_slots() {
  const Network& n = tr_.network;
  std::vector<std::vector<std::string>> names(n.queue_count());
  tr_.slot.resize(n.flows().size());
  for (std::size_t f = 0; f < n.flows().size(); ++f) {
    const FlowPath& path = n.flows()[f];
    for (int j : path.queues) {
      tr_.slot[f].push_back(static_cast<int>(names[j].size()));
      names[j].push_back(path.name);
    }
  }
  for (int j = 0; j < n.queue_count(); ++j) {
    tr_.queues.emplace_back(n.queue_id(j), n.capacity(j), names[j],
                            tr_.config.empty_threshold);
  }
  for (int i = 0; i < n.user_count(); ++i) {
    tr_.users.emplace_back(n.user_id(i), n.circuit_of(i).total_delay);
  }
  for (int x = 0; x < n.cross_count(); ++x) {
    tr_.cross.push_back(CrossTrace{n.cross_id(x), n.cross_queue(x), {}});
  }
  ack_now_.assign(n.user_count(), 0.0);
}

// Orders one tick's blocks so that every same-tick read (a hop shorter than
// dt) happens after the write it depends on.
void Engine::build_schedule() {
  const Network& n = tr_.network;
  const int U = n.user_count(), X = n.cross_count(), Q = n.queue_count();
  auto id = [&](TaskKind k, int i) {
    switch (k) {
      case TaskKind::kAck:
        return i;
      case TaskKind::kUser:
        return U + i;
      case TaskKind::kCross:
        return 2 * U + i;
      case TaskKind::kQueueStep:
        return 2 * U + X + i;
      case TaskKind::kQueueOut:
        return 2 * U + X + Q + i;
    }
    return -1;
  };
  const int total = 2 * U + X + 2 * Q;
  std::vector<Task> tasks(total);
  for (int i = 0; i < U; ++i) {
    tasks[id(TaskKind::kAck, i)] = {TaskKind::kAck, i};
    tasks[id(TaskKind::kUser, i)] = {TaskKind::kUser, i};
  }
  for (int x = 0; x < X; ++x) tasks[id(TaskKind::kCross, x)] = {TaskKind::kCross, x};
  for (int j = 0; j < Q; ++j) {
    tasks[id(TaskKind::kQueueStep, j)] = {TaskKind::kQueueStep, j};
    tasks[id(TaskKind::kQueueOut, j)] = {TaskKind::kQueueOut, j};
  }

  std::vector<std::vector<int>> after(total);
  std::vector<int> indegree(total, 0);
  auto edge = [&](int from, int to) {
    after[from].push_back(to);
    ++indegree[to];
  };
  for (int j = 0; j < Q; ++j) {
    edge(id(TaskKind::kQueueStep, j), id(TaskKind::kQueueOut, j));
  }
  for (std::size_t f = 0; f < n.flows().size(); ++f) {
    const FlowPath& p = n.flows()[f];
    for (std::size_t h = 0; h < p.queues.size(); ++h) {
      if (p.hop_delays[h] >= dt_) continue;
      int into = id(TaskKind::kQueueStep, p.queues[h]);
      if (h > 0) {
        edge(id(TaskKind::kQueueOut, p.queues[h - 1]), into);
      } else if (p.source == FlowPath::Source::kUser) {
        edge(id(TaskKind::kUser, p.source_index), into);
      } else {
        edge(id(TaskKind::kCross, p.source_index), into);
      }
    }
  }
  for (int i = 0; i < U; ++i) {
    const Circuit& c = n.circuit_of(i);
    edge(id(TaskKind::kAck, i), id(TaskKind::kUser, i));
    if (c.hop_delays.back() < dt_) {
      edge(id(TaskKind::kQueueOut, c.queues.back()), id(TaskKind::kAck, i));
    }
    // FAST reads the circuit's backward map at t.
    if (tr_.scenario.protocols[i].kind == Protocol::Kind::kFast) {
      for (std::size_t k = 0; k < c.queues.size(); ++k) {
        if (c.delay_after(k) < dt_) {
          edge(id(TaskKind::kQueueStep, c.queues[k]), id(TaskKind::kUser, i));
        }
      }
    }
  }

  // Kahn's algorithm, smallest id first for a deterministic order.
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < total; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order_.push_back(tasks[v]);
    for (int w : after[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (static_cast<int>(order_.size()) != total) {
    throw ConfigError("zero-delay dependency cycle in the tick schedule");
  }
}

void Engine::initialize() {
  const Network& n = tr_.network;
  const Scenario& s = tr_.scenario;
  const bool eq = tr_.config.init == InitMode::kEquilibrium;

  std::vector<double> rates(n.user_count(), 0.0);
  std::vector<double> tau(n.queue_count(), 0.0);
  if (eq && n.user_count() > 0) {
    EquilibriumProblem p{&n, windows_before(s, 0.0),
                         cross_fractions(s, n, -dt_)};
    tr_.initial_equilibrium = equilibrium_queue(p);
    rates = tr_.initial_equilibrium->rates;
    tau = tr_.initial_equilibrium->tau;
  }

  // Enough backward-map history for the longest initial round trip.
  double span = 0.0;
  for (int i = 0; i < n.user_count(); ++i) {
    const Circuit& c = n.circuit_of(i);
    double rtt = c.total_delay;
    for (int j : c.queues) rtt += tau[j];
    span = std::max(span, rtt);
  }
  for (double d : tau) span = std::max(span, d);
  span = 2.0 * span + 10.0 * dt_ + 1.0;

  std::vector<std::vector<double>> flow_rates(n.queue_count());
  for (int j = 0; j < n.queue_count(); ++j) {
    flow_rates[j].assign(tr_.queues[j].flow_count(), 0.0);
  }
  for (std::size_t f = 0; f < n.flows().size(); ++f) {
    const FlowPath& p = n.flows()[f];
    double r = 0.0;
    if (p.source == FlowPath::Source::kUser) {
      r = rates[p.source_index];
    } else if (eq) {
      r = s.cross[p.source_index].fraction(-dt_) * n.capacity(p.queues[0]);
    }
    for (std::size_t h = 0; h < p.queues.size(); ++h) {
      flow_rates[p.queues[h]][tr_.slot[f][h]] = r;
    }
  }
  for (int j = 0; j < n.queue_count(); ++j) {
    tr_.queues[j].initialize(0.0, dt_, tau[j] * n.capacity(j), flow_rates[j],
                             span);
  }
  fast_window_.assign(n.user_count(), 0.0);
  fast_rate_.assign(n.user_count(), 0.0);
  for (int i = 0; i < n.user_count(); ++i) {
    const Protocol& p = s.protocols[i];
    double w0 = eq ? p.initial_window() : 0.0;
    tr_.users[i].initialize(0.0, dt_, w0, rates[i]);
    fast_window_[i] = p.initial_window();
  }
  for (int x = 0; x < n.cross_count(); ++x) {
    double r = eq ? s.cross[x].fraction(-dt_) * n.capacity(n.cross_queue(x))
                  : 0.0;
    tr_.cross[x].rate = Trajectory(r);
    tr_.cross[x].rate.record(-dt_, r);
  }
  tr_.eta.clear();
  for (int j = 0; j < n.queue_count(); ++j) {
    double r = 0.0;
    for (std::size_t f = 0; f < n.flows().size(); ++f) {
      const FlowPath& p = n.flows()[f];
      if (p.source != FlowPath::Source::kUser) continue;
      for (int q : p.queues) {
        if (q == j) r += rates[p.source_index];
      }
    }
    tr_.eta.emplace_back(r);
    tr_.eta.back().record(-dt_, r);
  }
}

double Engine::queue_input(int flow, int hop, double t) const {
  const Network& n = tr_.network;
  const FlowPath& p = n.flows()[flow];
  const double delay = p.hop_delays[hop];
  if (hop > 0) {
    const FifoQueue& prev = tr_.queues[p.queues[hop - 1]];
    return channel_output(prev.output(tr_.slot[flow][hop - 1]), delay, t);
  }
  if (p.source == FlowPath::Source::kUser) {
    return channel_output(tr_.users[p.source_index].sending(), delay, t);
  }
  return channel_output(tr_.cross[p.source_index].rate, delay, t);
}

void Engine::run_task(const Task& task, double t, bool first) {
  const Network& n = tr_.network;
  const Scenario& s = tr_.scenario;
  const bool cold = tr_.config.init == InitMode::kCold;
  switch (task.kind) {
    case TaskKind::kAck: {
      const Circuit& c = n.circuit_of(task.index);
      const int last = c.queues.back();
      const int hop = static_cast<int>(c.queues.size()) - 1;
      const Trajectory& out =
          tr_.queues[last].output(tr_.slot[task.index][hop]);
      ack_now_[task.index] = channel_output(out, c.hop_delays.back(), t);
      break;
    }
    case TaskKind::kUser: {
      const int i = task.index;
      const Protocol& p = s.protocols[i];
      UserModel& u = tr_.users[i];
      double wdot = 0.0, impulse = 0.0, window = 0.0;
      if (p.kind == Protocol::Kind::kScheduled) {
        ScheduledSample smp = scheduled_wdot(p.schedule, t, dt_);
        impulse = smp.impulse;
        if (first && cold) impulse += p.schedule.window_at(-dt_);
        window = smp.window - 0.5 * impulse;
      } else {
        if (first && cold) impulse = fast_window_[i];
        CircuitBackward b = backward_circuit(n, tr_.queues, i, t);
        double tau_back = std::max(t - b.time - u.total_delay(), 0.0);
        wdot = fast_wdot(fast_window_[i], tau_back, u.total_delay(), p.fast);
        fast_rate_[i] = wdot;
        window = fast_window_[i] - 0.5 * impulse;
      }
      u.step(t, ack_now_[i], wdot, impulse, window);
      break;
    }
    case TaskKind::kCross: {
      CrossTrace& x = tr_.cross[task.index];
      const TrafficProfile& prof = s.cross[task.index];
      double frac = first && cold ? 0.5 * prof.right_limit(t) : prof.fraction(t);
      x.rate.record(t, frac * n.capacity(x.queue));
      break;
    }
    case TaskKind::kQueueStep: {
      const int j = task.index;
      FifoQueue& q = tr_.queues[j];
      std::vector<double> in(q.flow_count(), 0.0);
      double eta = 0.0;
      for (std::size_t f = 0; f < n.flows().size(); ++f) {
        const FlowPath& p = n.flows()[f];
        for (std::size_t h = 0; h < p.queues.size(); ++h) {
          if (p.queues[h] != j) continue;
          double r = queue_input(static_cast<int>(f), static_cast<int>(h), t);
          in[tr_.slot[f][h]] = r;
          if (p.source == FlowPath::Source::kUser) eta += r;
        }
      }
      q.step(t, in);
      tr_.eta[j].record(t, eta);
      break;
    }
    case TaskKind::kQueueOut:
      tr_.queues[task.index].record_outputs(t);
      break;
  }
}

void Engine::finish_users(double t) {
  const Network& n = tr_.network;
  for (int i = 0; i < n.user_count(); ++i) {
    UserModel& u = tr_.users[i];
    CircuitBackward b = backward_circuit(n, tr_.queues, i, t, 2.0 * dt_);
    double flight = u.sending().integrate(b.time, t);
    double tau_back = std::max(t - b.time - u.total_delay(), 0.0);
    // A burst is a discretized impulse: the pointwise identity does not
    // apply while some backward time sits inside its spike.
    double residual =
        b.rate_defined && b.regular && !u.near_burst(b.time, 2.0 * dt_)
            ? std::abs(u.ack().eval(t) - b.rate * u.sending().eval(b.time))
            : 0.0;
    u.record_flight(t, flight, tau_back, residual);
    max_rtt_seen_ = std::max(max_rtt_seen_, t - b.time);
  }
}

void Engine::maybe_prune(double t) {
  double keep = 2.0 * max_rtt_seen_ + tr_.config.prune_margin;
  double cut = t - keep;
  if (cut <= 0.0) return;
  for (UserModel& u : tr_.users) u.prune_before(cut);
  for (FifoQueue& q : tr_.queues) q.prune_before(cut);
  for (CrossTrace& x : tr_.cross) x.rate.prune_before(cut);
  for (Trajectory& e : tr_.eta) e.prune_before(cut);
}

void Engine::tick(std::size_t k) {
  const double t = tr_.time(k);
  const bool first = k == 0;
  for (const Task& task : order_) {
    try {
      run_task(task, t, first);
    } catch (const SimulationError& e) {
      throw SimulationError(std::string(task_name(task.kind)) + " block " +
                            std::to_string(task.index) + " at t=" +
                            std::to_string(t) + ": " + e.what());
    }
  }
  finish_users(t);
  const Network& n = tr_.network;
  for (int i = 0; i < n.user_count(); ++i) {
    const Protocol& p = tr_.scenario.protocols[i];
    if (p.kind != Protocol::Kind::kFast) continue;
    fast_window_[i] = std::max(fast_window_[i] + dt_ * fast_rate_[i], 0.0);
    if (!std::isfinite(fast_window_[i])) {
      throw SimulationError("user " + n.user_id(i) + " window diverged at t=" +
                            std::to_string(t));
    }
  }
}

TraceSet Engine::run() {
  auto start = std::chrono::steady_clock::now();
  initialize();
  const std::size_t last = static_cast<std::size_t>(
      std::llround(tr_.config.horizon / dt_));
  const std::size_t prune_every =
      std::max<std::size_t>(1, static_cast<std::size_t>(1.0 / dt_));
  for (std::size_t k = 0; k <= last; ++k) {
    tick(k);
    if (tr_.config.prune_history && k % prune_every == 0) {
      maybe_prune(tr_.time(k));
    }
  }
  tr_.ticks = last + 1;
  tr_.runtime_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return std::move(tr_);
}

}  // namespace

TraceSet simulate(const Scenario& s, const SimConfig& cfg) {
  Engine e(s, cfg);
  return e.run();
}

}  // namespace fluidnet
