#include "fluidnet/scenario.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    if (!j_.contains(key)) throw ParseError(at(key), "missing field");
    used_.insert(key);
    return j_.at(key);
  }

  std::string str(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) throw ParseError(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::string str_or(const std::string& key, std::string fallback) {
    return has(key) ? str(key) : fallback;
  }

  double num(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) throw ParseError(at(key), "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(at(key), "not finite");
    return d;
  }

  double num_or(const std::string& key, double fallback) {
    return has(key) ? num(key) : fallback;
  }

  // A quantity given under exactly one of `keys`, scaled by its factor.
  double unit(std::initializer_list<std::pair<const char*, double>> keys,
              const std::string& what) {
    const char* found = nullptr;
    double value = 0.0;
    for (auto [key, scale] : keys) {
      if (!has(key)) continue;
      if (found) {
        throw ParseError(at(key), what + " given twice (also as " +
                                      std::string(found) + ")");
      }
      found = key;
      value = num(key) * scale;
    }
    if (!found) {
      std::string names;
      for (auto [key, scale] : keys) {
        names += names.empty() ? key : std::string(" | ") + key;
      }
      throw ParseError(path_, "missing " + what + " with unit (" + names + ")");
    }
    return value;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw ParseError(at(it.key()), "unknown key");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const json& array_field(Fields& f, const std::string& key) {
  const json& v = f.get(key);
  if (!v.is_array()) throw ParseError(f.at(key), "expected an array");
  return v;
}

std::string line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  auto line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
  return "line " + std::to_string(line);
}

Protocol parse_protocol(const json& j, const std::string& path) {
  Fields f(j, path);
  Protocol p;
  std::string type = f.str("type");
  if (type == "scheduled") {
    p.kind = Protocol::Kind::kScheduled;
    p.schedule.initial = f.num("initial_window");
    if (f.has("steps")) {
      const json& steps = array_field(f, "steps");
      for (std::size_t k = 0; k < steps.size(); ++k) {
        Fields s(steps[k], f.at("steps") + "/" + std::to_string(k));
        WindowStep st;
        st.time = s.unit({{"time_s", 1.0}, {"time_ms", 1e-3}}, "step time");
        st.window = s.num("window");
        s.finish();
        p.schedule.steps.push_back(st);
      }
    }
  } else if (type == "fast") {
    p.kind = Protocol::Kind::kFast;
    p.fast.gamma = f.num("gamma");
    p.fast.alpha = f.num("alpha");
    p.fast_initial_window = f.num("initial_window");
  } else {
    throw ParseError(f.at("type"),
                     "unknown protocol '" + type + "' (scheduled | fast)");
  }
  f.finish();
  return p;
}

TrafficProfile parse_profile(const json& j, const std::string& path) {
  Fields f(j, path);
  TrafficProfile p;
  std::string type = f.str("type");
  if (type == "constant") {
    p = TrafficProfile::constant(f.num("fraction"));
  } else if (type == "square") {
    double mean = f.num("mean");
    double amplitude = f.num("amplitude");
    double period = f.unit({{"period_s", 1.0}, {"period_ms", 1e-3}}, "period");
    double phase = f.has("phase_s") || f.has("phase_ms")
                       ? f.unit({{"phase_s", 1.0}, {"phase_ms", 1e-3}}, "phase")
                       : 0.0;
    p = TrafficProfile::square(mean, amplitude, period, phase);
  } else {
    throw ParseError(f.at("type"),
                     "unknown profile '" + type + "' (constant | square)");
  }
  f.finish();
  return p;
}

json protocol_json(const Protocol& p) {
  json j;
  if (p.kind == Protocol::Kind::kFast) {
    j["type"] = "fast";
    j["gamma"] = p.fast.gamma;
    j["alpha"] = p.fast.alpha;
    j["initial_window"] = p.fast_initial_window;
    return j;
  }
  j["type"] = "scheduled";
  j["initial_window"] = p.schedule.initial;
  json steps = json::array();
  for (const WindowStep& s : p.schedule.steps) {
    steps.push_back({{"time_s", s.time}, {"window", s.window}});
  }
  j["steps"] = steps;
  return j;
}

json profile_json(const TrafficProfile& p) {
  if (p.kind == TrafficProfile::Kind::kConstant) {
    return {{"type", "constant"}, {"fraction", p.mean}};
  }
  return {{"type", "square"},     {"mean", p.mean},
          {"amplitude", p.amplitude}, {"period_s", p.period},
          {"phase_s", p.phase}};
}

}  // namespace

double mbps_to_pps(double mbps, double packet_bytes) {
  if (!(packet_bytes > 0.0)) {
    throw ConfigError("packet size must be > 0 to convert Mb/s");
  }
  return mbps * 1e6 / (8.0 * packet_bytes);
}

void Scenario::validate() const {
  if (protocols.size() != network.users.size()) {
    throw ConfigError("scenario '" + name + "': " +
                      std::to_string(network.users.size()) + " users but " +
                      std::to_string(protocols.size()) + " protocols");
  }
  if (cross.size() != network.cross.size()) {
    throw ConfigError("scenario '" + name +
                      "': cross-traffic sources and profiles differ in count");
  }
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    const Protocol& p = protocols[i];
    const std::string who = "user '" + network.users[i].id + "': ";
    try {
      if (p.kind == Protocol::Kind::kScheduled) {
        p.schedule.validate();
      } else {
        if (!(p.fast.gamma > 0.0) || !(p.fast.alpha > 0.0)) {
          throw ConfigError("FAST gamma and alpha must be > 0");
        }
        if (!(p.fast_initial_window >= 0.0)) {
          throw ConfigError("initial window must be >= 0");
        }
      }
    } catch (const ConfigError& e) {
      throw ConfigError(who + e.what());
    }
  }
  for (std::size_t x = 0; x < cross.size(); ++x) {
    try {
      cross[x].validate();
    } catch (const ConfigError& e) {
      throw ConfigError("cross-traffic '" + network.cross[x].id +
                        "': " + e.what());
    }
  }
  if (!(run.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(run.horizon > 0.0)) throw ConfigError("horizon must be > 0");
  if (!(run.packet_warmup >= 0.0)) throw ConfigError("warmup must be >= 0");
  if (!(run.sample_interval > 0.0)) {
    throw ConfigError("sample interval must be > 0");
  }
  if (!(run.count_period >= 0.0)) throw ConfigError("count period must be >= 0");
}

Scenario parse_scenario(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ParseError("line 1", "empty scenario file");
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }

  Scenario s;
  Fields root(doc, "");
  s.name = root.str("name");
  s.description = root.str_or("description", "");
  s.packet_bytes = root.num_or("packet_bytes", 0.0);
  if (s.packet_bytes < 0.0) {
    throw ParseError(root.at("packet_bytes"), "must be > 0");
  }

  std::set<std::string> queue_ids;
  const json& queues = array_field(root, "queues");
  for (std::size_t j = 0; j < queues.size(); ++j) {
    Fields f(queues[j], "/queues/" + std::to_string(j));
    QueueDecl q;
    q.id = f.str("id");
    if (f.has("capacity_mbps")) {
      if (!(s.packet_bytes > 0.0)) {
        throw ParseError(f.at("capacity_mbps"),
                         "capacity in Mb/s needs a top-level packet_bytes");
      }
      if (f.has("capacity_pps")) {
        throw ParseError(f.at("capacity_pps"), "capacity given twice");
      }
      q.capacity = mbps_to_pps(f.num("capacity_mbps"), s.packet_bytes);
    } else {
      q.capacity = f.unit({{"capacity_pps", 1.0}}, "capacity");
    }
    f.finish();
    queue_ids.insert(q.id);
    s.network.queues.push_back(q);
  }

  const json& users = array_field(root, "users");
  for (std::size_t i = 0; i < users.size(); ++i) {
    Fields f(users[i], "/users/" + std::to_string(i));
    UserDecl u;
    u.id = f.str("id");
    const json& route = array_field(f, "route");
    for (std::size_t k = 0; k < route.size(); ++k) {
      std::string at = f.at("route") + "/" + std::to_string(k);
      if (!route[k].is_string()) throw ParseError(at, "expected a queue id");
      std::string qid = route[k].get<std::string>();
      if (!queue_ids.count(qid)) {
        throw ParseError(at, "dangling reference to queue '" + qid + "'");
      }
      u.route.push_back(qid);
    }
    s.protocols.push_back(parse_protocol(f.get("protocol"), f.at("protocol")));
    f.finish();
    s.network.users.push_back(u);
  }

  if (root.has("channels")) {
    const json& channels = array_field(root, "channels");
    for (std::size_t k = 0; k < channels.size(); ++k) {
      Fields f(channels[k], "/channels/" + std::to_string(k));
      ChannelDecl ch;
      ch.from = f.str("from");
      ch.to = f.str("to");
      ch.delay = f.unit({{"delay_s", 1.0}, {"delay_ms", 1e-3}}, "delay");
      f.finish();
      s.network.channels.push_back(ch);
    }
  }

  if (root.has("cross")) {
    const json& cross = array_field(root, "cross");
    for (std::size_t x = 0; x < cross.size(); ++x) {
      Fields f(cross[x], "/cross/" + std::to_string(x));
      CrossDecl c;
      c.id = f.str("id");
      c.queue = f.str("queue");
      if (!queue_ids.count(c.queue)) {
        throw ParseError(f.at("queue"),
                         "dangling reference to queue '" + c.queue + "'");
      }
      s.cross.push_back(parse_profile(f.get("profile"), f.at("profile")));
      f.finish();
      s.network.cross.push_back(c);
    }
  }

  if (root.has("run")) {
    Fields f(root.get("run"), "/run");
    RunSettings& r = s.run;
    if (f.has("dt_s")) r.dt = f.num("dt_s");
    if (f.has("horizon_s")) r.horizon = f.num("horizon_s");
    if (f.has("init")) {
      std::string init = f.str("init");
      if (init == "cold") {
        r.init = InitMode::kCold;
      } else if (init == "equilibrium") {
        r.init = InitMode::kEquilibrium;
      } else {
        throw ParseError(f.at("init"), "expected cold | equilibrium");
      }
    }
    if (f.has("packet_warmup_s")) r.packet_warmup = f.num("packet_warmup_s");
    if (f.has("sample_interval_s")) {
      r.sample_interval = f.num("sample_interval_s");
    }
    if (f.has("count_period_s")) r.count_period = f.num("count_period_s");
    f.finish();
  }
  root.finish();

  try {
    s.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ParseError("/", e.what());
  }
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  if (s.packet_bytes > 0.0) j["packet_bytes"] = s.packet_bytes;
  json queues = json::array();
  for (const QueueDecl& q : s.network.queues) {
    queues.push_back({{"id", q.id}, {"capacity_pps", q.capacity}});
  }
  j["queues"] = queues;
  json users = json::array();
  for (std::size_t i = 0; i < s.network.users.size(); ++i) {
    const UserDecl& u = s.network.users[i];
    json ju{{"id", u.id}, {"route", u.route}};
    if (i < s.protocols.size()) ju["protocol"] = protocol_json(s.protocols[i]);
    users.push_back(ju);
  }
  j["users"] = users;
  json channels = json::array();
  for (const ChannelDecl& ch : s.network.channels) {
    channels.push_back({{"from", ch.from}, {"to", ch.to}, {"delay_s", ch.delay}});
  }
  j["channels"] = channels;
  json cross = json::array();
  for (std::size_t x = 0; x < s.network.cross.size(); ++x) {
    json jx{{"id", s.network.cross[x].id}, {"queue", s.network.cross[x].queue}};
    if (x < s.cross.size()) jx["profile"] = profile_json(s.cross[x]);
    cross.push_back(jx);
  }
  j["cross"] = cross;
  j["run"] = {
      {"dt_s", s.run.dt},
      {"horizon_s", s.run.horizon},
      {"init", s.run.init == InitMode::kCold ? "cold" : "equilibrium"},
      {"packet_warmup_s", s.run.packet_warmup},
      {"sample_interval_s", s.run.sample_interval},
      {"count_period_s", s.run.count_period},
  };
  return j.dump(2) + "\n";
}

}  // namespace fluidnet
