#include "fluidnet/topology.h"

#include <cmath>
#include <set>
#include <utility>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

bool is_user_node(NodeKind k) {
  return k == NodeKind::kUserInput || k == NodeKind::kUserOutput;
}

}  // namespace

double Circuit::delay_after(std::size_t k) const {
  double d = 0.0;
  for (std::size_t h = k + 1; h < hop_delays.size(); ++h) d += hop_delays[h];
  return d;
}

Network Network::build(const NetworkSpec& spec) {
  Network net;
  net.spec_ = spec;

  std::set<std::string> ids;
  auto claim_id = [&](const std::string& id, const char* what) {
    if (id.empty()) throw ConfigError(std::string("empty ") + what + " id");
    if (!ids.insert(id).second) {
      throw ConfigError("duplicate element id '" + id + "'");
    }
  };
  auto add_node = [&](const std::string& name, NodeKind kind, int element) {
    net.node_by_name_[name] = static_cast<int>(net.nodes_.size());
    net.nodes_.push_back(Node{name, kind, element, 0});
  };

  for (const QueueDecl& q : spec.queues) {
    claim_id(q.id, "queue");
    if (!(q.capacity > 0.0) || !std::isfinite(q.capacity)) {
      throw ConfigError("queue '" + q.id + "' needs a positive capacity");
    }
    int j = static_cast<int>(net.queues_.size());
    net.queues_.push_back(q);
    add_node(q.id + "-", NodeKind::kBufferInput, j);
    add_node(q.id + "+", NodeKind::kBufferOutput, j);
    net.edges_.push_back(Edge{EdgeKind::kQueue, net.node_index(q.id + "-"),
                              net.node_index(q.id + "+"), 0.0});
  }
  for (const UserDecl& u : spec.users) {
    claim_id(u.id, "user");
    int i = static_cast<int>(net.users_.size());
    net.users_.push_back(u);
    add_node(u.id + "-", NodeKind::kUserInput, i);
    add_node(u.id + "+", NodeKind::kUserOutput, i);
    net.edges_.push_back(Edge{EdgeKind::kUser, net.node_index(u.id + "-"),
                              net.node_index(u.id + "+"), 0.0});
  }
  if (net.users_.empty() && spec.cross.empty()) {
    throw ConfigError("network has no users and no cross-traffic sources");
  }

  // Declared channels, keyed by (from, to) node index.
  std::map<std::pair<int, int>, int> channel_edge;
  for (const ChannelDecl& ch : spec.channels) {
    const std::string label = "channel " + ch.from + " -> " + ch.to;
    auto from_it = net.node_by_name_.find(ch.from);
    auto to_it = net.node_by_name_.find(ch.to);
    if (from_it == net.node_by_name_.end()) {
      throw ConfigError(label + ": dangling node '" + ch.from + "'");
    }
    if (to_it == net.node_by_name_.end()) {
      throw ConfigError(label + ": dangling node '" + ch.to + "'");
    }
    if (!(ch.delay >= 0.0) || !std::isfinite(ch.delay)) {
      throw ConfigError(label + ": delay must be finite and >= 0");
    }
    const Node& a = net.nodes_[from_it->second];
    const Node& b = net.nodes_[to_it->second];
    bool ok = (a.kind == NodeKind::kUserOutput &&
               b.kind == NodeKind::kBufferInput) ||
              (a.kind == NodeKind::kBufferOutput &&
               b.kind == NodeKind::kUserInput) ||
              (a.kind == NodeKind::kBufferOutput &&
               b.kind == NodeKind::kBufferInput && a.element != b.element);
    if (!ok) {
      throw ConfigError(label +
                        ": channels may only connect u+ -> b-, b+ -> u- or "
                        "b+ -> b- of distinct buffers");
    }
    auto key = std::make_pair(from_it->second, to_it->second);
    if (channel_edge.count(key)) {
      throw ConfigError(label + ": duplicate edge");
    }
    channel_edge[key] = static_cast<int>(net.edges_.size());
    net.edges_.push_back(
        Edge{EdgeKind::kChannel, from_it->second, to_it->second, ch.delay});
  }

  std::set<int> used_channels;
  std::vector<int> queue_flows(net.queues_.size(), 0);
  auto channel_between = [&](const std::string& from, const std::string& to,
                             const std::string& who) -> int {
    auto it = channel_edge.find({net.node_index(from), net.node_index(to)});
    if (it == channel_edge.end()) {
      throw ConfigError(who + ": missing channel " + from + " -> " + to);
    }
    used_channels.insert(it->second);
    return it->second;
  };

  for (int i = 0; i < net.user_count(); ++i) {
    const UserDecl& u = net.users_[i];
    const std::string who = "user '" + u.id + "'";
    if (u.route.empty()) throw ConfigError(who + ": empty route");
    Circuit c;
    c.user = i;
    std::set<int> seen;
    std::string prev = u.id + "+";
    for (const std::string& qid : u.route) {
      auto it = net.node_by_name_.find(qid + "-");
      if (it == net.node_by_name_.end() ||
          net.nodes_[it->second].kind != NodeKind::kBufferInput) {
        throw ConfigError(who + ": route references unknown queue '" + qid +
                          "'");
      }
      int j = net.nodes_[it->second].element;
      if (!seen.insert(j).second) {
        throw ConfigError(who + ": route traverses queue '" + qid +
                          "' twice (cycle without a user edge)");
      }
      int e = channel_between(prev, qid + "-", who);
      c.edges.push_back(e);
      c.hop_delays.push_back(net.edges_[e].delay);
      c.total_delay += net.edges_[e].delay;
      c.forward_offsets.push_back(c.total_delay);
      c.edges.push_back(j);  // queue edges occupy indices [0, queue_count)
      c.queues.push_back(j);
      ++queue_flows[j];
      prev = qid + "+";
    }
    int e = channel_between(prev, u.id + "-", who);
    c.edges.push_back(e);
    c.hop_delays.push_back(net.edges_[e].delay);
    c.total_delay += net.edges_[e].delay;
    if (!(c.total_delay > 0.0)) {
      throw ConfigError(who +
                        ": total propagation delay must be positive "
                        "(zero-delay algebraic loop)");
    }
    net.circuits_.push_back(std::move(c));
  }

  for (const CrossDecl& x : spec.cross) {
    claim_id(x.id, "cross-traffic");
    int xi = static_cast<int>(net.cross_.size());
    int j = -1;
    for (int q = 0; q < net.queue_count(); ++q) {
      if (net.queues_[q].id == x.queue) j = q;
    }
    if (j < 0) {
      throw ConfigError("cross-traffic '" + x.id +
                        "': dangling queue reference '" + x.queue + "'");
    }
    net.cross_.push_back(x);
    net.cross_queue_.push_back(j);
    add_node(x.id + "+", NodeKind::kCrossOutput, xi);
    add_node(x.id + "-", NodeKind::kCrossInput, xi);
    net.edges_.push_back(Edge{EdgeKind::kChannel, net.node_index(x.id + "+"),
                              net.node_index(x.queue + "-"), 0.0});
    net.edges_.push_back(Edge{EdgeKind::kChannel, net.node_index(x.queue + "+"),
                              net.node_index(x.id + "-"), 0.0});
    ++queue_flows[j];
  }

  for (int j = 0; j < net.queue_count(); ++j) {
    if (queue_flows[j] == 0) {
      throw ConfigError("queue '" + net.queues_[j].id +
                        "' is on no route (dangling node)");
    }
  }
  for (const auto& [key, e] : channel_edge) {
    if (!used_channels.count(e)) {
      throw ConfigError("channel " + net.nodes_[key.first].name + " -> " +
                        net.nodes_[key.second].name +
                        " is on no circuit (dangling edge)");
    }
  }

  for (Node& n : net.nodes_) {
    if (is_user_node(n.kind) || n.kind == NodeKind::kCrossInput ||
        n.kind == NodeKind::kCrossOutput) {
      n.multiplicity = 1;
    } else {
      n.multiplicity = queue_flows[n.element];
    }
  }

  for (const Circuit& c : net.circuits_) {
    net.flows_.push_back(FlowPath{FlowPath::Source::kUser, c.user,
                                  net.users_[c.user].id, c.queues,
                                  c.hop_delays});
  }
  for (int x = 0; x < net.cross_count(); ++x) {
    net.flows_.push_back(FlowPath{FlowPath::Source::kCross, x,
                                  net.cross_[x].id, {net.cross_queue_[x]},
                                  {0.0, 0.0}});
  }
  return net;
}

int Network::user_index(const std::string& id) const {
  for (int i = 0; i < user_count(); ++i) {
    if (users_[i].id == id) return i;
  }
  throw ConfigError("unknown user '" + id + "'");
}

int Network::queue_index(const std::string& id) const {
  for (int j = 0; j < queue_count(); ++j) {
    if (queues_[j].id == id) return j;
  }
  throw ConfigError("unknown queue '" + id + "'");
}

int Network::node_index(const std::string& name) const {
  auto it = node_by_name_.find(name);
  if (it == node_by_name_.end()) {
    throw ConfigError("unknown node '" + name + "'");
  }
  return it->second;
}

const Circuit& Network::circuit_of(int user) const {
  if (user < 0 || user >= user_count()) {
    throw ConfigError("unknown user index " + std::to_string(user));
  }
  return circuits_[user];
}

const Circuit& Network::circuit_of(const std::string& user_id) const {
  return circuits_[user_index(user_id)];
}

std::vector<std::string> Network::circuit_nodes(const Circuit& c) const {
  std::vector<std::string> out;
  out.push_back(users_[c.user].id + "+");
  for (int j : c.queues) {
    out.push_back(queues_[j].id + "-");
    out.push_back(queues_[j].id + "+");
  }
  out.push_back(users_[c.user].id + "-");
  return out;
}

}  // namespace fluidnet
