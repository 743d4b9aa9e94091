#pragma once

#include <map>
#include <string>
#include <vector>

namespace fluidnet {

// Network graph in which every element (user, queue, channel) is an edge and
// nodes are connection points. A user `u` owns nodes "u-" (ACK input) and
// "u+" (sending output), a queue `b` owns "b-" and "b+", and a cross-traffic
// source `x` owns "x+" (injection) and "x-" (sink).

enum class NodeKind {
  kUserInput,
  kUserOutput,
  kBufferInput,
  kBufferOutput,
  kCrossInput,
  kCrossOutput,
};

enum class EdgeKind { kUser, kQueue, kChannel };

struct Node {
  std::string name;
  NodeKind kind;
  int element;       // index of the owning user, queue or cross source
  int multiplicity;  // parallel flows through the node
};

struct Edge {
  EdgeKind kind;
  int from;            // beta(E)
  int to;              // epsilon(E)
  double delay = 0.0;  // seconds, channels only
};

struct UserDecl {
  std::string id;
  std::vector<std::string> route;  // queue ids in forward order

  bool operator==(const UserDecl&) const = default;
};

struct QueueDecl {
  std::string id;
  double capacity = 0.0;  // packets per second

  bool operator==(const QueueDecl&) const = default;
};

struct ChannelDecl {
  std::string from;  // node name, e.g. "u1+"
  std::string to;    // node name, e.g. "b1-"
  double delay = 0.0;  // seconds

  bool operator==(const ChannelDecl&) const = default;
};

struct CrossDecl {
  std::string id;
  std::string queue;

  bool operator==(const CrossDecl&) const = default;
};

struct NetworkSpec {
  std::vector<UserDecl> users;
  std::vector<QueueDecl> queues;
  std::vector<ChannelDecl> channels;
  std::vector<CrossDecl> cross;

  bool operator==(const NetworkSpec&) const = default;
};

// Closed path <u+, b1-, b1+, ..., bn+, u-> of one user.
struct Circuit {
  int user = -1;
  std::vector<int> edges;           // channel, queue, channel, ..., channel
  std::vector<int> queues;          // queue indices in traversal order
  std::vector<double> hop_delays;   // channel delay before each queue, then
                                    // the delay from the last queue to u-
  std::vector<double> forward_offsets;  // propagation delay before each queue
  double total_delay = 0.0;

  // Propagation delay downstream of the k-th queue, up to u-.
  double delay_after(std::size_t k) const;
};

// Route of one flow through the queues. Users come first (flow index equals
// user index), then cross-traffic sources.
struct FlowPath {
  enum class Source { kUser, kCross };
  Source source;
  int source_index;
  std::string name;
  std::vector<int> queues;
  std::vector<double> hop_delays;  // same layout as Circuit::hop_delays
};

class Network {
 public:
  // Validates the declaration and derives every circuit. Throws ConfigError
  // naming the offending element.
  static Network build(const NetworkSpec& spec);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<FlowPath>& flows() const { return flows_; }

  int user_count() const { return static_cast<int>(users_.size()); }
  int queue_count() const { return static_cast<int>(queues_.size()); }
  int cross_count() const { return static_cast<int>(cross_.size()); }

  const std::string& user_id(int i) const { return users_.at(i).id; }
  const std::string& queue_id(int j) const { return queues_.at(j).id; }
  const std::string& cross_id(int x) const { return cross_.at(x).id; }
  double capacity(int j) const { return queues_.at(j).capacity; }
  int cross_queue(int x) const { return cross_queue_.at(x); }

  int user_index(const std::string& id) const;
  int queue_index(const std::string& id) const;
  int node_index(const std::string& name) const;

  const Circuit& circuit_of(int user) const;
  const Circuit& circuit_of(const std::string& user_id) const;

  // Node names along a circuit, e.g. {"u+", "b-", "b+", "u-"}.
  std::vector<std::string> circuit_nodes(const Circuit& c) const;

  const NetworkSpec& spec() const { return spec_; }

 private:
  NetworkSpec spec_;
  std::vector<UserDecl> users_;
  std::vector<QueueDecl> queues_;
  std::vector<CrossDecl> cross_;
  std::vector<int> cross_queue_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Circuit> circuits_;
  std::vector<FlowPath> flows_;
  std::map<std::string, int> node_by_name_;
};

}  // namespace fluidnet
