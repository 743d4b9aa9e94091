#include "fluidnet/topology.h"

#include <gtest/gtest.h>

#include "fluidnet/errors.h"
#include "fluidnet/presets.h"

namespace fluidnet {
namespace {

NetworkSpec one_buffer(int users) {
  NetworkSpec s;
  s.queues.push_back({"b", 100.0});
  for (int k = 1; k <= users; ++k) {
    std::string u = "u" + std::to_string(k);
    s.users.push_back({u, {"b"}});
    s.channels.push_back({u + "+", "b-", 0.01 * k});
    s.channels.push_back({"b+", u + "-", 0.02 * k});
  }
  return s;
}

TEST(Network, SingleBufferCircuit) {
  Network n = Network::build(one_buffer(1));
  const Circuit& c = n.circuit_of("u1");
  std::vector<std::string> expect{"u1+", "b-", "b+", "u1-"};
  EXPECT_EQ(n.circuit_nodes(c), expect);
  EXPECT_EQ(c.queues, std::vector<int>{0});
  EXPECT_NEAR(c.total_delay, 0.03, 1e-15);
  EXPECT_DOUBLE_EQ(c.forward_offsets[0], 0.01);
  EXPECT_DOUBLE_EQ(c.delay_after(0), 0.02);
}

TEST(Network, TwoUsersShareTheQueueEdge) {
  Network n = Network::build(one_buffer(2));
  const Circuit& a = n.circuit_of(0);
  const Circuit& b = n.circuit_of(1);
  EXPECT_EQ(a.edges[1], b.edges[1]);
  EXPECT_EQ(n.edges()[a.edges[1]].kind, EdgeKind::kQueue);
  const Node& in = n.nodes()[n.node_index("b-")];
  EXPECT_EQ(in.multiplicity, 2);
}

TEST(Network, SeriesRoutes) {
  Network n = Network::build(preset("scenario3").network);
  const Circuit& u1 = n.circuit_of("u1");
  std::vector<std::string> expect{"u1+", "b1-", "b1+", "b2-", "b2+", "u1-"};
  EXPECT_EQ(n.circuit_nodes(u1), expect);
  EXPECT_NEAR(u1.forward_offsets[1], 0.020, 1e-15);
  EXPECT_NEAR(u1.total_delay, 0.120, 1e-15);
  EXPECT_EQ(n.circuit_of("u2").queues, std::vector<int>{n.queue_index("b2")});
  EXPECT_EQ(n.circuit_of("u3").queues, std::vector<int>{n.queue_index("b1")});
  EXPECT_NEAR(n.circuit_of("u3").total_delay, 0.040, 1e-15);
}

TEST(Network, CrossTrafficFlowsFollowUsers) {
  Network n = Network::build(preset("scenario5").network);
  ASSERT_EQ(n.flows().size(), 4u);
  EXPECT_EQ(n.flows()[3].source, FlowPath::Source::kCross);
  EXPECT_EQ(n.cross_queue(0), n.queue_index("b1"));
}

TEST(Network, UnknownUser) {
  Network n = Network::build(one_buffer(1));
  EXPECT_THROW(n.circuit_of("nobody"), ConfigError);
}

TEST(Network, DanglingChannelNode) {
  NetworkSpec s = one_buffer(1);
  s.channels.push_back({"u9+", "b-", 0.0});
  try {
    Network::build(s);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("u9+"), std::string::npos);
  }
}

TEST(Network, DuplicateEdge) {
  NetworkSpec s = one_buffer(1);
  s.channels.push_back(s.channels.front());
  EXPECT_THROW(Network::build(s), ConfigError);
}

TEST(Network, RouteRevisitingQueue) {
  NetworkSpec s;
  s.queues = {{"b1", 10.0}, {"b2", 10.0}};
  s.users = {{"u", {"b1", "b2", "b1"}}};
  s.channels = {{"u+", "b1-", 0.1}, {"b1+", "b2-", 0.1}, {"b2+", "b1-", 0.1},
                {"b1+", "u-", 0.1}};
  EXPECT_THROW(Network::build(s), ConfigError);
}

TEST(Network, MissingReturnChannel) {
  NetworkSpec s = one_buffer(1);
  s.channels.pop_back();
  EXPECT_THROW(Network::build(s), ConfigError);
}

TEST(Network, IllegalChannelKind) {
  NetworkSpec s = one_buffer(1);
  s.channels.push_back({"u1+", "u1-", 0.1});
  EXPECT_THROW(Network::build(s), ConfigError);
}

TEST(Network, NonPositiveCapacity) {
  NetworkSpec s = one_buffer(1);
  s.queues[0].capacity = 0.0;
  EXPECT_THROW(Network::build(s), ConfigError);
}

TEST(Network, ZeroDelayLoop) {
  NetworkSpec s = one_buffer(1);
  for (auto& ch : s.channels) ch.delay = 0.0;
  EXPECT_THROW(Network::build(s), ConfigError);
}

}  // namespace
}  // namespace fluidnet
