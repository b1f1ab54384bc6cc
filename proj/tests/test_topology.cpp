#include "edgesim/topology.h"

#include "fixtures.h"
#include "oracles.h"

#include <gtest/gtest.h>

#include <random>

namespace edgesim {

struct TestTopology : public ::testing::Test {
  static TopologyError::Code errorOf(std::vector<Node> aNodes, std::vector<Link> aLinks) {
    try {
      Topology(std::move(aNodes), std::move(aLinks));
    } catch (const TopologyError& aErr) {
      return aErr.code();
    }
    ADD_FAILURE() << "no error thrown";
    return TopologyError::Code::NoPath;
  }
};

TEST_F(TestTopology, test_build_examples) {
  const Topology mySingle({Node{0, 1e9, {Role::Client, Role::Executor}}}, {});
  EXPECT_EQ(1u, mySingle.nodes().size());

  const Topology myPair({Node{0, 1e9, {Role::Client}}, Node{1, 1e9, {Role::Executor}}},
                        {Link{0, 1, 1e6, 1e-3}});
  EXPECT_EQ(2u, myPair.nodes().size());
  EXPECT_EQ(0u, myPair.linkIndex(1, 0));

  using C = TopologyError::Code;
  EXPECT_EQ(C::DanglingLinkEndpoint,
            errorOf({Node{0, 1, {Role::Client}},
                     Node{1, 1, {Role::Executor}},
                     Node{2, 1, {Role::Executor}}},
                    {Link{0, 1, 1, 0}, Link{1, 7, 1, 0}}));
  EXPECT_EQ(C::DuplicateNodeId,
            errorOf({Node{0, 1, {Role::Client}}, Node{0, 1, {Role::Executor}}}, {}));
  EXPECT_EQ(C::DisconnectedGraph,
            errorOf({Node{0, 1, {Role::Client}}, Node{1, 1, {Role::Executor}}}, {}));
  EXPECT_EQ(C::NonPositiveCapacityOrSpeed,
            errorOf({Node{0, 0, {Role::Client, Role::Executor}}}, {}));
  EXPECT_EQ(C::NonPositiveCapacityOrSpeed,
            errorOf({Node{0, 1, {Role::Client}}, Node{1, 1, {Role::Executor}}},
                    {Link{0, 1, 0, 0}}));
  EXPECT_EQ(C::InvalidLink,
            errorOf({Node{0, 1, {Role::Client}}, Node{1, 1, {Role::Executor}}},
                    {Link{0, 1, 1, 0}, Link{1, 0, 1, 0}}));
  EXPECT_EQ(C::MissingRole, errorOf({Node{0, 1, {Role::Client}}}, {}));
}

TEST_F(TestTopology, test_build_from_json) {
  const auto myTopo = buildTopology(nlohmann::json::parse(R"({
    "nodes": [{"id": 0, "speed": 1e9, "roles": ["client"]},
              {"id": 1, "speed": 2e9, "roles": ["executor", "state_store"]}],
    "links": [{"a": 0, "b": 1, "capacity": 1e6, "latency": 0.001}]})"));
  EXPECT_EQ(2e9, myTopo.node(1).theSpeed);
  EXPECT_TRUE(myTopo.node(1).hasRole(Role::StateStore));
  EXPECT_EQ(std::vector<NodeId>{1}, myTopo.nodesWithRole(Role::Executor));
  EXPECT_EQ(myTopo.toJson(), buildTopology(myTopo.toJson()).toJson());
  EXPECT_THROW(buildTopology(nlohmann::json::parse(
                   R"({"nodes": [{"id": 0, "speed": 1, "roles": ["boss"]}]})")),
               std::invalid_argument);
}

TEST_F(TestTopology, test_shortest_path_examples) {
  const auto myLine = test::lineTopology();
  EXPECT_EQ(Path{{1}}, myLine.shortestPath(1, 1));
  EXPECT_EQ(0u, myLine.shortestPath(1, 1).hopCount());
  EXPECT_EQ((Path{{0, 1, 2}}), myLine.shortestPath(0, 2));
  EXPECT_EQ(2u, myLine.shortestPath(0, 2).hopCount());
  EXPECT_THROW(myLine.shortestPath(0, 9), TopologyError);

  // the long way around is faster than the direct link
  const Topology myTriangle(
      {Node{0, 1, {Role::Client}}, Node{1, 1, {Role::Executor}}, Node{2, 1, {Role::Executor}}},
      {Link{0, 2, 1, 0.5}, Link{0, 1, 1, 0.1}, Link{1, 2, 1, 0.1}});
  EXPECT_EQ((Path{{0, 1, 2}}), myTriangle.shortestPath(0, 2));
  EXPECT_EQ((Path{{2, 1, 0}}), myTriangle.shortestPath(2, 0));
}

TEST_F(TestTopology, test_shortest_path_tie_break) {
  // square 0-1-3, 0-2-3 with equal latencies: lexicographic [0,1,3]
  const Topology mySquare({Node{0, 1, {Role::Client}},
                           Node{1, 1, {Role::Executor}},
                           Node{2, 1, {Role::Executor}},
                           Node{3, 1, {Role::Executor}}},
                          {Link{0, 2, 1, 0.25},
                           Link{2, 3, 1, 0.25},
                           Link{0, 1, 1, 0.25},
                           Link{1, 3, 1, 0.25}});
  EXPECT_EQ((Path{{0, 1, 3}}), mySquare.shortestPath(0, 3));
  EXPECT_EQ((Path{{3, 1, 0}}), mySquare.shortestPath(3, 0));
}

TEST_F(TestTopology, test_transfer_delay_examples) {
  const Topology myPair({Node{0, 1e9, {Role::Client}}, Node{1, 1e9, {Role::Executor}}},
                        {Link{0, 1, 1e6, 1e-3}});
  EXPECT_EQ(0.0, myPair.transferDelay(myPair.shortestPath(0, 0), 12345));
  EXPECT_DOUBLE_EQ(1e-3, myPair.transferDelay(myPair.shortestPath(0, 1), 0));
  EXPECT_DOUBLE_EQ(2e-3, myPair.transferDelay(myPair.shortestPath(0, 1), 1000));
}

TEST_F(TestTopology, test_routing_properties) {
  std::mt19937_64 myRng(42);
  // dyadic latencies and power-of-two capacities keep all sums exact
  const auto myDyadic = [](std::mt19937_64& aRng) {
    return std::uniform_int_distribution<int>(0, 64)(aRng) / 1024.0;
  };
  for (int myGraph = 0; myGraph < 100; myGraph++) {
    const auto myNodes = std::uniform_int_distribution<size_t>(1, 8)(myRng);
    const auto myTopo  = oracle::randomTopology(myRng, myNodes, 0.3, myDyadic);
    for (const auto& mySrc : myTopo.nodes()) {
      for (const auto& myDst : myTopo.nodes()) {
        const auto& myPath = myTopo.shortestPath(mySrc.theId, myDst.theId);
        ASSERT_EQ(mySrc.theId, myPath.theNodes.front());
        ASSERT_EQ(myDst.theId, myPath.theNodes.back());
        for (size_t i = 1; i < myPath.theNodes.size(); i++) {
          ASSERT_NE(Topology::NoLink,
                    myTopo.linkIndex(myPath.theNodes[i - 1], myPath.theNodes[i]));
        }
        auto mySorted = myPath.theNodes;
        std::sort(mySorted.begin(), mySorted.end());
        ASSERT_EQ(mySorted.end(), std::adjacent_find(mySorted.begin(), mySorted.end()));

        ASSERT_EQ(oracle::bruteForceLatency(myTopo, mySrc.theId, myDst.theId),
                  myTopo.pathLatency(myPath));
        ASSERT_EQ(myTopo.pathLatency(myPath),
                  myTopo.pathLatency(myTopo.shortestPath(myDst.theId, mySrc.theId)));
      }
    }
  }
}

TEST_F(TestTopology, test_transfer_delay_properties) {
  const Topology myTopo({Node{0, 1, {Role::Client}},
                         Node{1, 1, {Role::Executor}},
                         Node{2, 1, {Role::Executor}}},
                        {Link{0, 1, 1024.0 * 1024, 3.0 / 1024},
                         Link{1, 2, 4096, 5.0 / 1024}});
  const auto& myPath = myTopo.shortestPath(0, 2);
  const auto  myLatencySum = myTopo.pathLatency(myPath);

  std::mt19937_64 myRng(7);
  std::uniform_int_distribution<uint64_t> mySize(0, 1u << 20);
  for (int i = 0; i < 1000; i++) {
    const auto a = mySize(myRng);
    const auto b = mySize(myRng);
    EXPECT_EQ(myTopo.transferDelay(myPath, a + b),
              myTopo.transferDelay(myPath, a) + myTopo.transferDelay(myPath, b) -
                  myLatencySum);
    EXPECT_LE(myTopo.transferDelay(myPath, std::min(a, b)),
              myTopo.transferDelay(myPath, std::max(a, b)));
  }
}

} // namespace edgesim
