#include "edgesim/models.h"

#include "fixtures.h"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

namespace edgesim {

namespace {

StateDirectory directoryWith(const std::string& aChain, const NodeId aHolder) {
  StateDirectory ret;
  ret.setHolder(aChain, aHolder);
  return ret;
}

std::vector<NodeId> randomExecutors(std::mt19937_64& aRng,
                                    const size_t     aLength,
                                    const NodeId     aMax) {
  std::vector<NodeId> ret;
  for (size_t i = 0; i < aLength; i++) {
    ret.emplace_back(std::uniform_int_distribution<NodeId>(1, aMax)(aRng));
  }
  return ret;
}

} // namespace

TEST(TestModels, test_client_state_single_function) {
  const auto myChain = test::makeChain("app", 1, 1000, 1000, 10000);
  const auto myPlan  = compilePlan(
      test::invocationOf(myChain), myChain, {1}, ExecutionModel::ClientState, {});
  ASSERT_EQ(3u, myPlan.theSteps.size());
  EXPECT_EQ(Step(TransferStep{0, 1, 11000}), myPlan.theSteps[0]);
  EXPECT_EQ(Step(ComputeStep{1, 1e7}), myPlan.theSteps[1]);
  EXPECT_EQ(Step(TransferStep{1, 0, 11000}), myPlan.theSteps[2]);
  EXPECT_EQ(22000u, myPlan.totalPayloadBytes());
}

TEST(TestModels, test_remote_state_single_function) {
  const auto myChain = test::makeChain("app", 1, 1000, 1000, 10000);
  const auto myPlan  = compilePlan(test::invocationOf(myChain),
                                  myChain,
                                  {1},
                                  ExecutionModel::RemoteState,
                                  directoryWith("app", 2));
  const std::vector<Step> myExpected{TransferStep{0, 1, 1000},
                                     TransferStep{2, 1, 10000},
                                     ComputeStep{1, 1e7},
                                     TransferStep{1, 2, 10000},
                                     TransferStep{1, 0, 1000}};
  EXPECT_EQ(myExpected, myPlan.theSteps);
  EXPECT_EQ(22000u, myPlan.totalPayloadBytes());
  // same bytes as client_state, different paths: 1000 + 10000 + 10000 + 1000
  EXPECT_EQ(22000u, myPlan.byteHops(test::lineTopology()));
}

TEST(TestModels, test_local_state_and_propagation) {
  const auto myChain = test::makeChain("app", 3, 1000, 500, 10000);
  const auto myInv   = test::invocationOf(myChain);

  const auto myLocal = compilePlan(
      myInv, myChain, {2, 2, 2}, ExecutionModel::LocalState, directoryWith("app", 2));
  const std::vector<Step> myExpected{TransferStep{0, 2, 1000},
                                     ComputeStep{2, 1e7},
                                     ComputeStep{2, 1e7},
                                     ComputeStep{2, 1e7},
                                     TransferStep{2, 0, 500}};
  EXPECT_EQ(myExpected, myLocal.theSteps);
  EXPECT_TRUE(isWellFormed(myLocal, myChain));

  EXPECT_THROW(compilePlan(myInv, myChain, {2, 1, 2}, ExecutionModel::LocalState,
                           directoryWith("app", 2)),
               ModelError);
  EXPECT_THROW(compilePlan(myInv, myChain, {2, 2, 2}, ExecutionModel::LocalState, {}),
               ModelError);
  EXPECT_THROW(compilePlan(myInv, myChain, {2, 2, 2}, ExecutionModel::RemoteState, {}),
               ModelError);

  const auto myProp = compilePlan(
      myInv, myChain, {1, 2, 1}, ExecutionModel::StatePropagation, directoryWith("app", 0));
  EXPECT_EQ((std::vector<uint64_t>{11000, 11000, 11000, 500}), myProp.transferBytes());
  EXPECT_EQ(Step(TransferStep{1, 0, 500}), myProp.theSteps.back());
}

TEST(TestModels, test_on_completion) {
  const auto     myChain = test::makeChain("app", 1, 1000, 1000, 10000);
  StateDirectory myDir   = directoryWith("app", 0);

  onCompletion(myChain, {5}, ExecutionModel::StatePropagation, myDir);
  EXPECT_EQ(5u, myDir.holder("app"));

  // the next plan still starts from the client; only the holder moves
  const auto myPlan = compilePlan(
      test::invocationOf(myChain, 1), myChain, {6}, ExecutionModel::StatePropagation, myDir);
  EXPECT_EQ(Step(TransferStep{0, 6, 11000}), myPlan.theSteps.front());
  EXPECT_EQ(5u, myDir.holder("app"));
  onCompletion(myChain, {6}, ExecutionModel::StatePropagation, myDir);
  EXPECT_EQ(6u, myDir.holder("app"));

  for (const auto myModel : {ExecutionModel::ClientState,
                             ExecutionModel::RemoteState,
                             ExecutionModel::LocalState}) {
    auto myOther = directoryWith("app", 2);
    onCompletion(myChain, {1}, myModel, myOther);
    EXPECT_EQ(directoryWith("app", 2), myOther);
  }
}

TEST(TestModels, test_assign_executors) {
  const auto myMesh = test::meshTopology(4);
  Scheduler  myScheduler(Policy::LeastLoaded, 1);

  const auto myChain = test::makeChain("app", 2, 1000, 1000, 10000);
  EXPECT_EQ((std::vector<NodeId>{4, 4}),
            assignExecutors(test::invocationOf(myChain), myChain, ExecutionModel::LocalState,
                            myMesh, myScheduler, directoryWith("app", 4), {}));

  const Topology mySingle({Node{0, 1e9, {Role::Client}},
                           Node{1, 1e9, {Role::StateStore}},
                           Node{2, 1e9, {Role::Executor}}},
                          {Link{0, 1, 1e6, 0}, Link{1, 2, 1e6, 0}});
  const auto myLong = test::makeChain("app", 4, 1000, 1000, 10000);
  EXPECT_EQ((std::vector<NodeId>{2, 2, 2, 2}),
            assignExecutors(test::invocationOf(myLong), myLong, ExecutionModel::ClientState,
                            mySingle, myScheduler, {}, {}));

  const Topology myPair({Node{0, 1e9, {Role::Client}},
                         Node{1, 1e9, {Role::StateStore}},
                         Node{2, 1e9, {Role::Executor}},
                         Node{3, 1e9, {Role::Executor}}},
                        {Link{0, 1, 1e6, 0}, Link{1, 2, 1e6, 0}, Link{1, 3, 1e6, 0}});
  const auto myOne = test::makeChain("app", 1, 1000, 1000, 10000);
  EXPECT_EQ((std::vector<NodeId>{3}),
            assignExecutors(test::invocationOf(myOne), myOne, ExecutionModel::RemoteState,
                            myPair, myScheduler, directoryWith("app", 1), {{2, 5}, {3, 0}}));

  // the load of earlier functions of the same chain counts
  EXPECT_EQ((std::vector<NodeId>{2, 3, 2, 3}),
            assignExecutors(test::invocationOf(myLong), myLong, ExecutionModel::RemoteState,
                            myPair, myScheduler, directoryWith("app", 1), {}));
}

TEST(TestModels, test_initial_directory) {
  const auto                   myLine = test::lineTopology();
  const std::vector<ChainSpec> myChains{test::makeChain("app", 1, 0, 0, 100),
                                        test::makeChain("stateless", 1, 0, 0, 0)};

  EXPECT_TRUE(initialDirectory(ExecutionModel::ClientState, myChains, myLine, {})
                  .entries()
                  .empty());
  const auto myRemote = initialDirectory(ExecutionModel::RemoteState, myChains, myLine, {});
  EXPECT_EQ(2u, myRemote.holder("app"));
  EXPECT_FALSE(myRemote.holder("stateless").has_value());
  EXPECT_EQ(1u, initialDirectory(ExecutionModel::LocalState, myChains, myLine, {}).holder("app"));
  EXPECT_EQ(0u,
            initialDirectory(ExecutionModel::StatePropagation, myChains, myLine, {}).holder("app"));
  EXPECT_EQ(2u, initialDirectory(ExecutionModel::LocalState, myChains, myLine, {{"app", 2}})
                    .holder("app"));

  EXPECT_THROW(initialDirectory(ExecutionModel::RemoteState, myChains, myLine, {{"app", 1}}),
               ModelError);
  EXPECT_THROW(initialDirectory(ExecutionModel::LocalState, myChains, myLine, {{"app", 0}}),
               ModelError);
}

TEST(TestModels, test_plan_properties) {
  const auto      myMesh = test::meshTopology(5);
  std::mt19937_64 myRng(2024);
  for (int myIter = 0; myIter < 500; myIter++) {
    const auto myLength = std::uniform_int_distribution<size_t>(1, 8)(myRng);
    const auto myA      = std::uniform_int_distribution<uint64_t>(0, 5000)(myRng);
    const auto myB      = std::uniform_int_distribution<uint64_t>(0, 5000)(myRng);
    const auto myState  = std::uniform_int_distribution<uint64_t>(1, 100000)(myRng);
    auto       myChain  = test::makeChain("app", myLength, myA, myB, myState);
    const auto myInv    = test::invocationOf(myChain);
    auto       myExecs  = randomExecutors(myRng, myLength, 4); // 5 is the store
    const auto myHolder = myExecs[0];

    // every model yields a well-formed plan
    for (const auto myModel : allModels()) {
      const auto myUsed = myModel == ExecutionModel::LocalState ?
                              std::vector<NodeId>(myLength, myHolder) :
                              myExecs;
      const auto myPlan = compilePlan(
          myInv, myChain, myUsed, myModel,
          directoryWith("app", myModel == ExecutionModel::RemoteState ? 5 : myHolder));
      ASSERT_TRUE(isWellFormed(myPlan, myChain)) << toString(myModel);
      const auto myBytes = myPlan.transferBytes();
      ASSERT_EQ(myPlan.totalPayloadBytes(),
                std::accumulate(myBytes.begin(), myBytes.end(), uint64_t{0}));
    }

    // remote minus client: 2ks - (k+1)s
    const auto myClient = compilePlan(myInv, myChain, myExecs, ExecutionModel::ClientState, {});
    const auto myRemote = compilePlan(
        myInv, myChain, myExecs, ExecutionModel::RemoteState, directoryWith("app", 5));
    const auto k = static_cast<int64_t>(myLength);
    const auto s = static_cast<int64_t>(myState);
    ASSERT_EQ(2 * k * s - (k + 1) * s,
              static_cast<int64_t>(myRemote.totalPayloadBytes()) -
                  static_cast<int64_t>(myClient.totalPayloadBytes()));

    // without state every model compiles to the same transfers
    myChain.theStateBytes = 0;
    const auto myReference =
        compilePlan(myInv, myChain, myExecs, ExecutionModel::ClientState, {});
    for (const auto myModel : allModels()) {
      const auto myPlan = compilePlan(myInv, myChain, myExecs, myModel, {});
      ASSERT_EQ(myReference.theSteps, myPlan.theSteps) << toString(myModel);
    }
  }
}

TEST(TestModels, test_propagation_affine_in_length) {
  const uint64_t a = 1000, b = 700, s = 10000;
  std::vector<uint64_t> myTotals;
  for (size_t k = 1; k <= 10; k++) {
    const auto          myChain = test::makeChain("app", k, a, b, s);
    std::vector<NodeId> myExecs;
    for (size_t i = 0; i < k; i++) {
      myExecs.emplace_back(1 + i % 2);
    }
    myTotals.emplace_back(compilePlan(test::invocationOf(myChain), myChain, myExecs,
                                      ExecutionModel::StatePropagation, directoryWith("app", 0))
                              .totalPayloadBytes());
  }
  for (size_t i = 0; i < myTotals.size(); i++) {
    EXPECT_EQ((i + 1) * (a + s) + b, myTotals[i]);
  }
}

TEST(TestModels, test_malformed_plans) {
  const auto myChain = test::makeChain("app", 2, 1, 1, 1);
  EXPECT_FALSE(isWellFormed(Plan{0, {TransferStep{0, 1, 1}, ComputeStep{2, 1}}}, myChain));
  EXPECT_FALSE(isWellFormed(Plan{0, {TransferStep{0, 1, 1}, ComputeStep{1, 1}}}, myChain));
  EXPECT_FALSE(isWellFormed(
      Plan{0, {TransferStep{0, 1, 1}, ComputeStep{1, 1}, ComputeStep{2, 1}}}, myChain));
  EXPECT_TRUE(isWellFormed(
      Plan{0, {TransferStep{0, 1, 1}, ComputeStep{1, 1}, ComputeStep{1, 1}}}, myChain));
}

TEST(TestModels, test_names) {
  for (const auto myModel : allModels()) {
    EXPECT_EQ(myModel, modelFromString(toString(myModel)));
  }
  EXPECT_THROW(modelFromString("cloud_state"), std::invalid_argument);
}

} // namespace edgesim
