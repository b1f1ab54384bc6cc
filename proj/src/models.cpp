#include "edgesim/models.h"

#include <cassert>
#include <limits>

namespace edgesim {

std::string toString(const ExecutionModel aModel) {
  switch (aModel) {
    case ExecutionModel::ClientState:
      return "client_state";
    case ExecutionModel::RemoteState:
      return "remote_state";
    case ExecutionModel::LocalState:
      return "local_state";
    case ExecutionModel::StatePropagation:
      return "state_propagation";
  }
  return "unknown";
}

const std::vector<ExecutionModel>& allModels() {
  static const std::vector<ExecutionModel> myModels{
      ExecutionModel::ClientState,
      ExecutionModel::RemoteState,
      ExecutionModel::LocalState,
      ExecutionModel::StatePropagation};
  return myModels;
}

ExecutionModel modelFromString(const std::string& aName) {
  for (const auto myModel : allModels()) {
    if (toString(myModel) == aName) {
      return myModel;
    }
  }
  throw std::invalid_argument("invalid execution model: " + aName);
}

std::optional<NodeId> StateDirectory::holder(const std::string& aChain) const {
  const auto it = theHolders.find(aChain);
  if (it == theHolders.end()) {
    return std::nullopt;
  }
  return it->second;
}

void StateDirectory::setHolder(const std::string& aChain, const NodeId aNode) {
  theHolders[aChain] = aNode;
}

StateDirectory initialDirectory(const ExecutionModel                 aModel,
                                const std::vector<ChainSpec>&        aChains,
                                const Topology&                      aTopology,
                                const std::map<std::string, NodeId>& aConfigured) {
  StateDirectory ret;
  if (aModel == ExecutionModel::ClientState) {
    return ret;
  }
  for (const auto& myChain : aChains) {
    if (myChain.theStateBytes == 0) {
      continue;
    }
    if (const auto it = aConfigured.find(myChain.theId); it != aConfigured.end()) {
      ret.setHolder(myChain.theId, it->second);
      continue;
    }
    switch (aModel) {
      case ExecutionModel::RemoteState: {
        const auto myStores = aTopology.nodesWithRole(Role::StateStore);
        if (myStores.empty()) {
          throw ModelError(ModelError::Code::InconsistentDirectory,
                           "remote_state requires a node with role state_store");
        }
        ret.setHolder(myChain.theId, myStores.front());
        break;
      }
      case ExecutionModel::LocalState: {
        auto   myBest    = std::numeric_limits<double>::infinity();
        NodeId myClosest = 0;
        for (const auto myExecutor : aTopology.nodesWithRole(Role::Executor)) {
          const auto myLatency = aTopology.pathLatency(
              aTopology.shortestPath(myChain.theClient, myExecutor));
          if (myLatency < myBest) {
            myBest    = myLatency;
            myClosest = myExecutor;
          }
        }
        ret.setHolder(myChain.theId, myClosest);
        break;
      }
      case ExecutionModel::StatePropagation:
        ret.setHolder(myChain.theId, myChain.theClient);
        break;
      case ExecutionModel::ClientState:
        break;
    }
  }
  checkDirectory(aModel, aChains, aTopology, ret);
  return ret;
}

void checkDirectory(const ExecutionModel          aModel,
                    const std::vector<ChainSpec>& aChains,
                    const Topology&               aTopology,
                    const StateDirectory&         aDirectory) {
  if (aModel == ExecutionModel::ClientState) {
    return;
  }
  for (const auto& myChain : aChains) {
    if (myChain.theStateBytes == 0) {
      continue;
    }
    const auto myHolder = aDirectory.holder(myChain.theId);
    if (not myHolder.has_value() or not aTopology.hasNode(*myHolder)) {
      throw ModelError(ModelError::Code::InconsistentDirectory,
                       "chain '" + myChain.theId + "' has no valid state holder");
    }
    const auto& myNode = aTopology.node(*myHolder);
    if (aModel == ExecutionModel::RemoteState and
        not myNode.hasRole(Role::StateStore)) {
      throw ModelError(ModelError::Code::InconsistentDirectory,
                       "remote_state holder " + std::to_string(*myHolder) +
                           " of chain '" + myChain.theId +
                           "' is not a state_store");
    }
    if (aModel == ExecutionModel::LocalState and
        not myNode.hasRole(Role::Executor)) {
      throw ModelError(ModelError::Code::InconsistentDirectory,
                       "local_state holder " + std::to_string(*myHolder) +
                           " of chain '" + myChain.theId +
                           "' is not an executor");
    }
  }
}

uint64_t Plan::totalPayloadBytes() const {
  uint64_t ret = 0;
  for (const auto& myStep : theSteps) {
    if (const auto* myTransfer = std::get_if<TransferStep>(&myStep)) {
      ret += myTransfer->theBytes;
    }
  }
  return ret;
}

uint64_t Plan::byteHops(const Topology& aTopology) const {
  uint64_t ret = 0;
  for (const auto& myStep : theSteps) {
    if (const auto* myTransfer = std::get_if<TransferStep>(&myStep)) {
      ret += myTransfer->theBytes *
             aTopology.shortestPath(myTransfer->theSrc, myTransfer->theDst)
                 .hopCount();
    }
  }
  return ret;
}

std::vector<uint64_t> Plan::transferBytes() const {
  std::vector<uint64_t> ret;
  for (const auto& myStep : theSteps) {
    if (const auto* myTransfer = std::get_if<TransferStep>(&myStep)) {
      ret.emplace_back(myTransfer->theBytes);
    }
  }
  return ret;
}

bool isWellFormed(const Plan& aPlan, const ChainSpec& aChain) {
  size_t myComputes = 0;
  for (size_t i = 0; i < aPlan.theSteps.size(); i++) {
    const auto* myCompute = std::get_if<ComputeStep>(&aPlan.theSteps[i]);
    if (myCompute == nullptr) {
      continue;
    }
    if (myComputes >= aChain.theFunctions.size() or
        not(myCompute->theOperations > 0)) {
      return false;
    }
    myComputes++;
    if (i == 0) {
      if (myCompute->theNode != aChain.theClient) {
        return false;
      }
      continue;
    }
    const auto& myPrev = aPlan.theSteps[i - 1];
    if (const auto* myTransfer = std::get_if<TransferStep>(&myPrev)) {
      if (myTransfer->theDst != myCompute->theNode) {
        return false;
      }
    } else if (std::get<ComputeStep>(myPrev).theNode != myCompute->theNode) {
      return false;
    }
  }
  return myComputes == aChain.theFunctions.size();
}

std::vector<NodeId> assignExecutors(const Invocation&     aInvocation,
                                    const ChainSpec&      aChain,
                                    const ExecutionModel  aModel,
                                    const Topology&       aTopology,
                                    Scheduler&            aScheduler,
                                    const StateDirectory& aDirectory,
                                    const LoadSnapshot&   aLoad) {
  const auto K = aChain.theFunctions.size();

  if (aModel == ExecutionModel::LocalState and aChain.theStateBytes > 0) {
    const auto myHolder = aDirectory.holder(aChain.theId);
    if (not myHolder.has_value()) {
      throw ModelError(ModelError::Code::InconsistentDirectory,
                       "chain '" + aChain.theId + "' has no state holder");
    }
    return std::vector<NodeId>(K, *myHolder);
  }

  const auto myCandidates = aTopology.nodesWithRole(Role::Executor);
  if (myCandidates.empty()) {
    throw ModelError(ModelError::Code::NoExecutorAvailable,
                     "no executor available for chain '" + aChain.theId + "'");
  }

  auto                myLoad = aLoad;
  std::vector<NodeId> ret;
  ret.reserve(K);
  for (size_t i = 0; i < K; i++) {
    const auto myChosen = aScheduler.choose(
        myCandidates,
        SchedulingContext{aTopology, aChain.theClient, aInvocation.theChain, myLoad});
    myLoad[myChosen] += aInvocation.theDemands.at(i);
    ret.emplace_back(myChosen);
  }
  return ret;
}

Plan compilePlan(const Invocation&          aInvocation,
                 const ChainSpec&           aChain,
                 const std::vector<NodeId>& aExecutors,
                 const ExecutionModel       aModel,
                 const StateDirectory&      aDirectory) {
  const auto& myFunctions = aChain.theFunctions;
  const auto  K           = myFunctions.size();
  const auto  s           = aChain.theStateBytes;
  const auto  c           = aChain.theClient;
  assert(aExecutors.size() == K);
  assert(aInvocation.theDemands.size() == K);

  Plan ret{aInvocation.theId, {}};
  auto& mySteps = ret.theSteps;

  // the message pattern shared by client_state and state_propagation, and by
  // every model when there is no state: c -> e_1 -> ... -> e_k -> c
  const auto myChain = [&](const uint64_t aCarried, const uint64_t aReturned) {
    for (size_t i = 0; i < K; i++) {
      const auto mySrc = i == 0 ? c : aExecutors[i - 1];
      mySteps.emplace_back(
          TransferStep{mySrc, aExecutors[i], myFunctions[i].theInputBytes + aCarried});
      mySteps.emplace_back(ComputeStep{aExecutors[i], aInvocation.theDemands[i]});
    }
    mySteps.emplace_back(
        TransferStep{aExecutors[K - 1], c, myFunctions[K - 1].theOutputBytes + aReturned});
  };

  if (s == 0) {
    myChain(0, 0);
    return ret;
  }

  const auto myHolder = [&]() {
    const auto myHolder = aDirectory.holder(aChain.theId);
    if (not myHolder.has_value()) {
      throw ModelError(ModelError::Code::InconsistentDirectory,
                       "chain '" + aChain.theId + "' has no state holder");
    }
    return *myHolder;
  };

  switch (aModel) {
    case ExecutionModel::ClientState:
      myChain(s, s);
      break;

    case ExecutionModel::StatePropagation:
      myChain(s, 0);
      break;

    case ExecutionModel::RemoteState: {
      const auto r = myHolder();
      mySteps.emplace_back(TransferStep{c, aExecutors[0], myFunctions[0].theInputBytes});
      for (size_t i = 0; i < K; i++) {
        mySteps.emplace_back(TransferStep{r, aExecutors[i], s});
        mySteps.emplace_back(ComputeStep{aExecutors[i], aInvocation.theDemands[i]});
        mySteps.emplace_back(TransferStep{aExecutors[i], r, s});
        if (i + 1 < K) {
          mySteps.emplace_back(TransferStep{
              aExecutors[i], aExecutors[i + 1], myFunctions[i + 1].theInputBytes});
        }
      }
      mySteps.emplace_back(
          TransferStep{aExecutors[K - 1], c, myFunctions[K - 1].theOutputBytes});
      break;
    }

    case ExecutionModel::LocalState: {
      const auto r = myHolder();
      for (const auto myExecutor : aExecutors) {
        if (myExecutor != r) {
          throw ModelError(ModelError::Code::InconsistentDirectory,
                           "local_state executor " + std::to_string(myExecutor) +
                               " differs from holder " + std::to_string(r) +
                               " of chain '" + aChain.theId + "'");
        }
      }
      mySteps.emplace_back(TransferStep{c, r, myFunctions[0].theInputBytes});
      for (size_t i = 0; i < K; i++) {
        mySteps.emplace_back(ComputeStep{r, aInvocation.theDemands[i]});
      }
      mySteps.emplace_back(TransferStep{r, c, myFunctions[K - 1].theOutputBytes});
      break;
    }
  }
  return ret;
}

void onCompletion(const ChainSpec&           aChain,
                  const std::vector<NodeId>& aExecutors,
                  const ExecutionModel       aModel,
                  StateDirectory&            aDirectory) {
  if (aModel == ExecutionModel::StatePropagation and aChain.theStateBytes > 0 and
      not aExecutors.empty()) {
    aDirectory.setHolder(aChain.theId, aExecutors.back());
  }
}

} // namespace edgesim
