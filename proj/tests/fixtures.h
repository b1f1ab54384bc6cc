#pragma once

#include "edgesim/models.h"
#include "edgesim/topology.h"
#include "edgesim/workload.h"

#include <string>
#include <vector>

namespace edgesim::test {

// 0 (client) -- 1 (executor) -- 2 (executor, state_store)
inline Topology lineTopology(const double aCapacity = 1e6, const double aLatency = 1e-3) {
  return Topology({Node{0, 1e9, {Role::Client}},
                   Node{1, 1e9, {Role::Executor}},
                   Node{2, 1e9, {Role::Executor, Role::StateStore}}},
                  {Link{0, 1, aCapacity, aLatency}, Link{1, 2, aCapacity, aLatency}});
}

// client 0 and executors 1..aExecutors all pairwise joined; the last node
// is also the state store
inline Topology meshTopology(const size_t aExecutors,
                             const double aCapacity = 1e7,
                             const double aLatency  = 1e-3) {
  std::vector<Node> myNodes{Node{0, 1e9, {Role::Client}}};
  for (size_t i = 1; i <= aExecutors; i++) {
    myNodes.emplace_back(Node{static_cast<NodeId>(i), 1e9, {Role::Executor}});
  }
  myNodes.back().theRoles.insert(Role::StateStore);
  std::vector<Link> myLinks;
  for (NodeId i = 0; i <= aExecutors; i++) {
    for (NodeId j = i + 1; j <= aExecutors; j++) {
      myLinks.emplace_back(Link{i, j, aCapacity, aLatency});
    }
  }
  return Topology(std::move(myNodes), std::move(myLinks));
}

inline ChainSpec makeChain(const std::string& aId,
                           const size_t       aLength,
                           const uint64_t     aInput,
                           const uint64_t     aOutput,
                           const uint64_t     aState,
                           const NodeId       aClient = 0,
                           const double       aDemand = 1e7,
                           const double       aRate   = 10,
                           const double       aStop   = 10,
                           const ArrivalProcess::Kind aKind = ArrivalProcess::Kind::Poisson) {
  ChainSpec ret{aId, {}, aState, aClient, ArrivalProcess{aKind, aRate, 0, aStop}};
  for (size_t i = 0; i < aLength; i++) {
    ret.theFunctions.emplace_back(
        FunctionSpec{"f" + std::to_string(i + 1), aDemand, aInput, aOutput});
  }
  return ret;
}

inline Invocation invocationOf(const ChainSpec& aChain,
                               const uint64_t   aId    = 0,
                               const size_t     aIndex = 0) {
  Invocation ret{aId, aIndex, 0, 0.0, {}};
  for (const auto& myFunction : aChain.theFunctions) {
    ret.theDemands.emplace_back(myFunction.theDemand);
  }
  return ret;
}

} // namespace edgesim::test
