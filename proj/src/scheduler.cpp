#include "edgesim/scheduler.h"

#include <cassert>
#include <stdexcept>

namespace edgesim {

std::string toString(const Policy aPolicy) {
  switch (aPolicy) {
    case Policy::Random:
      return "random";
    case Policy::RoundRobin:
      return "round_robin";
    case Policy::LeastLoaded:
      return "least_loaded";
    case Policy::Closest:
      return "closest";
  }
  return "unknown";
}

Policy policyFromString(const std::string& aName) {
  for (const auto myPolicy : {Policy::Random,
                              Policy::RoundRobin,
                              Policy::LeastLoaded,
                              Policy::Closest}) {
    if (toString(myPolicy) == aName) {
      return myPolicy;
    }
  }
  throw std::invalid_argument("invalid scheduler kind: " + aName);
}

Scheduler::Scheduler(const Policy aPolicy, const uint64_t aSeed)
    : thePolicy(aPolicy)
    , theRng(combineKeys(aSeed, 0x7363686564ULL)) {
}

NodeId Scheduler::choose(std::span<const NodeId> aCandidates,
                         const SchedulingContext& aContext) {
  assert(not aCandidates.empty());

  switch (thePolicy) {
    case Policy::Random:
      return aCandidates[theRng.below(aCandidates.size())];

    case Policy::RoundRobin: {
      auto& myCursor = theCursors[aContext.theChain];
      const auto ret = aCandidates[myCursor % aCandidates.size()];
      myCursor       = (myCursor + 1) % aCandidates.size();
      return ret;
    }

    case Policy::LeastLoaded: {
      const auto myLoad = [&aContext](const NodeId aNode) {
        const auto it = aContext.theLoad.find(aNode);
        return it == aContext.theLoad.end() ? 0.0 : it->second;
      };
      auto ret = aCandidates[0];
      for (const auto myCandidate : aCandidates) {
        if (myLoad(myCandidate) < myLoad(ret)) {
          ret = myCandidate;
        }
      }
      return ret;
    }

    case Policy::Closest: {
      const auto& myTopo    = aContext.theTopology;
      const auto  myLatency = [&](const NodeId aNode) {
        return myTopo.pathLatency(myTopo.shortestPath(aContext.theClient, aNode));
      };
      auto ret = aCandidates[0];
      for (const auto myCandidate : aCandidates) {
        if (myLatency(myCandidate) < myLatency(ret)) {
          ret = myCandidate;
        }
      }
      return ret;
    }
  }
  assert(false);
  return aCandidates[0];
}

} // namespace edgesim
