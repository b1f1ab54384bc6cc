#pragma once

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the routing, percentile or queueing code it checks.

#include "edgesim/topology.h"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace edgesim::oracle {

//! Minimum latency over every simple path, each folded from the source.
inline double bruteForceLatency(const Topology& aTopology,
                                const NodeId    aSrc,
                                const NodeId    aDst) {
  double              myBest = std::numeric_limits<double>::infinity();
  std::vector<NodeId> myStack{aSrc};

  const auto myVisit = [&](auto&& aSelf, const double aSoFar) -> void {
    const auto myHere = myStack.back();
    if (myHere == aDst) {
      myBest = std::min(myBest, aSoFar);
      return;
    }
    for (const auto& myLink : aTopology.links()) {
      NodeId myNext;
      if (myLink.theA == myHere) {
        myNext = myLink.theB;
      } else if (myLink.theB == myHere) {
        myNext = myLink.theA;
      } else {
        continue;
      }
      if (std::find(myStack.begin(), myStack.end(), myNext) != myStack.end()) {
        continue;
      }
      myStack.push_back(myNext);
      aSelf(aSelf, aSoFar + myLink.theLatency);
      myStack.pop_back();
    }
  };
  myVisit(myVisit, 0.0);
  return myBest;
}

/**
 * Random connected graph: a random spanning tree plus each remaining pair
 * joined with probability aExtra. Latencies are drawn by aLatency.
 */
template <class LatencyGen>
Topology randomTopology(std::mt19937_64& aRng,
                        const size_t     aNodes,
                        const double     aExtra,
                        LatencyGen&&     aLatency) {
  std::vector<Node> myNodes;
  for (size_t i = 0; i < aNodes; i++) {
    myNodes.emplace_back(Node{static_cast<NodeId>(i),
                              1e9,
                              {Role::Client, Role::Executor, Role::StateStore}});
  }
  std::vector<Link>                myLinks;
  std::vector<std::vector<bool>>   myJoined(aNodes, std::vector<bool>(aNodes, false));
  std::uniform_real_distribution<> myUnit(0, 1);
  std::uniform_real_distribution<> myCapacity(1e5, 1e8);
  for (size_t i = 1; i < aNodes; i++) {
    const auto myParent = std::uniform_int_distribution<size_t>(0, i - 1)(aRng);
    myLinks.emplace_back(Link{static_cast<NodeId>(myParent),
                              static_cast<NodeId>(i),
                              myCapacity(aRng),
                              aLatency(aRng)});
    myJoined[myParent][i] = myJoined[i][myParent] = true;
  }
  for (size_t i = 0; i < aNodes; i++) {
    for (size_t j = i + 1; j < aNodes; j++) {
      if (not myJoined[i][j] and myUnit(aRng) < aExtra) {
        myLinks.emplace_back(Link{static_cast<NodeId>(i),
                                  static_cast<NodeId>(j),
                                  myCapacity(aRng),
                                  aLatency(aRng)});
      }
    }
  }
  return Topology(std::move(myNodes), std::move(myLinks));
}

/**
 * Nearest-rank percentile by counting: the smallest sample value x such that
 * at least aPercent% of the samples are <= x. Unsorted input is fine.
 */
inline double percentileByCounting(const std::vector<double>& aValues,
                                   const unsigned             aPercent) {
  const uint64_t n   = aValues.size();
  double         ret = std::numeric_limits<double>::infinity();
  for (const auto myCandidate : aValues) {
    uint64_t myBelow = 0;
    for (const auto myOther : aValues) {
      myBelow += myOther <= myCandidate ? 1 : 0;
    }
    if (100 * myBelow >= aPercent * n) {
      ret = std::min(ret, myCandidate);
    }
  }
  return ret;
}

//! Mean sojourn time of an M/M/1 queue.
inline double mm1Sojourn(const double aArrivalRate, const double aServiceRate) {
  return 1.0 / (aServiceRate - aArrivalRate);
}

} // namespace edgesim::oracle
