#pragma once

#include "edgesim/rng.h"
#include "edgesim/topology.h"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace edgesim {

enum class Policy { Random, RoundRobin, LeastLoaded, Closest };

std::string toString(const Policy aPolicy);
Policy      policyFromString(const std::string& aName);

//! Not-yet-completed Compute operations assigned to each node.
using LoadSnapshot = std::map<NodeId, double>;

struct SchedulingContext {
  const Topology&     theTopology;
  NodeId              theClient;
  size_t              theChain; // round-robin cursors are kept per chain
  const LoadSnapshot& theLoad;
};

/**
 * Executor selection for models that leave placement free.
 *
 * random: uniform draw from the stream; round_robin: cycles the candidates in
 * id order, one cursor per chain; least_loaded: minimum pending operations;
 * closest: minimum route latency from the client. Ties go to the lowest id.
 * Only random consumes random draws.
 */
class Scheduler {
 public:
  Scheduler(const Policy aPolicy, const uint64_t aSeed);

  Policy policy() const noexcept {
    return thePolicy;
  }

  //! aCandidates must be non-empty and sorted by id.
  NodeId choose(std::span<const NodeId> aCandidates,
                const SchedulingContext& aContext);

  const CounterRng& rng() const noexcept {
    return theRng;
  }

 private:
  Policy                   thePolicy;
  CounterRng               theRng;
  std::map<size_t, size_t> theCursors;
};

} // namespace edgesim
