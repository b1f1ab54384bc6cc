#pragma once

#include "edgesim/rng.h"
#include "edgesim/topology.h"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace edgesim {

class WorkloadError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DemandDistribution { Fixed, Exponential };

struct FunctionSpec {
  std::string        theId;
  double             theDemand;      // operations, mean if exponential
  uint64_t           theInputBytes;  // a_f
  uint64_t           theOutputBytes; // b_f
  DemandDistribution theDistribution = DemandDistribution::Fixed;
};

struct ArrivalProcess {
  enum class Kind { Poisson, Deterministic };

  Kind   theKind;
  double theRate; // invocations per second
  double theStart;
  double theStop;
};

struct ChainSpec {
  std::string               theId;
  std::vector<FunctionSpec> theFunctions;
  uint64_t                  theStateBytes;
  NodeId                    theClient;
  ArrivalProcess            theArrival;
};

//! Throws WorkloadError if the chain violates its invariants.
void validate(const ChainSpec& aChain, const Topology& aTopology);

struct Invocation {
  uint64_t theId;
  //! Index into the chain list the stream was generated from.
  size_t   theChain;
  uint64_t theSequence; // per-chain
  double   theArrivalTime;
  //! Sampled demand of each function, in chain order.
  std::vector<double> theDemands;
};

double nextInterarrival(const ArrivalProcess& aProcess, CounterRng& aRng);

//! Random substream of a chain: independent of every other chain's.
CounterRng chainStream(const uint64_t aSeed, const std::string& aChainId);

//! Random substream used to sample the chain's function demands.
CounterRng demandStream(const uint64_t aSeed, const std::string& aChainId);

/**
 * Merged arrival stream of all chains, sorted by (arrival time, chain id,
 * per-chain sequence number), with ids assigned in that order starting at 0.
 *
 * The first arrival of a chain is at start + one interarrival time; arrivals
 * at or after stop are discarded.
 */
std::vector<Invocation> generateInvocations(const std::vector<ChainSpec>& aChains,
                                            const uint64_t aSeed);

std::vector<ChainSpec> parseChains(const nlohmann::json& aWorkload);
nlohmann::json         toJson(const ChainSpec& aChain);

std::string toString(const ArrivalProcess::Kind aKind);

} // namespace edgesim
