#include "edgesim/workload.h"

#include <algorithm>
#include <tuple>

namespace edgesim {

namespace {

constexpr uint64_t theArrivalSalt = 0x61727269766c73ULL; // "arrivls"
constexpr uint64_t theDemandSalt  = 0x64656d616e6473ULL; // "demands"

uint64_t nonNegativeBytes(const nlohmann::json& aObject, const char* aKey) {
  if (not aObject.contains(aKey)) {
    return 0;
  }
  const auto& myValue = aObject.at(aKey);
  if (not myValue.is_number() or myValue.get<double>() < 0) {
    throw WorkloadError(std::string("'") + aKey +
                        "' must be a non-negative number");
  }
  return myValue.get<uint64_t>();
}

} // namespace

std::string toString(const ArrivalProcess::Kind aKind) {
  return aKind == ArrivalProcess::Kind::Poisson ? "poisson" : "deterministic";
}

void validate(const ChainSpec& aChain, const Topology& aTopology) {
  const auto myPrefix = "chain '" + aChain.theId + "': ";
  if (aChain.theFunctions.empty()) {
    throw WorkloadError(myPrefix + "no functions");
  }
  for (const auto& myFunction : aChain.theFunctions) {
    if (not(myFunction.theDemand > 0)) {
      throw WorkloadError(myPrefix + "function '" + myFunction.theId +
                          "' has non-positive demand");
    }
  }
  if (not aTopology.hasNode(aChain.theClient) or
      not aTopology.node(aChain.theClient).hasRole(Role::Client)) {
    throw WorkloadError(myPrefix + "client " + std::to_string(aChain.theClient) +
                        " is not a node with role client");
  }
  const auto& myArrival = aChain.theArrival;
  if (not(myArrival.theRate > 0)) {
    throw WorkloadError(myPrefix + "arrival rate must be positive");
  }
  if (not(myArrival.theStart < myArrival.theStop)) {
    throw WorkloadError(myPrefix + "arrival start must precede stop");
  }
}

double nextInterarrival(const ArrivalProcess& aProcess, CounterRng& aRng) {
  if (aProcess.theKind == ArrivalProcess::Kind::Deterministic) {
    return 1.0 / aProcess.theRate;
  }
  return aRng.exponential(1.0 / aProcess.theRate);
}

CounterRng chainStream(const uint64_t aSeed, const std::string& aChainId) {
  return CounterRng(
      combineKeys(combineKeys(aSeed, stableHash(aChainId)), theArrivalSalt));
}

CounterRng demandStream(const uint64_t aSeed, const std::string& aChainId) {
  return CounterRng(
      combineKeys(combineKeys(aSeed, stableHash(aChainId)), theDemandSalt));
}

std::vector<Invocation> generateInvocations(const std::vector<ChainSpec>& aChains,
                                            const uint64_t aSeed) {
  std::vector<Invocation> ret;
  for (size_t c = 0; c < aChains.size(); c++) {
    const auto& myChain   = aChains[c];
    auto        myArrival = chainStream(aSeed, myChain.theId);
    auto        myDemand  = demandStream(aSeed, myChain.theId);
    double      myTime    = myChain.theArrival.theStart;
    for (uint64_t mySeq = 0;; mySeq++) {
      myTime += nextInterarrival(myChain.theArrival, myArrival);
      if (myTime >= myChain.theArrival.theStop) {
        break;
      }
      Invocation myNew{0, c, mySeq, myTime, {}};
      myNew.theDemands.reserve(myChain.theFunctions.size());
      for (const auto& myFunction : myChain.theFunctions) {
        myNew.theDemands.emplace_back(
            myFunction.theDistribution == DemandDistribution::Exponential ?
                myDemand.exponential(myFunction.theDemand) :
                myFunction.theDemand);
      }
      ret.emplace_back(std::move(myNew));
    }
  }

  std::stable_sort(
      ret.begin(), ret.end(), [&aChains](const auto& aLhs, const auto& aRhs) {
        return std::tie(aLhs.theArrivalTime,
                        aChains[aLhs.theChain].theId,
                        aLhs.theSequence) < std::tie(aRhs.theArrivalTime,
                                                     aChains[aRhs.theChain].theId,
                                                     aRhs.theSequence);
      });
  for (size_t i = 0; i < ret.size(); i++) {
    ret[i].theId = i;
  }
  return ret;
}

std::vector<ChainSpec> parseChains(const nlohmann::json& aWorkload) {
  std::vector<ChainSpec> ret;
  for (const auto& myChain : aWorkload.at("chains")) {
    ChainSpec myNew;
    myNew.theId         = myChain.at("id").get<std::string>();
    myNew.theClient     = myChain.at("client").get<NodeId>();
    myNew.theStateBytes = nonNegativeBytes(myChain, "state_bytes");
    for (const auto& myFunction : myChain.at("functions")) {
      FunctionSpec myFun{myFunction.at("id").get<std::string>(),
                         myFunction.at("demand").get<double>(),
                         nonNegativeBytes(myFunction, "input_bytes"),
                         nonNegativeBytes(myFunction, "output_bytes")};
      const auto myDist = myFunction.value("demand_distribution", "fixed");
      if (myDist == "exponential") {
        myFun.theDistribution = DemandDistribution::Exponential;
      } else if (myDist != "fixed") {
        throw WorkloadError("invalid demand_distribution: " + myDist);
      }
      myNew.theFunctions.emplace_back(std::move(myFun));
    }
    const auto& myArrival = myChain.at("arrival");
    const auto  myKind    = myArrival.at("kind").get<std::string>();
    if (myKind == "poisson") {
      myNew.theArrival.theKind = ArrivalProcess::Kind::Poisson;
    } else if (myKind == "deterministic") {
      myNew.theArrival.theKind = ArrivalProcess::Kind::Deterministic;
    } else {
      throw WorkloadError("invalid arrival kind: " + myKind);
    }
    myNew.theArrival.theRate  = myArrival.at("rate").get<double>();
    myNew.theArrival.theStart = myArrival.value("start", 0.0);
    myNew.theArrival.theStop  = myArrival.at("stop").get<double>();
    ret.emplace_back(std::move(myNew));
  }
  return ret;
}

nlohmann::json toJson(const ChainSpec& aChain) {
  auto myFunctions = nlohmann::json::array();
  for (const auto& myFunction : aChain.theFunctions) {
    myFunctions.push_back(
        {{"id", myFunction.theId},
         {"demand", myFunction.theDemand},
         {"input_bytes", myFunction.theInputBytes},
         {"output_bytes", myFunction.theOutputBytes},
         {"demand_distribution",
          myFunction.theDistribution == DemandDistribution::Exponential ?
              "exponential" :
              "fixed"}});
  }
  return {{"id", aChain.theId},
          {"client", aChain.theClient},
          {"state_bytes", aChain.theStateBytes},
          {"functions", myFunctions},
          {"arrival",
           {{"kind", toString(aChain.theArrival.theKind)},
            {"rate", aChain.theArrival.theRate},
            {"start", aChain.theArrival.theStart},
            {"stop", aChain.theArrival.theStop}}}};
}

} // namespace edgesim
