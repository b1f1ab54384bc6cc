#include "edgesim/topology.h"

#include <algorithm>
#include <cassert>
#include <deque>
#include <limits>

namespace edgesim {

std::string toString(const Role aRole) {
  switch (aRole) {
    case Role::Client:
      return "client";
    case Role::Executor:
      return "executor";
    case Role::StateStore:
      return "state_store";
  }
  return "unknown";
}

Role roleFromString(const std::string& aName) {
  if (aName == "client") {
    return Role::Client;
  } else if (aName == "executor") {
    return Role::Executor;
  } else if (aName == "state_store") {
    return Role::StateStore;
  }
  throw std::invalid_argument("invalid node role: " + aName);
}

Topology::Topology(std::vector<Node> aNodes, std::vector<Link> aLinks)
    : theNodes(std::move(aNodes))
    , theLinks(std::move(aLinks)) {
  using C = TopologyError::Code;

  if (theNodes.empty()) {
    throw TopologyError(C::MissingRole, "topology has no nodes");
  }

  for (size_t i = 0; i < theNodes.size(); i++) {
    const auto& myNode = theNodes[i];
    if (not theSlots.emplace(myNode.theId, i).second) {
      throw TopologyError(C::DuplicateNodeId,
                          "duplicate node id " + std::to_string(myNode.theId));
    }
    if (not(myNode.theSpeed > 0)) {
      throw TopologyError(C::NonPositiveCapacityOrSpeed,
                          "node " + std::to_string(myNode.theId) +
                              " has non-positive speed");
    }
    if (myNode.theRoles.empty()) {
      throw TopologyError(C::MissingRole,
                          "node " + std::to_string(myNode.theId) +
                              " has no roles");
    }
  }

  for (size_t i = 0; i < theLinks.size(); i++) {
    const auto& myLink = theLinks[i];
    for (const auto myEnd : {myLink.theA, myLink.theB}) {
      if (theSlots.count(myEnd) == 0) {
        throw TopologyError(C::DanglingLinkEndpoint,
                            "link " + std::to_string(i) +
                                " references unknown node " +
                                std::to_string(myEnd));
      }
    }
    if (myLink.theA == myLink.theB) {
      throw TopologyError(C::InvalidLink,
                          "link " + std::to_string(i) + " is a self-loop");
    }
    if (not(myLink.theCapacity > 0)) {
      throw TopologyError(C::NonPositiveCapacityOrSpeed,
                          "link " + std::to_string(i) +
                              " has non-positive capacity");
    }
    if (not(myLink.theLatency >= 0)) {
      throw TopologyError(C::InvalidLink,
                          "link " + std::to_string(i) + " has negative latency");
    }
    const auto myKey = std::minmax(myLink.theA, myLink.theB);
    if (not theLinkIndex.emplace(myKey, i).second) {
      throw TopologyError(C::InvalidLink,
                          "more than one link between " +
                              std::to_string(myKey.first) + " and " +
                              std::to_string(myKey.second));
    }
  }

  if (nodesWithRole(Role::Client).empty()) {
    throw TopologyError(C::MissingRole, "no node with role client");
  }
  if (nodesWithRole(Role::Executor).empty()) {
    throw TopologyError(C::MissingRole, "no node with role executor");
  }

  // connectivity by BFS from the first node
  std::vector<bool>  myVisited(theNodes.size(), false);
  std::deque<size_t> myQueue{0};
  myVisited[0] = true;
  while (not myQueue.empty()) {
    const auto myCur = myQueue.front();
    myQueue.pop_front();
    for (const auto& myLink : theLinks) {
      size_t myNext;
      if (myLink.theA == theNodes[myCur].theId) {
        myNext = slot(myLink.theB);
      } else if (myLink.theB == theNodes[myCur].theId) {
        myNext = slot(myLink.theA);
      } else {
        continue;
      }
      if (not myVisited[myNext]) {
        myVisited[myNext] = true;
        myQueue.push_back(myNext);
      }
    }
  }
  if (std::find(myVisited.begin(), myVisited.end(), false) != myVisited.end()) {
    throw TopologyError(C::DisconnectedGraph, "topology is not connected");
  }

  computeRoutes();
}

bool Topology::hasNode(const NodeId aId) const {
  return theSlots.count(aId) > 0;
}

size_t Topology::slot(const NodeId aId) const {
  const auto it = theSlots.find(aId);
  if (it == theSlots.end()) {
    throw TopologyError(TopologyError::Code::UnknownNode,
                        "unknown node " + std::to_string(aId));
  }
  return it->second;
}

const Node& Topology::node(const NodeId aId) const {
  return theNodes[slot(aId)];
}

std::vector<NodeId> Topology::nodesWithRole(const Role aRole) const {
  std::vector<NodeId> ret;
  for (const auto& myNode : theNodes) {
    if (myNode.hasRole(aRole)) {
      ret.emplace_back(myNode.theId);
    }
  }
  std::sort(ret.begin(), ret.end());
  return ret;
}

size_t Topology::linkIndex(const NodeId aA, const NodeId aB) const {
  const auto it = theLinkIndex.find(std::minmax(aA, aB));
  return it == theLinkIndex.end() ? NoLink : it->second;
}

const Path& Topology::shortestPath(const NodeId aSrc, const NodeId aDst) const {
  return theRoutes[slot(aSrc)][slot(aDst)];
}

double Topology::pathLatency(const Path& aPath) const {
  double ret = 0;
  for (size_t i = 1; i < aPath.theNodes.size(); i++) {
    const auto myLink = linkIndex(aPath.theNodes[i - 1], aPath.theNodes[i]);
    assert(myLink != NoLink);
    ret += theLinks[myLink].theLatency;
  }
  return ret;
}

double Topology::transferDelay(const Path& aPath, const uint64_t aBytes) const {
  double ret = 0;
  for (size_t i = 1; i < aPath.theNodes.size(); i++) {
    const auto& myLink =
        theLinks[linkIndex(aPath.theNodes[i - 1], aPath.theNodes[i])];
    ret += static_cast<double>(aBytes) / myLink.theCapacity + myLink.theLatency;
  }
  return ret;
}

// Dijkstra from every source over labels (latency, node sequence) ordered
// lexicographically. Two labels reaching the same node cannot be prefixes of
// one another (no repeated nodes), so extending both by the same link keeps
// their order and the label-setting argument still holds.
void Topology::computeRoutes() {
  const auto N = theNodes.size();

  // adjacency by slot, neighbors sorted by node id
  std::vector<std::vector<std::pair<size_t, double>>> myAdj(N);
  for (const auto& myLink : theLinks) {
    myAdj[slot(myLink.theA)].emplace_back(slot(myLink.theB), myLink.theLatency);
    myAdj[slot(myLink.theB)].emplace_back(slot(myLink.theA), myLink.theLatency);
  }

  struct Label {
    double              theLatency = std::numeric_limits<double>::infinity();
    std::vector<NodeId> theNodes;

    bool operator<(const Label& aOther) const {
      if (theLatency != aOther.theLatency) {
        return theLatency < aOther.theLatency;
      }
      return theNodes < aOther.theNodes;
    }
  };

  theRoutes.assign(N, std::vector<Path>(N));
  for (size_t mySrc = 0; mySrc < N; mySrc++) {
    std::vector<Label> myBest(N);
    std::vector<bool>  myDone(N, false);
    myBest[mySrc] = Label{0.0, {theNodes[mySrc].theId}};

    for (size_t myIter = 0; myIter < N; myIter++) {
      size_t myCur = N;
      for (size_t i = 0; i < N; i++) {
        if (not myDone[i] and not myBest[i].theNodes.empty() and
            (myCur == N or myBest[i] < myBest[myCur])) {
          myCur = i;
        }
      }
      if (myCur == N) {
        break;
      }
      myDone[myCur] = true;
      for (const auto& [myNext, myLatency] : myAdj[myCur]) {
        if (myDone[myNext]) {
          continue;
        }
        Label myCandidate{myBest[myCur].theLatency + myLatency,
                          myBest[myCur].theNodes};
        myCandidate.theNodes.emplace_back(theNodes[myNext].theId);
        if (myBest[myNext].theNodes.empty() or myCandidate < myBest[myNext]) {
          myBest[myNext] = std::move(myCandidate);
        }
      }
    }

    for (size_t myDst = 0; myDst < N; myDst++) {
      if (myBest[myDst].theNodes.empty()) {
        throw TopologyError(TopologyError::Code::NoPath,
                            "no path from " + std::to_string(theNodes[mySrc].theId) +
                                " to " + std::to_string(theNodes[myDst].theId));
      }
      theRoutes[mySrc][myDst].theNodes = std::move(myBest[myDst].theNodes);
    }
  }
}

nlohmann::json Topology::toJson() const {
  auto myNodes = nlohmann::json::array();
  for (const auto& myNode : theNodes) {
    auto myRoles = nlohmann::json::array();
    for (const auto myRole : myNode.theRoles) {
      myRoles.push_back(toString(myRole));
    }
    myNodes.push_back(
        {{"id", myNode.theId}, {"speed", myNode.theSpeed}, {"roles", myRoles}});
  }
  auto myLinks = nlohmann::json::array();
  for (const auto& myLink : theLinks) {
    myLinks.push_back({{"a", myLink.theA},
                       {"b", myLink.theB},
                       {"capacity", myLink.theCapacity},
                       {"latency", myLink.theLatency}});
  }
  return {{"nodes", myNodes}, {"links", myLinks}};
}

Topology buildTopology(const nlohmann::json& aSpec) {
  std::vector<Node> myNodes;
  std::vector<Link> myLinks;
  for (const auto& myNode : aSpec.at("nodes")) {
    Node myNew{myNode.at("id").get<NodeId>(), myNode.at("speed").get<double>(), {}};
    for (const auto& myRole : myNode.at("roles")) {
      myNew.theRoles.insert(roleFromString(myRole.get<std::string>()));
    }
    myNodes.emplace_back(std::move(myNew));
  }
  if (aSpec.contains("links")) {
    for (const auto& myLink : aSpec.at("links")) {
      myLinks.emplace_back(Link{myLink.at("a").get<NodeId>(),
                                myLink.at("b").get<NodeId>(),
                                myLink.at("capacity").get<double>(),
                                myLink.at("latency").get<double>()});
    }
  }
  return Topology(std::move(myNodes), std::move(myLinks));
}

} // namespace edgesim
