#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edgesim {

using NodeId = uint32_t;

enum class Role { Client, Executor, StateStore };

std::string toString(const Role aRole);
Role        roleFromString(const std::string& aName);

struct Node {
  NodeId         theId;
  double         theSpeed; // operations per second
  std::set<Role> theRoles;

  bool hasRole(const Role aRole) const {
    return theRoles.count(aRole) > 0;
  }
};

struct Link {
  NodeId theA;
  NodeId theB;
  double theCapacity; // bytes per second
  double theLatency;  // seconds
};

class TopologyError : public std::invalid_argument {
 public:
  enum class Code {
    DuplicateNodeId,
    DanglingLinkEndpoint,
    DisconnectedGraph,
    NonPositiveCapacityOrSpeed,
    InvalidLink,
    MissingRole,
    UnknownNode,
    NoPath,
  };

  TopologyError(const Code aCode, const std::string& aWhat)
      : std::invalid_argument(aWhat)
      , theCode(aCode) {
  }

  Code code() const noexcept {
    return theCode;
  }

 private:
  Code theCode;
};

struct Path {
  std::vector<NodeId> theNodes;

  size_t hopCount() const noexcept {
    return theNodes.empty() ? 0 : theNodes.size() - 1;
  }
  bool operator==(const Path&) const = default;
};

/**
 * Static edge network: nodes with a processing speed, bidirectional links with
 * capacity and propagation latency.
 *
 * All-pairs routes are computed once at construction. Routes minimize the
 * total link latency, with ties broken by the lexicographically smallest
 * node-id sequence. The object is immutable afterwards.
 */
class Topology {
 public:
  static constexpr size_t NoLink = static_cast<size_t>(-1);

  /// Validate and build. Throws TopologyError.
  Topology(std::vector<Node> aNodes, std::vector<Link> aLinks);

  const std::vector<Node>& nodes() const noexcept {
    return theNodes;
  }
  const std::vector<Link>& links() const noexcept {
    return theLinks;
  }

  bool        hasNode(const NodeId aId) const;
  const Node& node(const NodeId aId) const;

  //! Node ids carrying the given role, in increasing order.
  std::vector<NodeId> nodesWithRole(const Role aRole) const;

  //! Index into links() of the link joining the two nodes, or NoLink.
  size_t linkIndex(const NodeId aA, const NodeId aB) const;

  const Path& shortestPath(const NodeId aSrc, const NodeId aDst) const;

  //! Sum of link latencies, folded from the first node of the path.
  double pathLatency(const Path& aPath) const;

  //! Uncontended delay: sum over hops of bytes / capacity + latency.
  double transferDelay(const Path& aPath, const uint64_t aBytes) const;

  nlohmann::json toJson() const;

 private:
  size_t slot(const NodeId aId) const;
  void   computeRoutes();

 private:
  std::vector<Node>           theNodes;
  std::vector<Link>           theLinks;
  std::map<NodeId, size_t>    theSlots;
  std::map<std::pair<NodeId, NodeId>, size_t> theLinkIndex;
  // theRoutes[slot(src)][slot(dst)]
  std::vector<std::vector<Path>> theRoutes;
};

//! Parse the {"nodes":[...],"links":[...]} document and build the topology.
Topology buildTopology(const nlohmann::json& aSpec);

} // namespace edgesim
