#pragma once

#include "edgesim/scheduler.h"
#include "edgesim/topology.h"
#include "edgesim/workload.h"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace edgesim {

/**
 * The four stateful execution models, which differ in where a chain's state
 * blob lives between and during invocations:
 *
 * - ClientState: the client owns the state and ships it along with every
 *   message of the chain, including the response.
 * - RemoteState: the state lives on a state_store node; every function
 *   fetches it before running and writes it back afterwards.
 * - LocalState: the state lives on an executor and all the chain's functions
 *   run there, so the state never moves.
 * - StatePropagation: the state travels with the invocation messages like
 *   ClientState but stays on the last executor instead of returning.
 */
enum class ExecutionModel { ClientState, RemoteState, LocalState, StatePropagation };

std::string    toString(const ExecutionModel aModel);
ExecutionModel modelFromString(const std::string& aName);

const std::vector<ExecutionModel>& allModels();

class ModelError : public std::runtime_error {
 public:
  enum class Code { InconsistentDirectory, NoExecutorAvailable };

  ModelError(const Code aCode, const std::string& aWhat)
      : std::runtime_error(aWhat)
      , theCode(aCode) {
  }
  Code code() const noexcept {
    return theCode;
  }

 private:
  Code theCode;
};

//! Where each chain's state resides: chain id -> holder node.
class StateDirectory {
 public:
  StateDirectory() = default;

  std::optional<NodeId> holder(const std::string& aChain) const;
  void                  setHolder(const std::string& aChain, const NodeId aNode);

  const std::map<std::string, NodeId>& entries() const noexcept {
    return theHolders;
  }
  bool operator==(const StateDirectory&) const = default;

 private:
  std::map<std::string, NodeId> theHolders;
};

/**
 * Initial directory for a model. Chains without state get no entry. A holder
 * in aConfigured is used when given, otherwise: RemoteState picks the lowest
 * id state_store node, LocalState the executor closest to the chain's client,
 * StatePropagation the client itself. ClientState keeps no entries.
 * Throws ModelError(InconsistentDirectory) if a holder has the wrong role.
 */
StateDirectory initialDirectory(const ExecutionModel                 aModel,
                                const std::vector<ChainSpec>&        aChains,
                                const Topology&                      aTopology,
                                const std::map<std::string, NodeId>& aConfigured);

//! Throws ModelError(InconsistentDirectory) on a role or coverage violation.
void checkDirectory(const ExecutionModel          aModel,
                    const std::vector<ChainSpec>& aChains,
                    const Topology&               aTopology,
                    const StateDirectory&         aDirectory);

struct TransferStep {
  NodeId   theSrc;
  NodeId   theDst;
  uint64_t theBytes;
  bool     operator==(const TransferStep&) const = default;
};

struct ComputeStep {
  NodeId theNode;
  double theOperations;
  bool   operator==(const ComputeStep&) const = default;
};

using Step = std::variant<TransferStep, ComputeStep>;

struct Plan {
  uint64_t          theInvocation;
  std::vector<Step> theSteps;

  uint64_t totalPayloadBytes() const;
  //! Sum over Transfers of bytes times the hop count of the routed path.
  uint64_t byteHops(const Topology& aTopology) const;
  //! Byte counts of the Transfer steps, in order.
  std::vector<uint64_t> transferBytes() const;
};

/**
 * Structural check: one Compute per chain function in order, and every
 * Compute preceded by a Transfer delivering to its node (or by a Compute on
 * the same node, or at the client for the very first step).
 */
bool isWellFormed(const Plan& aPlan, const ChainSpec& aChain);

/**
 * One executor per chain function. LocalState with state pins all of them to
 * the holder; otherwise each is picked by the scheduler among the executor
 * nodes, with aLoad plus the demand already assigned to earlier functions of
 * this invocation as load snapshot.
 */
std::vector<NodeId> assignExecutors(const Invocation&     aInvocation,
                                    const ChainSpec&      aChain,
                                    const ExecutionModel  aModel,
                                    const Topology&       aTopology,
                                    Scheduler&            aScheduler,
                                    const StateDirectory& aDirectory,
                                    const LoadSnapshot&   aLoad);

Plan compilePlan(const Invocation&          aInvocation,
                 const ChainSpec&           aChain,
                 const std::vector<NodeId>& aExecutors,
                 const ExecutionModel       aModel,
                 const StateDirectory&      aDirectory);

//! StatePropagation moves the holder to the last executor; others no-op.
void onCompletion(const ChainSpec&           aChain,
                  const std::vector<NodeId>& aExecutors,
                  const ExecutionModel       aModel,
                  StateDirectory&            aDirectory);

} // namespace edgesim
