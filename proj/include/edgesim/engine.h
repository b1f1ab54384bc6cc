#pragma once

#include "edgesim/models.h"
#include "edgesim/scheduler.h"
#include "edgesim/topology.h"
#include "edgesim/workload.h"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgesim {

class EngineError : public std::runtime_error {
 public:
  enum class Code { ConfigInvalid, HorizonBeforeWorkloadEnd };

  EngineError(const Code aCode, const std::string& aWhat)
      : std::runtime_error(aWhat)
      , theCode(aCode) {
  }
  Code code() const noexcept {
    return theCode;
  }

 private:
  Code theCode;
};

struct RunConfig {
  ExecutionModel                theModel  = ExecutionModel::ClientState;
  Policy                        thePolicy = Policy::LeastLoaded;
  uint64_t                      theSeed   = 0;
  //! Must not precede the latest arrival-process stop; infinite by default.
  double                        theHorizon = std::numeric_limits<double>::infinity();
  std::map<std::string, NodeId> theInitialHolders;
  bool                          theTrace = false;
};

//! Queueing, service and propagation time spent on one plan step.
struct StepTiming {
  double theWaiting     = 0;
  double theService     = 0;
  double thePropagation = 0;
};

struct InvocationRecord {
  uint64_t            theInvocation;
  size_t              theChain;
  double              theArrivalTime;
  double              theCompletionTime;
  uint64_t            theByteHops;
  std::vector<NodeId> theExecutors;
  ExecutionModel      theModel;
  //! Filled only when tracing.
  std::vector<StepTiming> theSteps;

  double latency() const noexcept {
    return theCompletionTime - theArrivalTime;
  }
};

struct TraceEntry {
  double      theTime;
  std::string theResource; // "node:<id>" or "link:<index>"
  std::string theKind;     // enqueue | start | end | deliver | arrival | complete
  uint64_t    theInvocation;
  size_t      theStep;
};

struct BusyInterval {
  double theStart;
  double theEnd;
};

struct NodeBusy {
  NodeId                    theNode;
  std::vector<BusyInterval> theIntervals;

  double total() const;
  //! Busy time clipped to [aFrom, aTo].
  double within(const double aFrom, const double aTo) const;
};

struct RunResult {
  std::vector<InvocationRecord> theRecords; // in completion order
  uint64_t                      theArrivals = 0;
  uint64_t                      theResidual = 0;
  std::vector<NodeBusy>         theBusy; // one per node, topology order
  StateDirectory                theDirectory;
  double                        theEndTime = 0;
  std::vector<TraceEntry>       theTrace;

  uint64_t completions() const noexcept {
    return theRecords.size();
  }
};

/**
 * Deterministic discrete-event run of the chains' invocation streams under
 * one execution model.
 *
 * Events are processed in (time, creation sequence) order. A Transfer moves
 * store-and-forward along its route: on every link it waits FIFO, holds the
 * link for bytes / capacity and is delivered to the next node after the
 * link's latency, which does not occupy the link. A Compute waits FIFO at its
 * node and holds it for operations / speed. Plan steps run strictly in order.
 * Arrivals stop at the workload's stop time; the run ends when no event is
 * left or the next one is past the horizon.
 */
RunResult run(const Topology&               aTopology,
              const std::vector<ChainSpec>& aChains,
              const RunConfig&              aConfig);

//! Conservation: arrivals == completions + residual.
bool drainCheck(const RunResult& aResult);

//! One JSON object per line.
void writeTrace(const std::vector<TraceEntry>& aTrace, std::ostream& aOut);

} // namespace edgesim
