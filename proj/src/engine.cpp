#include "edgesim/engine.h"

#include <algorithm>
#include <cassert>
#include <deque>
#include <queue>

namespace edgesim {

double NodeBusy::total() const {
  double ret = 0;
  for (const auto& myInterval : theIntervals) {
    ret += myInterval.theEnd - myInterval.theStart;
  }
  return ret;
}

double NodeBusy::within(const double aFrom, const double aTo) const {
  double ret = 0;
  for (const auto& myInterval : theIntervals) {
    const auto myStart = std::max(myInterval.theStart, aFrom);
    const auto myEnd   = std::min(myInterval.theEnd, aTo);
    if (myEnd > myStart) {
      ret += myEnd - myStart;
    }
  }
  return ret;
}

bool drainCheck(const RunResult& aResult) {
  return aResult.theArrivals == aResult.completions() + aResult.theResidual;
}

void writeTrace(const std::vector<TraceEntry>& aTrace, std::ostream& aOut) {
  for (const auto& myEntry : aTrace) {
    aOut << nlohmann::json{{"time", myEntry.theTime},
                           {"resource", myEntry.theResource},
                           {"kind", myEntry.theKind},
                           {"invocation", myEntry.theInvocation},
                           {"step", myEntry.theStep}}
                .dump()
         << '\n';
  }
}

namespace {

enum class EventKind {
  InvocationArrival,
  LinkRelease,  // serialization finished, the link takes the next message
  TransferHop,  // message delivered at the far end of a link
  ComputeEnd,
};

struct Event {
  double    theTime;
  uint64_t  theSequence;
  EventKind theKind;
  size_t    theInvocation; // index into the invocation list
  size_t    theResource;   // link index or node slot

  bool operator>(const Event& aOther) const noexcept {
    if (theTime != aOther.theTime) {
      return theTime > aOther.theTime;
    }
    return theSequence > aOther.theSequence;
  }
};

struct Job {
  size_t theInvocation;
  double theService;
  double theEnqueued;
};

struct Resource {
  bool            theBusy = false;
  std::deque<Job> theQueue;
};

struct InFlight {
  std::vector<NodeId> theExecutors;
  Plan                thePlan;
  size_t              theStep = 0;
  size_t              theHop  = 0; // position along the current Transfer route
  const Path*         theRoute = nullptr;
  uint64_t            theByteHops = 0;
  std::vector<StepTiming> theTimings;
};

class Simulation {
 public:
  Simulation(const Topology&               aTopology,
             const std::vector<ChainSpec>& aChains,
             const RunConfig&              aConfig)
      : theTopology(aTopology)
      , theChains(aChains)
      , theConfig(aConfig)
      , theScheduler(aConfig.thePolicy, aConfig.theSeed)
      , theNodes(aTopology.nodes().size())
      , theLinks(aTopology.links().size()) {
    for (size_t i = 0; i < aTopology.nodes().size(); i++) {
      theNodeSlots[aTopology.nodes()[i].theId] = i;
      theResult.theBusy.emplace_back(NodeBusy{aTopology.nodes()[i].theId, {}});
    }
    theResult.theDirectory = initialDirectory(
        aConfig.theModel, aChains, aTopology, aConfig.theInitialHolders);
  }

  RunResult operator()() {
    theInvocations = generateInvocations(theChains, theConfig.theSeed);
    theFlights.resize(theInvocations.size());
    for (size_t i = 0; i < theInvocations.size(); i++) {
      push(theInvocations[i].theArrivalTime, EventKind::InvocationArrival, i, 0);
    }

    while (not theEvents.empty()) {
      const auto myEvent = theEvents.top();
      if (myEvent.theTime > theConfig.theHorizon) {
        break;
      }
      theEvents.pop();
      assert(myEvent.theTime >= theNow);
      theNow = myEvent.theTime;

      switch (myEvent.theKind) {
        case EventKind::InvocationArrival:
          arrive(myEvent.theInvocation);
          break;
        case EventKind::LinkRelease:
          releaseLink(myEvent.theResource);
          break;
        case EventKind::TransferHop:
          hop(myEvent.theInvocation);
          break;
        case EventKind::ComputeEnd:
          endCompute(myEvent.theResource);
          break;
      }
    }

    theResult.theEndTime = theNow;
    theResult.theResidual =
        theResult.theArrivals - static_cast<uint64_t>(theResult.theRecords.size());
    return std::move(theResult);
  }

 private:
  void push(const double    aTime,
            const EventKind aKind,
            const size_t    aInvocation,
            const size_t    aResource) {
    theEvents.push(Event{aTime, theSequence++, aKind, aInvocation, aResource});
  }

  void trace(const std::string& aResource,
             const char*        aKind,
             const size_t       aInvocation,
             const size_t       aStep) {
    if (theConfig.theTrace) {
      theResult.theTrace.emplace_back(TraceEntry{
          theNow, aResource, aKind, theInvocations[aInvocation].theId, aStep});
    }
  }

  static std::string nodeName(const NodeId aNode) {
    return "node:" + std::to_string(aNode);
  }
  static std::string linkName(const size_t aLink) {
    return "link:" + std::to_string(aLink);
  }

  void arrive(const size_t aInvocation) {
    theResult.theArrivals++;
    const auto& myInvocation = theInvocations[aInvocation];
    const auto& myChain      = theChains[myInvocation.theChain];
    auto&       myFlight     = theFlights[aInvocation];

    myFlight.theExecutors = assignExecutors(myInvocation,
                                            myChain,
                                            theConfig.theModel,
                                            theTopology,
                                            theScheduler,
                                            theResult.theDirectory,
                                            theLoad);
    myFlight.thePlan = compilePlan(myInvocation,
                                   myChain,
                                   myFlight.theExecutors,
                                   theConfig.theModel,
                                   theResult.theDirectory);
    assert(isWellFormed(myFlight.thePlan, myChain));
    for (const auto& myStep : myFlight.thePlan.theSteps) {
      if (const auto* myCompute = std::get_if<ComputeStep>(&myStep)) {
        theLoad[myCompute->theNode] += myCompute->theOperations;
        thePending[myCompute->theNode]++;
      }
    }
    if (theConfig.theTrace) {
      myFlight.theTimings.resize(myFlight.thePlan.theSteps.size());
    }
    trace(nodeName(myChain.theClient), "arrival", aInvocation, 0);
    myFlight.theStep = 0;
    startStep(aInvocation);
  }

  // start the current step, skipping zero-hop transfers
  void startStep(const size_t aInvocation) {
    auto& myFlight = theFlights[aInvocation];
    auto& mySteps  = myFlight.thePlan.theSteps;
    while (myFlight.theStep < mySteps.size()) {
      const auto& myStep = mySteps[myFlight.theStep];
      if (const auto* myTransfer = std::get_if<TransferStep>(&myStep)) {
        const auto& myRoute =
            theTopology.shortestPath(myTransfer->theSrc, myTransfer->theDst);
        if (myRoute.hopCount() == 0) {
          myFlight.theStep++;
          continue;
        }
        myFlight.theByteHops += myTransfer->theBytes * myRoute.hopCount();
        myFlight.theRoute = &myRoute;
        myFlight.theHop   = 0;
        enqueueHop(aInvocation);
        return;
      }
      const auto& myCompute = std::get<ComputeStep>(myStep);
      const auto  mySlot    = theNodeSlots.at(myCompute.theNode);
      enqueue(theNodes[mySlot],
              Job{aInvocation,
                  myCompute.theOperations / theTopology.nodes()[mySlot].theSpeed,
                  theNow},
              nodeName(myCompute.theNode),
              EventKind::ComputeEnd,
              mySlot);
      return;
    }
    complete(aInvocation);
  }

  void enqueueHop(const size_t aInvocation) {
    auto&       myFlight   = theFlights[aInvocation];
    const auto& myNodes    = myFlight.theRoute->theNodes;
    const auto  myLinkIdx  = theTopology.linkIndex(myNodes[myFlight.theHop],
                                                 myNodes[myFlight.theHop + 1]);
    const auto& myLink     = theTopology.links()[myLinkIdx];
    const auto& myTransfer =
        std::get<TransferStep>(myFlight.thePlan.theSteps[myFlight.theStep]);
    enqueue(theLinks[myLinkIdx],
            Job{aInvocation,
                static_cast<double>(myTransfer.theBytes) / myLink.theCapacity,
                theNow},
            linkName(myLinkIdx),
            EventKind::LinkRelease,
            myLinkIdx);
  }

  void enqueue(Resource&          aResource,
               const Job&         aJob,
               const std::string& aName,
               const EventKind    aEndKind,
               const size_t       aIndex) {
    trace(aName, "enqueue", aJob.theInvocation, theFlights[aJob.theInvocation].theStep);
    aResource.theQueue.push_back(aJob);
    if (not aResource.theBusy) {
      serveNext(aResource, aName, aEndKind, aIndex);
    }
  }

  void serveNext(Resource&          aResource,
                 const std::string& aName,
                 const EventKind    aEndKind,
                 const size_t       aIndex) {
    if (aResource.theQueue.empty()) {
      aResource.theBusy = false;
      return;
    }
    aResource.theBusy = true;
    const auto& myJob = aResource.theQueue.front();
    auto&       myFlight = theFlights[myJob.theInvocation];
    trace(aName, "start", myJob.theInvocation, myFlight.theStep);
    if (theConfig.theTrace) {
      auto& myTiming = myFlight.theTimings[myFlight.theStep];
      myTiming.theWaiting += theNow - myJob.theEnqueued;
      myTiming.theService += myJob.theService;
    }
    push(theNow + myJob.theService, aEndKind, myJob.theInvocation, aIndex);
  }

  void releaseLink(const size_t aLink) {
    auto&      myResource  = theLinks[aLink];
    const auto myInvocation = myResource.theQueue.front().theInvocation;
    myResource.theQueue.pop_front();
    trace(linkName(aLink), "end", myInvocation, theFlights[myInvocation].theStep);

    const auto myLatency = theTopology.links()[aLink].theLatency;
    if (theConfig.theTrace) {
      auto& myFlight = theFlights[myInvocation];
      myFlight.theTimings[myFlight.theStep].thePropagation += myLatency;
    }
    push(theNow + myLatency, EventKind::TransferHop, myInvocation, aLink);
    serveNext(myResource, linkName(aLink), EventKind::LinkRelease, aLink);
  }

  void hop(const size_t aInvocation) {
    auto& myFlight = theFlights[aInvocation];
    myFlight.theHop++;
    const auto myHere = myFlight.theRoute->theNodes[myFlight.theHop];
    trace(nodeName(myHere), "deliver", aInvocation, myFlight.theStep);
    if (myFlight.theHop < myFlight.theRoute->hopCount()) {
      enqueueHop(aInvocation);
      return;
    }
    myFlight.theStep++;
    startStep(aInvocation);
  }

  void endCompute(const size_t aSlot) {
    auto&      myResource   = theNodes[aSlot];
    const auto myJob        = myResource.theQueue.front();
    const auto myNode       = theTopology.nodes()[aSlot].theId;
    myResource.theQueue.pop_front();
    trace(nodeName(myNode), "end", myJob.theInvocation,
          theFlights[myJob.theInvocation].theStep);

    theResult.theBusy[aSlot].theIntervals.emplace_back(
        BusyInterval{theNow - myJob.theService, theNow});
    auto& myFlight = theFlights[myJob.theInvocation];
    const auto& myCompute =
        std::get<ComputeStep>(myFlight.thePlan.theSteps[myFlight.theStep]);
    if (--thePending[myNode] == 0) {
      theLoad[myNode] = 0;
    } else {
      theLoad[myNode] -= myCompute.theOperations;
    }

    serveNext(myResource, nodeName(myNode), EventKind::ComputeEnd, aSlot);
    myFlight.theStep++;
    startStep(myJob.theInvocation);
  }

  void complete(const size_t aInvocation) {
    auto&       myFlight     = theFlights[aInvocation];
    const auto& myInvocation = theInvocations[aInvocation];
    const auto& myChain      = theChains[myInvocation.theChain];
    onCompletion(
        myChain, myFlight.theExecutors, theConfig.theModel, theResult.theDirectory);
    trace(nodeName(myChain.theClient), "complete", aInvocation, myFlight.theStep);
    theResult.theRecords.emplace_back(
        InvocationRecord{myInvocation.theId,
                         myInvocation.theChain,
                         myInvocation.theArrivalTime,
                         theNow,
                         myFlight.theByteHops,
                         std::move(myFlight.theExecutors),
                         theConfig.theModel,
                         std::move(myFlight.theTimings)});
    myFlight.thePlan.theSteps.clear();
    myFlight.thePlan.theSteps.shrink_to_fit();
  }

 private:
  const Topology&               theTopology;
  const std::vector<ChainSpec>& theChains;
  const RunConfig&              theConfig;
  Scheduler                     theScheduler;

  std::vector<Invocation> theInvocations;
  std::vector<InFlight>   theFlights;
  std::vector<Resource>   theNodes; // by topology slot
  std::vector<Resource>   theLinks; // by link index
  std::map<NodeId, size_t>   theNodeSlots;
  LoadSnapshot               theLoad;
  std::map<NodeId, uint64_t> thePending;

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> theEvents;
  uint64_t  theSequence = 0;
  double    theNow      = 0;
  RunResult theResult;
};

} // namespace

RunResult run(const Topology&               aTopology,
              const std::vector<ChainSpec>& aChains,
              const RunConfig&              aConfig) {
  double myStop = 0;
  for (const auto& myChain : aChains) {
    try {
      validate(myChain, aTopology);
    } catch (const WorkloadError& aErr) {
      throw EngineError(EngineError::Code::ConfigInvalid, aErr.what());
    }
    myStop = std::max(myStop, myChain.theArrival.theStop);
  }
  std::map<std::string, int> myIds;
  for (const auto& myChain : aChains) {
    if (myIds[myChain.theId]++ > 0) {
      throw EngineError(EngineError::Code::ConfigInvalid,
                        "duplicate chain id '" + myChain.theId + "'");
    }
  }
  if (aConfig.theHorizon < myStop) {
    throw EngineError(EngineError::Code::HorizonBeforeWorkloadEnd,
                      "horizon " + std::to_string(aConfig.theHorizon) +
                          " precedes workload stop " + std::to_string(myStop));
  }
  try {
    return Simulation(aTopology, aChains, aConfig)();
  } catch (const ModelError& aErr) {
    throw EngineError(EngineError::Code::ConfigInvalid, aErr.what());
  }
}

} // namespace edgesim
