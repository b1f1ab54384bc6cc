#include "edgesim/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace edgesim {

namespace {

using C = ConfigError::Code;

[[noreturn]] void invalid(const std::string& aKey, const std::string& aWhat) {
  throw ConfigError(C::ValidationError, "key '" + aKey + "': " + aWhat);
}

const nlohmann::json& required(const nlohmann::json& aObject, const std::string& aKey) {
  if (not aObject.contains(aKey)) {
    throw ConfigError(C::ValidationError, "missing required key '" + aKey + "'");
  }
  return aObject.at(aKey);
}

// a scalar or a list of scalars, returned as a non-empty list
std::vector<nlohmann::json> listOf(const nlohmann::json& aValue, const std::string& aKey) {
  std::vector<nlohmann::json> ret;
  if (aValue.is_array()) {
    ret.assign(aValue.begin(), aValue.end());
  } else {
    ret.push_back(aValue);
  }
  if (ret.empty()) {
    invalid(aKey, "must not be empty");
  }
  return ret;
}

// integer literals may be stored signed or unsigned
bool isCount(const nlohmann::json& aValue) {
  return aValue.is_number_unsigned() or
         (aValue.is_number_integer() and aValue.get<int64_t>() >= 0);
}

double nonNegative(const nlohmann::json& aValue, const std::string& aKey) {
  if (not aValue.is_number() or not(aValue.get<double>() >= 0)) {
    invalid(aKey, "must be a non-negative number");
  }
  return aValue.get<double>();
}

std::map<std::string, NodeId> holdersFor(const ExecutionModel  aModel,
                                         const nlohmann::json& aDirectory) {
  std::map<std::string, NodeId> ret;
  for (const auto& [myChain, myValue] : aDirectory.items()) {
    const auto myKey = "state_directory." + myChain;
    if (isCount(myValue)) {
      ret[myChain] = myValue.get<NodeId>();
    } else if (myValue.is_object()) {
      if (myValue.contains(toString(aModel))) {
        const auto& myHolder = myValue.at(toString(aModel));
        if (not isCount(myHolder)) {
          invalid(myKey + "." + toString(aModel), "must be a node id");
        }
        ret[myChain] = myHolder.get<NodeId>();
      }
    } else {
      invalid(myKey, "must be a node id or an object of node ids per model");
    }
  }
  return ret;
}

} // namespace

size_t ExperimentConfig::gridSize() const noexcept {
  return theModels.size() * thePolicies.size() * theStateBytes.size() *
         theRateMultipliers.size() * theChainLengths.size();
}

ExperimentConfig parseConfig(nlohmann::json aDocument, const Overrides& aOverrides) {
  if (not aDocument.is_object()) {
    throw ConfigError(C::ValidationError, "configuration must be a JSON object");
  }
  // a manifest carries the resolved configuration it was produced from
  if (aDocument.contains("artifact") and aDocument.contains("config")) {
    aDocument = nlohmann::json(aDocument.at("config"));
  }

  if (aOverrides.theOut) {
    aDocument["out"] = *aOverrides.theOut;
  }
  if (aOverrides.theSeed) {
    aDocument["seed"] = *aOverrides.theSeed;
  }
  if (aOverrides.theReplications) {
    aDocument["replications"] = *aOverrides.theReplications;
  }
  if (aOverrides.theTrace) {
    aDocument["trace"] = *aOverrides.theTrace;
  }

  std::optional<Topology> myTopology;
  try {
    myTopology.emplace(buildTopology(required(aDocument, "topology")));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& aErr) {
    invalid("topology", aErr.what());
  }

  std::vector<ChainSpec> myChains;
  try {
    myChains = parseChains(required(aDocument, "workload"));
    std::set<std::string> myIds;
    for (const auto& myChain : myChains) {
      validate(myChain, *myTopology);
      if (not myIds.insert(myChain.theId).second) {
        throw WorkloadError("duplicate chain id '" + myChain.theId + "'");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& aErr) {
    invalid("workload", aErr.what());
  }

  ExperimentConfig ret{.theDocument = aDocument,
                       .theTopology = std::move(*myTopology),
                       .theChains   = std::move(myChains)};

  for (const auto& myModel : listOf(required(aDocument, "model"), "model")) {
    if (not myModel.is_string()) {
      invalid("model", "must be a model name or a list of model names");
    }
    try {
      ret.theModels.emplace_back(modelFromString(myModel.get<std::string>()));
    } catch (const std::invalid_argument& aErr) {
      invalid("model", aErr.what());
    }
  }

  if (aDocument.contains("scheduler")) {
    for (const auto& mySched : listOf(aDocument.at("scheduler"), "scheduler")) {
      if (not mySched.is_object() or not mySched.contains("kind") or
          not mySched.at("kind").is_string()) {
        invalid("scheduler", "expected {\"kind\": <policy>} or a list of them");
      }
      try {
        ret.thePolicies.emplace_back(
            policyFromString(mySched.at("kind").get<std::string>()));
      } catch (const std::invalid_argument& aErr) {
        invalid("scheduler.kind", aErr.what());
      }
    }
  } else {
    ret.thePolicies.emplace_back(Policy::LeastLoaded);
  }

  if (aDocument.contains("sweep")) {
    const auto& mySweep = aDocument.at("sweep");
    if (not mySweep.is_object()) {
      invalid("sweep", "must be an object");
    }
    if (mySweep.contains("state_bytes")) {
      ret.theStateBytes.clear();
      for (const auto& myValue : listOf(mySweep.at("state_bytes"), "sweep.state_bytes")) {
        nonNegative(myValue, "state_bytes");
        ret.theStateBytes.emplace_back(myValue.get<uint64_t>());
      }
    }
    if (mySweep.contains("rate_multipliers")) {
      ret.theRateMultipliers.clear();
      for (const auto& myValue :
           listOf(mySweep.at("rate_multipliers"), "sweep.rate_multipliers")) {
        if (not(nonNegative(myValue, "rate_multipliers") > 0)) {
          invalid("rate_multipliers", "must be positive");
        }
        ret.theRateMultipliers.emplace_back(myValue.get<double>());
      }
    }
    if (mySweep.contains("chain_lengths")) {
      ret.theChainLengths.clear();
      for (const auto& myValue :
           listOf(mySweep.at("chain_lengths"), "sweep.chain_lengths")) {
        if (not isCount(myValue) or myValue.get<size_t>() == 0) {
          invalid("chain_lengths", "must be positive integers");
        }
        ret.theChainLengths.emplace_back(myValue.get<size_t>());
      }
    }
  }

  const auto myDirectory = aDocument.value("state_directory", nlohmann::json::object());
  if (not myDirectory.is_object()) {
    invalid("state_directory", "must be an object");
  }
  for (const auto myModel : ret.theModels) {
    auto myHolders = holdersFor(myModel, myDirectory);
    for (const auto& [myChain, myNode] : myHolders) {
      if (not ret.theTopology.hasNode(myNode)) {
        invalid("state_directory." + myChain,
                "unknown node " + std::to_string(myNode));
      }
    }
    // every state size the grid may use must have a consistent directory
    for (const auto& myState : ret.theStateBytes) {
      auto myChains = ret.theChains;
      if (myState) {
        for (auto& myChain : myChains) {
          myChain.theStateBytes = *myState;
        }
      }
      try {
        initialDirectory(myModel, myChains, ret.theTopology, myHolders);
      } catch (const ModelError& aErr) {
        invalid("state_directory", aErr.what());
      }
    }
    ret.theHolders[myModel] = std::move(myHolders);
  }

  if (aDocument.contains("seed")) {
    if (not isCount(aDocument.at("seed"))) {
      invalid("seed", "must be a non-negative integer");
    }
    ret.theBaseSeed = aDocument.at("seed").get<uint64_t>();
  }
  if (aDocument.contains("replications")) {
    const auto& myValue = aDocument.at("replications");
    if (not isCount(myValue) or myValue.get<size_t>() < 1) {
      invalid("replications", "must be an integer >= 1");
    }
    ret.theReplications = myValue.get<size_t>();
  }
  if (aDocument.contains("warmup")) {
    ret.theWarmup = nonNegative(aDocument.at("warmup"), "warmup");
  }
  if (aDocument.contains("duration")) {
    ret.theDuration = nonNegative(aDocument.at("duration"), "duration");
  }
  if (aDocument.contains("horizon")) {
    ret.theHorizon = nonNegative(aDocument.at("horizon"), "horizon");
  }
  if (aDocument.contains("out")) {
    if (not aDocument.at("out").is_string()) {
      invalid("out", "must be a path");
    }
    ret.theOutput = aDocument.at("out").get<std::string>();
  }
  if (aDocument.contains("trace")) {
    if (not aDocument.at("trace").is_boolean()) {
      invalid("trace", "must be a boolean");
    }
    ret.theTrace = aDocument.at("trace").get<bool>();
  }
  if (aDocument.contains("formats")) {
    for (const auto& myFormat : listOf(aDocument.at("formats"), "formats")) {
      if (myFormat != "csv") {
        invalid("formats", "only \"csv\" is supported");
      }
    }
  }

  double myStart = std::numeric_limits<double>::infinity();
  double myStop  = 0;
  for (const auto& myChain : ret.theChains) {
    myStart = std::min(myStart, myChain.theArrival.theStart);
    myStop  = std::max(myStop, myChain.theArrival.theStop);
  }
  if (ret.theHorizon and not ret.theChains.empty() and *ret.theHorizon < myStop) {
    invalid("horizon", "precedes the workload stop time");
  }
  if (ret.theWarmup and ret.theDuration and not(*ret.theDuration > *ret.theWarmup)) {
    invalid("duration", "must exceed warmup");
  }

  return ret;
}

ExperimentConfig loadConfig(const std::filesystem::path& aPath,
                            const Overrides&             aOverrides) {
  std::ifstream myInput(aPath);
  if (not myInput) {
    throw ConfigError(C::ParseError, "cannot open " + aPath.string());
  }
  nlohmann::json myDocument;
  try {
    myDocument = nlohmann::json::parse(myInput);
  } catch (const nlohmann::json::parse_error& aErr) {
    throw ConfigError(C::ParseError, aPath.string() + ": " + aErr.what());
  }
  try {
    return parseConfig(std::move(myDocument), aOverrides);
  } catch (const nlohmann::json::exception& aErr) {
    // wrong types deep inside a section
    throw ConfigError(C::ValidationError, aErr.what());
  }
}

std::vector<GridCell> expandGrid(const ExperimentConfig& aConfig) {
  std::vector<GridCell> ret;
  for (const auto myModel : aConfig.theModels) {
    for (const auto myPolicy : aConfig.thePolicies) {
      for (const auto& myState : aConfig.theStateBytes) {
        for (const auto myRate : aConfig.theRateMultipliers) {
          for (const auto& myLength : aConfig.theChainLengths) {
            ret.emplace_back(
                GridCell{ret.size(), myModel, myPolicy, myState, myRate, myLength});
          }
        }
      }
    }
  }
  return ret;
}

std::vector<ChainSpec> cellChains(const ExperimentConfig& aConfig,
                                  const GridCell&         aCell) {
  auto ret = aConfig.theChains;
  for (auto& myChain : ret) {
    if (aCell.theStateBytes) {
      myChain.theStateBytes = *aCell.theStateBytes;
    }
    myChain.theArrival.theRate *= aCell.theRateMultiplier;
    if (aCell.theChainLength) {
      const auto                myBase = myChain.theFunctions;
      std::vector<FunctionSpec> myFunctions;
      for (size_t i = 0; i < *aCell.theChainLength; i++) {
        auto myFunction = myBase[i % myBase.size()];
        if (i >= myBase.size()) {
          myFunction.theId += "#" + std::to_string(i / myBase.size());
        }
        myFunctions.emplace_back(std::move(myFunction));
      }
      myChain.theFunctions = std::move(myFunctions);
    }
  }
  return ret;
}

uint64_t runSeed(const uint64_t aBase, const size_t aCell, const size_t aReplication) {
  return aBase + mix64((static_cast<uint64_t>(aCell) << 32) ^
                       static_cast<uint64_t>(aReplication));
}

ExperimentResult runExperiment(const ExperimentConfig& aConfig, const size_t aThreads) {
  const auto myCells = expandGrid(aConfig);
  const auto R       = aConfig.theReplications;
  const auto myTotal = myCells.size() * R;

  double myStart = std::numeric_limits<double>::infinity();
  double myStop  = 0;
  for (const auto& myChain : aConfig.theChains) {
    myStart = std::min(myStart, myChain.theArrival.theStart);
    myStop  = std::max(myStop, myChain.theArrival.theStop);
  }
  if (aConfig.theChains.empty()) {
    myStart = 0;
    myStop  = 1;
  }
  const auto myDuration = aConfig.theDuration.value_or(myStop);
  const auto myWarmup =
      aConfig.theWarmup.value_or(myStart + 0.1 * (myStop - myStart));

  if (aConfig.theTrace) {
    std::filesystem::create_directories(aConfig.theOutput / "trace");
  }

  std::vector<std::optional<RunRow>> myRows(myTotal);
  std::atomic<size_t>                myNext{0};
  std::mutex                         myErrorMutex;
  std::exception_ptr                 myError;
  size_t                             myErrorIndex = myTotal;

  const auto myWorker = [&]() {
    for (auto i = myNext++; i < myTotal; i = myNext++) {
      const auto& myCell = myCells[i / R];
      const auto  myRep  = i % R;
      try {
        const auto myChains = cellChains(aConfig, myCell);
        RunConfig  myRun;
        myRun.theModel          = myCell.theModel;
        myRun.thePolicy         = myCell.thePolicy;
        myRun.theSeed           = runSeed(aConfig.theBaseSeed, myCell.theIndex, myRep);
        myRun.theInitialHolders = aConfig.theHolders.at(myCell.theModel);
        myRun.theTrace          = aConfig.theTrace;
        if (aConfig.theHorizon) {
          myRun.theHorizon = *aConfig.theHorizon;
        }
        const auto myResult = run(aConfig.theTopology, myChains, myRun);
        if (aConfig.theTrace) {
          std::ofstream myOut(aConfig.theOutput / "trace" /
                              ("cell" + std::to_string(myCell.theIndex) + "_rep" +
                               std::to_string(myRep) + ".jsonl"));
          writeTrace(myResult.theTrace, myOut);
        }
        myRows[i] = RunRow{myCell,
                           myRep,
                           myRun.theSeed,
                           myChains.empty() ? 0 : myChains.front().theStateBytes,
                           myChains.empty() ? 0 : myChains.front().theFunctions.size(),
                           aggregate(myResult, myWarmup, myDuration)};
      } catch (const std::exception& aErr) {
        const std::lock_guard<std::mutex> myLock(myErrorMutex);
        if (i < myErrorIndex) {
          myErrorIndex = i;
          myError      = std::make_exception_ptr(
              RunError("cell " + std::to_string(myCell.theIndex) + " (model " +
                       toString(myCell.theModel) + ", scheduler " +
                       toString(myCell.thePolicy) + ") replication " +
                       std::to_string(myRep) + ": " + aErr.what()));
        }
      }
    }
  };

  const auto myThreads = std::clamp<size_t>(aThreads, 1, std::max<size_t>(myTotal, 1));
  std::vector<std::thread> myPool;
  for (size_t t = 1; t < myThreads; t++) {
    myPool.emplace_back(myWorker);
  }
  myWorker();
  for (auto& myThread : myPool) {
    myThread.join();
  }
  if (myError) {
    std::rethrow_exception(myError);
  }

  ExperimentResult ret;
  for (auto& myRow : myRows) {
    ret.theRows.emplace_back(std::move(*myRow));
  }
  return ret;
}

std::string formatNumber(const double aValue) {
  char myBuf[64];
  const auto [myEnd, myErr] = std::to_chars(myBuf, myBuf + sizeof(myBuf), aValue);
  return std::string(myBuf, myEnd);
}

const std::vector<std::string>& csvColumns() {
  static const std::vector<std::string> myColumns{"model",
                                                  "scheduler",
                                                  "state_bytes",
                                                  "rate_multiplier",
                                                  "chain_length",
                                                  "replication",
                                                  "seed",
                                                  "count",
                                                  "latency_mean_s",
                                                  "latency_p50_s",
                                                  "latency_p95_s",
                                                  "latency_p99_s",
                                                  "byte_hops_total",
                                                  "byte_hops_per_invocation",
                                                  "max_node_utilization",
                                                  "residual"};
  return myColumns;
}

namespace {

std::string join(const std::vector<std::string>& aFields) {
  std::string ret;
  for (size_t i = 0; i < aFields.size(); i++) {
    ret += (i == 0 ? "" : ",") + aFields[i];
  }
  return ret;
}

std::vector<std::string> cellFields(const RunRow& aRow) {
  return {toString(aRow.theCell.theModel),
          toString(aRow.theCell.thePolicy),
          std::to_string(aRow.theStateBytes),
          formatNumber(aRow.theCell.theRateMultiplier),
          std::to_string(aRow.theChainLength)};
}

} // namespace

std::string resultsCsv(const ExperimentResult& aResult) {
  std::string ret = join(csvColumns()) + "\n";
  for (const auto& myRow : aResult.theRows) {
    auto        myFields = cellFields(myRow);
    const auto& myAgg    = myRow.theAggregate;
    for (const auto& myField : {std::to_string(myRow.theReplication),
                                std::to_string(myRow.theSeed),
                                std::to_string(myAgg.theCount),
                                formatNumber(myAgg.theLatencyMean),
                                formatNumber(myAgg.theLatencyP50),
                                formatNumber(myAgg.theLatencyP95),
                                formatNumber(myAgg.theLatencyP99),
                                std::to_string(myAgg.theByteHopsTotal),
                                formatNumber(myAgg.theByteHopsPerInvocation),
                                formatNumber(myAgg.maxUtilization()),
                                std::to_string(myAgg.theResidual)}) {
      myFields.emplace_back(myField);
    }
    ret += join(myFields) + "\n";
  }
  return ret;
}

std::string summaryCsv(const ExperimentConfig& aConfig, const ExperimentResult& aResult) {
  std::vector<std::string> myHeader{
      "model", "scheduler", "state_bytes", "rate_multiplier", "chain_length", "replications"};
  for (const auto& myMetric : summaryMetrics()) {
    for (const auto* mySuffix : {"_mean", "_std", "_ci95"}) {
      myHeader.emplace_back(myMetric + mySuffix);
    }
  }
  std::string ret = join(myHeader) + "\n";

  const auto R = aConfig.theReplications;
  for (size_t i = 0; i < aResult.theRows.size(); i += R) {
    auto myFields = cellFields(aResult.theRows[i]);
    myFields.emplace_back(std::to_string(R));
    std::vector<Aggregate> myAggregates;
    for (size_t r = 0; r < R; r++) {
      myAggregates.emplace_back(aResult.theRows[i + r].theAggregate);
    }
    if (R >= 2) {
      for (const auto& mySummary : summarizeReplications(myAggregates).theMetrics) {
        myFields.emplace_back(formatNumber(mySummary.theMean));
        myFields.emplace_back(formatNumber(mySummary.theStdDev));
        myFields.emplace_back(formatNumber(mySummary.theHalfWidth));
      }
    } else {
      for (const auto myValue : metricValues(myAggregates.front())) {
        myFields.emplace_back(formatNumber(myValue));
        myFields.emplace_back("");
        myFields.emplace_back("");
      }
    }
    ret += join(myFields) + "\n";
  }
  return ret;
}

nlohmann::json manifest(const ExperimentConfig& aConfig, const ExperimentResult& aResult) {
  auto myRuns = nlohmann::json::array();
  for (const auto& myRow : aResult.theRows) {
    myRuns.push_back({{"cell", myRow.theCell.theIndex},
                      {"replication", myRow.theReplication},
                      {"seed", myRow.theSeed}});
  }
  const auto myNow = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char       myTimestamp[32];
  std::strftime(myTimestamp, sizeof(myTimestamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&myNow));
  return {{"artifact", "edge-faas-sim"},
          {"version", theVersion},
          {"created", myTimestamp},
          {"grid_size", aConfig.gridSize()},
          {"replications", aConfig.theReplications},
          {"config", aConfig.theDocument},
          {"runs", myRuns}};
}

void writeOutputs(const ExperimentConfig& aConfig, const ExperimentResult& aResult) {
  std::filesystem::create_directories(aConfig.theOutput);
  const auto myWrite = [](const std::filesystem::path& aPath, const std::string& aText) {
    std::ofstream myOut(aPath, std::ios::binary);
    myOut << aText;
    if (not myOut) {
      throw std::runtime_error("cannot write " + aPath.string());
    }
  };
  myWrite(aConfig.theOutput / "results.csv", resultsCsv(aResult));
  myWrite(aConfig.theOutput / "summary.csv", summaryCsv(aConfig, aResult));
  myWrite(aConfig.theOutput / "manifest.json", manifest(aConfig, aResult).dump(2) + "\n");
}

} // namespace edgesim
