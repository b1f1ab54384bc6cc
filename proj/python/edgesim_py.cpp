// Python bindings. Structured inputs and outputs cross the boundary as JSON
// text; the package wrapper converts to and from dicts.

#include "edgesim/experiment.h"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace edgesim;

namespace {

nlohmann::json parse(const std::string& aText) {
  try {
    return nlohmann::json::parse(aText);
  } catch (const nlohmann::json::parse_error& aErr) {
    throw ConfigError(ConfigError::Code::ParseError, aErr.what());
  }
}

nlohmann::json aggregateJson(const Aggregate& aAggregate) {
  nlohmann::json ret = nlohmann::json::object();
  const auto     myValues = metricValues(aAggregate);
  for (size_t i = 0; i < myValues.size(); i++) {
    ret[summaryMetrics()[i]] = myValues[i];
  }
  nlohmann::json myUtil = nlohmann::json::object();
  for (const auto& [myNode, myValue] : aAggregate.theUtilization) {
    myUtil[std::to_string(myNode)] = myValue;
  }
  ret["utilization"] = myUtil;
  return ret;
}

std::string simulate(const std::string& aTopology,
                     const std::string& aWorkload,
                     const std::string& aModel,
                     const std::string& aPolicy,
                     const uint64_t     aSeed,
                     const std::string& aHolders,
                     std::optional<double> aWarmup,
                     std::optional<double> aDuration) {
  std::optional<Topology> myTopo;
  std::vector<ChainSpec>  myChains;
  try {
    myTopo.emplace(buildTopology(parse(aTopology)));
    myChains = parseChains(parse(aWorkload));
  } catch (const nlohmann::json::exception& aErr) {
    throw ConfigError(ConfigError::Code::ValidationError, aErr.what());
  }

  RunConfig myConfig;
  myConfig.theModel  = modelFromString(aModel);
  myConfig.thePolicy = policyFromString(aPolicy);
  myConfig.theSeed   = aSeed;
  for (const auto& [myChain, myHolder] : parse(aHolders).items()) {
    myConfig.theInitialHolders[myChain] = myHolder.get<NodeId>();
  }

  RunResult myResult;
  {
    py::gil_scoped_release myRelease;
    myResult = run(*myTopo, myChains, myConfig);
  }

  double myStart = std::numeric_limits<double>::infinity();
  double myStop  = 0;
  for (const auto& myChain : myChains) {
    myStart = std::min(myStart, myChain.theArrival.theStart);
    myStop  = std::max(myStop, myChain.theArrival.theStop);
  }
  const auto myDuration = aDuration.value_or(myStop);
  const auto myWarmup   = aWarmup.value_or(myStart + 0.1 * (myDuration - myStart));

  nlohmann::json myRecords = nlohmann::json::array();
  for (const auto& myRecord : myResult.theRecords) {
    myRecords.push_back({{"invocation", myRecord.theInvocation},
                         {"chain", myChains[myRecord.theChain].theId},
                         {"arrival", myRecord.theArrivalTime},
                         {"completion", myRecord.theCompletionTime},
                         {"latency", myRecord.latency()},
                         {"byte_hops", myRecord.theByteHops},
                         {"executors", myRecord.theExecutors}});
  }
  nlohmann::json ret{{"arrivals", myResult.theArrivals},
                     {"completions", myResult.completions()},
                     {"residual", myResult.theResidual},
                     {"end_time", myResult.theEndTime},
                     {"records", myRecords}};
  if (myResult.completions() > 0) {
    ret["aggregate"] = aggregateJson(aggregate(myResult, myWarmup, myDuration));
  }
  return ret.dump();
}

py::dict experiment(const std::string&      aConfig,
                    std::optional<std::string> aOut,
                    std::optional<uint64_t>    aSeed,
                    std::optional<size_t>      aReplications,
                    const size_t               aThreads,
                    const bool                 aWrite) {
  const auto myConfig =
      parseConfig(parse(aConfig), Overrides{aOut, aSeed, aReplications, {}});
  ExperimentResult myResult;
  {
    py::gil_scoped_release myRelease;
    myResult = runExperiment(myConfig, std::max<size_t>(1, aThreads));
    if (aWrite) {
      writeOutputs(myConfig, myResult);
    }
  }
  py::dict ret;
  ret["results_csv"] = resultsCsv(myResult);
  ret["summary_csv"] = summaryCsv(myConfig, myResult);
  ret["manifest"]    = manifest(myConfig, myResult).dump();
  return ret;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge function-chain simulator core";

  auto myBase = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TopologyError>(m, "TopologyError", myBase.ptr());
  py::register_exception<WorkloadError>(m, "WorkloadError", myBase.ptr());
  py::register_exception<ModelError>(m, "ModelError", myBase.ptr());
  py::register_exception<EngineError>(m, "EngineError", myBase.ptr());
  py::register_exception<MetricsError>(m, "MetricsError", PyExc_ValueError);
  py::register_exception<RunError>(m, "RunError", PyExc_RuntimeError);

  m.def("version", [] { return std::string(theVersion); });

  m.def(
      "validate",
      [](const std::string& aConfig) { return parseConfig(parse(aConfig)).gridSize(); },
      py::arg("config"),
      "Validate a configuration document; returns the number of grid cells.");

  m.def("run_experiment",
        &experiment,
        py::arg("config"),
        py::arg("out")          = py::none(),
        py::arg("seed")         = py::none(),
        py::arg("replications") = py::none(),
        py::arg("threads")      = 1,
        py::arg("write")        = true);

  m.def("simulate",
        &simulate,
        py::arg("topology"),
        py::arg("workload"),
        py::arg("model"),
        py::arg("scheduler") = "least_loaded",
        py::arg("seed")      = 0,
        py::arg("holders")   = "{}",
        py::arg("warmup")    = py::none(),
        py::arg("duration")  = py::none());

  m.def(
      "shortest_path",
      [](const std::string& aTopology, const NodeId aSrc, const NodeId aDst) {
        const auto myTopo = buildTopology(parse(aTopology));
        const auto myPath = myTopo.shortestPath(aSrc, aDst);
        return py::make_tuple(myPath.theNodes, myTopo.pathLatency(myPath));
      },
      py::arg("topology"),
      py::arg("src"),
      py::arg("dst"));

  m.def(
      "nearest_rank",
      [](std::vector<double> aValues, const unsigned aPercent) {
        if (aValues.empty() or aPercent == 0 or aPercent > 100) {
          throw py::value_error("need a non-empty list and a percent in [1, 100]");
        }
        std::sort(aValues.begin(), aValues.end());
        return nearestRank(aValues, aPercent);
      },
      py::arg("values"),
      py::arg("percent"));
}
