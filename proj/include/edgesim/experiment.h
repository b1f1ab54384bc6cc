#pragma once

#include "edgesim/engine.h"
#include "edgesim/metrics.h"
#include "edgesim/models.h"
#include "edgesim/scheduler.h"
#include "edgesim/topology.h"
#include "edgesim/workload.h"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgesim {

constexpr const char* theVersion = "1.0.0";

class ConfigError : public std::runtime_error {
 public:
  enum class Code { ParseError, ValidationError };

  ConfigError(const Code aCode, const std::string& aWhat)
      : std::runtime_error(aWhat)
      , theCode(aCode) {
  }
  Code code() const noexcept {
    return theCode;
  }

 private:
  Code theCode;
};

//! Failure of a single grid run; what() names the cell and replication.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * A validated experiment: one topology and workload, swept over the grid
 * model x scheduler x state size x rate multiplier x chain length. Sweep axes
 * holding std::nullopt keep the configured values.
 */
struct ExperimentConfig {
  nlohmann::json                      theDocument; // resolved, for the manifest
  Topology                            theTopology;
  std::vector<ChainSpec>              theChains;
  std::vector<ExecutionModel>         theModels{};
  std::vector<Policy>                 thePolicies{};
  std::vector<std::optional<uint64_t>> theStateBytes{std::nullopt};
  std::vector<double>                 theRateMultipliers{1.0};
  std::vector<std::optional<size_t>>  theChainLengths{std::nullopt};
  //! Initial state holders per model, chain id -> node.
  std::map<ExecutionModel, std::map<std::string, NodeId>> theHolders{};
  uint64_t                            theBaseSeed    = 1;
  size_t                              theReplications = 1;
  std::optional<double>               theWarmup{};
  std::optional<double>               theDuration{};
  std::optional<double>               theHorizon{};
  std::filesystem::path               theOutput = "out";
  bool                                theTrace = false;

  size_t gridSize() const noexcept;
};

//! Command-line overrides of the document keys with the same name.
struct Overrides {
  std::optional<std::string> theOut;
  std::optional<uint64_t>    theSeed;
  std::optional<size_t>      theReplications;
  std::optional<bool>        theTrace;
};

//! Validate a configuration (or a manifest, whose "config" echo is used).
ExperimentConfig parseConfig(nlohmann::json aDocument, const Overrides& aOverrides = {});

//! Read and parse a file. Throws ConfigError.
ExperimentConfig loadConfig(const std::filesystem::path& aPath,
                            const Overrides&             aOverrides = {});

struct GridCell {
  size_t                  theIndex;
  ExecutionModel          theModel;
  Policy                  thePolicy;
  std::optional<uint64_t> theStateBytes;
  double                  theRateMultiplier;
  std::optional<size_t>   theChainLength;
};

//! Cells in CSV order: model, scheduler, state size, rate, chain length.
std::vector<GridCell> expandGrid(const ExperimentConfig& aConfig);

//! The configured chains with one cell's sweep values applied.
std::vector<ChainSpec> cellChains(const ExperimentConfig& aConfig, const GridCell& aCell);

//! base + a stable hash of (cell, replication).
uint64_t runSeed(const uint64_t aBase, const size_t aCell, const size_t aReplication);

struct RunRow {
  GridCell  theCell;
  size_t    theReplication;
  uint64_t  theSeed;
  uint64_t  theStateBytes;  // first chain's, after the cell is applied
  size_t    theChainLength; // ditto
  Aggregate theAggregate;
};

struct ExperimentResult {
  std::vector<RunRow> theRows; // sorted by (cell, replication)
};

//! Run every (cell, replication), at most aThreads at a time.
ExperimentResult runExperiment(const ExperimentConfig& aConfig, const size_t aThreads);

const std::vector<std::string>& csvColumns();

std::string resultsCsv(const ExperimentResult& aResult);
std::string summaryCsv(const ExperimentConfig& aConfig, const ExperimentResult& aResult);
nlohmann::json manifest(const ExperimentConfig& aConfig, const ExperimentResult& aResult);

//! results.csv, summary.csv, manifest.json under the output directory.
void writeOutputs(const ExperimentConfig& aConfig, const ExperimentResult& aResult);

//! Shortest round-trip decimal representation.
std::string formatNumber(const double aValue);

} // namespace edgesim
