#include "edgesim/experiment.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

size_t threadCap() {
  size_t ret = std::max(1u, std::thread::hardware_concurrency());
  if (const auto* myEnv = std::getenv("EDGE_FAAS_SIM_THREADS")) {
    try {
      const auto myCap = std::stoul(myEnv);
      if (myCap > 0) {
        ret = myCap;
      }
    } catch (const std::exception&) {
      std::cerr << "ignoring invalid EDGE_FAAS_SIM_THREADS=" << myEnv << '\n';
    }
  }
  return ret;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App myApp{"Discrete-event simulator comparing stateful FaaS execution models"};
  myApp.require_subcommand(1);

  std::string        myConfigPath;
  edgesim::Overrides myOverrides;
  std::string        myOut;
  uint64_t           mySeed         = 0;
  size_t             myReplications = 0;
  bool               myTrace        = false;

  auto* myRun = myApp.add_subcommand("run", "run the experiment grid");
  myRun->add_option("--config", myConfigPath, "configuration or manifest JSON")
      ->required();
  auto* myOutOpt  = myRun->add_option("--out", myOut, "output directory");
  auto* mySeedOpt = myRun->add_option("--seed", mySeed, "base seed");
  auto* myRepOpt  = myRun->add_option("--replications", myReplications, "replications per cell")
                       ->check(CLI::PositiveNumber);
  myRun->add_flag("--trace", myTrace, "write per-step traces");

  auto* myValidate = myApp.add_subcommand("validate", "validate a configuration");
  myValidate->add_option("--config", myConfigPath, "configuration JSON")->required();

  auto* myVersion = myApp.add_subcommand("version", "print the version");

  try {
    myApp.parse(argc, argv);
  } catch (const CLI::ParseError& aErr) {
    const auto ret = myApp.exit(aErr);
    return ret == 0 ? 0 : 1;
  }

  if (myVersion->parsed()) {
    std::cout << "edge-faas-sim " << edgesim::theVersion << '\n';
    return 0;
  }

  if (*myOutOpt) {
    myOverrides.theOut = myOut;
  }
  if (*mySeedOpt) {
    myOverrides.theSeed = mySeed;
  }
  if (*myRepOpt) {
    myOverrides.theReplications = myReplications;
  }
  if (myTrace) {
    myOverrides.theTrace = true;
  }

  std::optional<edgesim::ExperimentConfig> myConfig;
  try {
    myConfig.emplace(edgesim::loadConfig(myConfigPath, myOverrides));
  } catch (const edgesim::ConfigError& aErr) {
    std::cerr << (aErr.code() == edgesim::ConfigError::Code::ParseError ?
                      "parse error: " :
                      "validation error: ")
              << aErr.what() << '\n';
    return 1;
  }

  std::cout << "grid: " << myConfig->gridSize() << " cells x "
            << myConfig->theReplications << " replications\n";
  if (myValidate->parsed()) {
    std::cout << "configuration is valid\n";
    return 0;
  }

  try {
    const auto myResult = edgesim::runExperiment(*myConfig, threadCap());
    edgesim::writeOutputs(*myConfig, myResult);
    std::cout << "wrote " << myResult.theRows.size() << " runs to "
              << myConfig->theOutput.string() << '\n';
  } catch (const std::exception& aErr) {
    std::cerr << "runtime error: " << aErr.what() << '\n';
    return 2;
  }
  return 0;
}
