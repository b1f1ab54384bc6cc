#pragma once

#include "edgesim/engine.h"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgesim {

class MetricsError : public std::invalid_argument {
 public:
  enum class Code { EmptyAfterWarmup, TooFewReplications, InvalidWindow };

  MetricsError(const Code aCode, const std::string& aWhat)
      : std::invalid_argument(aWhat)
      , theCode(aCode) {
  }
  Code code() const noexcept {
    return theCode;
  }

 private:
  Code theCode;
};

/**
 * Nearest-rank percentile of an ascending sample: the element at 1-based
 * index ceil(aPercent * n / 100). aPercent in (0, 100].
 */
double nearestRank(std::span<const double> aSorted, const unsigned aPercent);

struct Aggregate {
  uint64_t theCount = 0;
  double   theLatencyMean = 0;
  double   theLatencyP50  = 0;
  double   theLatencyP95  = 0;
  double   theLatencyP99  = 0;
  uint64_t theByteHopsTotal = 0;
  double   theByteHopsPerInvocation = 0;
  //! Busy time in [warmup, duration] over the window length, per node.
  std::vector<std::pair<NodeId, double>> theUtilization;
  uint64_t theResidual = 0;

  double maxUtilization() const;
};

/**
 * Statistics over the records that arrived at or after aWarmup.
 * Throws MetricsError(EmptyAfterWarmup) if none is left, which only happens
 * with a non-empty record list.
 */
Aggregate aggregate(const std::vector<InvocationRecord>& aRecords,
                    const std::vector<NodeBusy>&         aBusy,
                    const uint64_t                       aResidual,
                    const double                         aWarmup,
                    const double                         aDuration);

inline Aggregate aggregate(const RunResult& aResult,
                           const double     aWarmup,
                           const double     aDuration) {
  return aggregate(
      aResult.theRecords, aResult.theBusy, aResult.theResidual, aWarmup, aDuration);
}

struct MetricSummary {
  double theMean   = 0;
  double theStdDev = 0;
  //! 95% confidence half-width, Student-t with n - 1 degrees of freedom.
  double theHalfWidth = 0;
};

//! Mean, sample standard deviation and 95% half-width; needs n >= 2.
MetricSummary summarize(std::span<const double> aValues);

//! Names of the summarized metrics, in CSV order.
const std::vector<std::string>& summaryMetrics();

//! The metric values of an aggregate, aligned with summaryMetrics().
std::vector<double> metricValues(const Aggregate& aAggregate);

struct ReplicationSummary {
  size_t                     theReplications = 0;
  std::vector<MetricSummary> theMetrics; // aligned with summaryMetrics()
};

ReplicationSummary summarizeReplications(const std::vector<Aggregate>& aAggregates);

} // namespace edgesim
