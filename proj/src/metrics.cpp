#include "edgesim/metrics.h"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace edgesim {

double nearestRank(std::span<const double> aSorted, const unsigned aPercent) {
  assert(not aSorted.empty());
  assert(aPercent > 0 and aPercent <= 100);
  const uint64_t n     = aSorted.size();
  const uint64_t myRank = (aPercent * n + 99) / 100; // ceil, 1-based
  return aSorted[std::max<uint64_t>(myRank, 1) - 1];
}

double Aggregate::maxUtilization() const {
  double ret = 0;
  for (const auto& [myNode, myUtil] : theUtilization) {
    ret = std::max(ret, myUtil);
  }
  return ret;
}

Aggregate aggregate(const std::vector<InvocationRecord>& aRecords,
                    const std::vector<NodeBusy>&         aBusy,
                    const uint64_t                       aResidual,
                    const double                         aWarmup,
                    const double                         aDuration) {
  if (not(aWarmup >= 0) or not(aDuration > aWarmup)) {
    throw MetricsError(MetricsError::Code::InvalidWindow,
                       "aggregation window requires duration > warmup >= 0");
  }

  Aggregate           ret;
  std::vector<double> myLatencies;
  myLatencies.reserve(aRecords.size());
  for (const auto& myRecord : aRecords) {
    if (myRecord.theArrivalTime < aWarmup) {
      continue;
    }
    myLatencies.emplace_back(myRecord.latency());
    ret.theByteHopsTotal += myRecord.theByteHops;
  }
  if (myLatencies.empty() and not aRecords.empty()) {
    throw MetricsError(MetricsError::Code::EmptyAfterWarmup,
                       "all " + std::to_string(aRecords.size()) +
                           " records arrived within the warm-up window");
  }

  ret.theCount    = myLatencies.size();
  ret.theResidual = aResidual;
  if (not myLatencies.empty()) {
    std::sort(myLatencies.begin(), myLatencies.end());
    // sum in sorted order so the mean is permutation-invariant
    ret.theLatencyMean =
        std::accumulate(myLatencies.begin(), myLatencies.end(), 0.0) /
        static_cast<double>(myLatencies.size());
    ret.theLatencyP50 = nearestRank(myLatencies, 50);
    ret.theLatencyP95 = nearestRank(myLatencies, 95);
    ret.theLatencyP99 = nearestRank(myLatencies, 99);
    ret.theByteHopsPerInvocation = static_cast<double>(ret.theByteHopsTotal) /
                                   static_cast<double>(ret.theCount);
  }

  const auto myWindow = aDuration - aWarmup;
  for (const auto& myBusy : aBusy) {
    ret.theUtilization.emplace_back(
        myBusy.theNode,
        std::clamp(myBusy.within(aWarmup, aDuration) / myWindow, 0.0, 1.0));
  }
  return ret;
}

MetricSummary summarize(std::span<const double> aValues) {
  const auto n = aValues.size();
  if (n < 2) {
    throw MetricsError(MetricsError::Code::TooFewReplications,
                       "at least two replications are needed, got " +
                           std::to_string(n));
  }
  MetricSummary ret;
  ret.theMean =
      std::accumulate(aValues.begin(), aValues.end(), 0.0) / static_cast<double>(n);
  double mySquares = 0;
  for (const auto myValue : aValues) {
    mySquares += (myValue - ret.theMean) * (myValue - ret.theMean);
  }
  ret.theStdDev = std::sqrt(mySquares / static_cast<double>(n - 1));

  const boost::math::students_t myDist(static_cast<double>(n - 1));
  ret.theHalfWidth = boost::math::quantile(myDist, 0.975) * ret.theStdDev /
                     std::sqrt(static_cast<double>(n));
  return ret;
}

const std::vector<std::string>& summaryMetrics() {
  static const std::vector<std::string> myNames{"count",
                                                "latency_mean_s",
                                                "latency_p50_s",
                                                "latency_p95_s",
                                                "latency_p99_s",
                                                "byte_hops_total",
                                                "byte_hops_per_invocation",
                                                "max_node_utilization",
                                                "residual"};
  return myNames;
}

std::vector<double> metricValues(const Aggregate& aAggregate) {
  return {static_cast<double>(aAggregate.theCount),
          aAggregate.theLatencyMean,
          aAggregate.theLatencyP50,
          aAggregate.theLatencyP95,
          aAggregate.theLatencyP99,
          static_cast<double>(aAggregate.theByteHopsTotal),
          aAggregate.theByteHopsPerInvocation,
          aAggregate.maxUtilization(),
          static_cast<double>(aAggregate.theResidual)};
}

ReplicationSummary summarizeReplications(const std::vector<Aggregate>& aAggregates) {
  if (aAggregates.size() < 2) {
    throw MetricsError(MetricsError::Code::TooFewReplications,
                       "at least two replications are needed, got " +
                           std::to_string(aAggregates.size()));
  }
  ReplicationSummary ret;
  ret.theReplications = aAggregates.size();
  const auto M        = summaryMetrics().size();
  for (size_t m = 0; m < M; m++) {
    std::vector<double> myValues;
    for (const auto& myAggregate : aAggregates) {
      myValues.emplace_back(metricValues(myAggregate)[m]);
    }
    ret.theMetrics.emplace_back(summarize(myValues));
  }
  return ret;
}

} // namespace edgesim
