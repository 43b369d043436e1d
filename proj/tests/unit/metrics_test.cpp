#include <gtest/gtest.h>

#include <sstream>

#include "uavsim/metrics.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {
namespace {

TEST (PdrTest, DeliveredOverGenerated)
{
  EXPECT_FALSE (Pdr ({}).has_value ());
  EXPECT_DOUBLE_EQ (*Pdr ({200, 150, 30, 10, 10}), 0.75);
}

TEST (FlowCountsTest, Conservation)
{
  EXPECT_TRUE ((FlowCounts{10, 4, 3, 2, 1}).Conserved ());
  EXPECT_FALSE ((FlowCounts{10, 4, 3, 2, 0}).Conserved ());
}

TEST (RouteUpPercentTest, UnionClippedToWindow)
{
  // [900, 1100] clips to 100 s, [1050, 1200] overlaps it, [2900, 3100]
  // clips to 100 s: 200 + 100 over 2000.
  std::vector<std::pair<double, double>> up{{900, 1100}, {1050, 1200}, {2900, 3100}};
  EXPECT_NEAR (RouteUpPercent (up, 1000, 3000), 15.0, 1e-12);
  EXPECT_DOUBLE_EQ (RouteUpPercent ({}, 1000, 3000), 0.0);
  EXPECT_NEAR (RouteUpPercent ({{0, 5000}}, 1000, 3000), 100.0, 1e-12);
  EXPECT_THROW (RouteUpPercent ({}, 5, 5), std::invalid_argument);
}

TEST (JainIndexTest, HandValues)
{
  std::vector<double> even{3, 3, 3, 3};
  EXPECT_NEAR (JainIndex (even), 1.0, 1e-12);
  std::vector<double> one{0, 0, 7, 0};
  EXPECT_NEAR (JainIndex (one), 0.25, 1e-12);
  std::vector<double> mixed{1, 2, 3};
  EXPECT_NEAR (JainIndex (mixed), 36.0 / 42.0, 1e-12);
  EXPECT_DOUBLE_EQ (JainIndex (std::vector<double> (5, 0.0)), 0.0);
}

TEST (JainIndexTest, BoundedByOneOverNAndOne)
{
  RngStream rng (9, RngStreamId::Test);
  for (int k = 0; k < 500; ++k)
    {
      int n = 1 + static_cast<int> (rng.Below (50));
      std::vector<double> x (n);
      for (auto &v : x)
        {
          v = rng.Uniform () < 0.3 ? 0.0 : rng.Uniform (0, 10);
        }
      x[rng.Below (n)] += 1.0;
      double j = JainIndex (x);
      EXPECT_GE (j, 1.0 / n - 1e-12);
      EXPECT_LE (j, 1.0 + 1e-12);
    }
}

TEST (CoverageTest, VisitedShareMeanScansAndFairness)
{
  std::vector<std::uint32_t> scans{0, 2, 0, 4};
  auto st = CoverageAndFairness (scans);
  EXPECT_DOUBLE_EQ (st.cvPercent, 50.0);
  EXPECT_DOUBLE_EQ (st.vf, 1.5);
  EXPECT_NEAR (st.fairness, 36.0 / (4.0 * 20.0), 1e-12);
  EXPECT_FALSE (st.allZero);
  auto z = CoverageAndFairness (std::vector<std::uint32_t> (9, 0));
  EXPECT_TRUE (z.allZero);
  EXPECT_DOUBLE_EQ (z.fairness, 0.0);
}

MetricsReport
SampleReport (double pdr, double up, std::uint64_t seed)
{
  MetricsReport r;
  r.key = {"C1", "tcpipe", 50, 20, 2e6, 0, seed};
  FlowReport f;
  f.flow = 0;
  f.counts = {100, static_cast<long> (100 * pdr), 100 - static_cast<long> (100 * pdr), 0, 0};
  f.pdr = pdr;
  f.routeBreaks = 4;
  f.routeUpPct = up;
  f.avgRouteLength = 8;
  r.flows.push_back (f);
  r.cvWindow = 40;
  r.fairness = 0.5;
  r.Aggregate ();
  return r;
}

TEST (MetricsReportTest, AggregateAndAverage)
{
  std::vector<MetricsReport> runs{SampleReport (0.6, 80, 1), SampleReport (0.8, 90, 2)};
  EXPECT_DOUBLE_EQ (runs[0].pdr, 0.6);
  EXPECT_DOUBLE_EQ (runs[0].routeBreaks, 4.0);
  auto avg = Average (runs);
  EXPECT_EQ (avg.runs, 2);
  EXPECT_NEAR (avg.pdr, 0.7, 1e-12);
  EXPECT_NEAR (avg.routeUpPct, 85.0, 1e-12);
  EXPECT_EQ (avg.totals.generated, 200 / 2);
  ASSERT_EQ (avg.flows.size (), 1u);
  EXPECT_NEAR (*avg.flows[0].pdr, 0.7, 1e-12);
  EXPECT_THROW (Average (std::span<const MetricsReport> ()), std::invalid_argument);
}

TEST (MetricsCsvTest, RoundTripAggregates)
{
  auto r = SampleReport (0.55, 72.5, 3);
  std::stringstream ss;
  WriteMetricsHeader (ss);
  WriteMetricsRow (ss, r);
  auto back = ReadMetricsCsv (ss);
  ASSERT_EQ (back.size (), 1u);
  EXPECT_EQ (back[0].key.scenario, "C1");
  EXPECT_EQ (back[0].key.seed, 3u);
  EXPECT_EQ (back[0].flows.size (), 1u);
  EXPECT_NEAR (back[0].pdr, 0.55, 1e-6);
  EXPECT_NEAR (back[0].routeUpPct, 72.5, 1e-4);
  EXPECT_EQ (back[0].totals.generated, 100);

  std::stringstream bad ("scenario,scheme\nC1,aodv\n");
  EXPECT_THROW (ReadMetricsCsv (bad), std::invalid_argument);
}

} // namespace
} // namespace uavsim
