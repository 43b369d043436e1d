#include <gtest/gtest.h>

#include <sstream>

#include "uavsim/engine.hpp"

namespace uavsim {
namespace {

SimConfig
ShortConfig (int uavs = 20)
{
  SimConfig c;
  c.nUavs = uavs;
  c.warmupS = 150;
  c.measureS = 150;
  c.dataRateBps = 1e6;
  return c;
}

std::string
CsvOf (const MetricsReport &r)
{
  std::ostringstream os;
  WriteMetricsHeader (os);
  WriteMetricsRow (os, r);
  return os.str ();
}

TEST (EngineTest, SameSeedSameBytes)
{
  auto s = MakeScenario ("C3", Scheme::TcPipe, ShortConfig ());
  auto a = RunScenario (s, 5);
  auto b = RunScenario (s, 5);
  EXPECT_EQ (CsvOf (a), CsvOf (b));
  auto c = RunScenario (s, 6);
  EXPECT_NE (CsvOf (a), CsvOf (c));
}

TEST (EngineTest, EveryTargetHasAFlowAfterWarmup)
{
  auto s = MakeScenario ("C4", Scheme::Pipe, ShortConfig ());
  World w (s, 2);
  w.RunUntil (s.config.warmupS + 1.0);
  ASSERT_EQ (w.FlowCount (), 3);
  std::set<NodeId> sources;
  for (int f = 0; f < w.FlowCount (); ++f)
    {
      auto v = w.Flow (f);
      EXPECT_NE (v.source, kNoNode);
      EXPECT_EQ (w.Nodes ()[v.source].role, Role::TargetUav);
      sources.insert (v.source);
    }
  EXPECT_EQ (sources.size (), 3u);
}

TEST (EngineTest, PacketsConservedPerFlowThroughoutTheRun)
{
  auto s = MakeScenario ("C4", Scheme::TcPipe, ShortConfig (), 20);
  World w (s, 3);
  while (w.Now () < s.config.TotalS () - 1e-9)
    {
      w.RunUntil (w.Now () + 25.0);
      for (int f = 0; f < w.FlowCount (); ++f)
        {
          EXPECT_TRUE (w.Flow (f).counts.Conserved ()) << "flow " << f << " t=" << w.Now ();
        }
    }
  auto r = w.Report ();
  EXPECT_TRUE (r.totals.Conserved ());
  EXPECT_GT (r.totals.generated, 0);
}

TEST (EngineTest, DeadNodesVanishFromNeighbourTables)
{
  auto s = MakeScenario ("C1", Scheme::Pipe, ShortConfig (), 30);
  World w (s, 4);
  w.RunUntil (s.config.TotalS ());
  const auto &plan = w.Failures ();
  ASSERT_EQ (plan.events.size (), 6u);
  for (const auto &e : plan.events)
    {
      EXPECT_FALSE (w.Nodes ()[e.node].alive);
      for (std::size_t n = 0; n < w.Nodes ().size (); ++n)
        {
          if (w.Nodes ()[n].alive)
            {
              EXPECT_FALSE (w.Table (static_cast<NodeId> (n)).Contains (e.node));
            }
        }
      for (int f = 0; f < w.FlowCount (); ++f)
        {
          EXPECT_NE (w.Flow (f).source, e.node); // target UAVs never fail
        }
    }
}

TEST (EngineTest, RelaySchemeReportsNoRouteBreaks)
{
  auto s = MakeScenario ("C4", Scheme::Relay, ShortConfig (), 30);
  auto r = RunScenario (s, 7);
  for (const auto &f : r.flows)
    {
      EXPECT_EQ (f.routeBreaks, 0);
    }
  EXPECT_DOUBLE_EQ (r.routeBreaks, 0.0);
}

TEST (EngineTest, MetricsStayInRange)
{
  auto s = MakeScenario ("C1", Scheme::Aodv, ShortConfig ());
  auto r = RunScenario (s, 1);
  EXPECT_GE (r.pdr, 0.0);
  EXPECT_LE (r.pdr, 1.0);
  EXPECT_GE (r.routeUpPct, 0.0);
  EXPECT_LE (r.routeUpPct, 100.0);
  EXPECT_GT (r.cvFull, 0.0);
  EXPECT_LE (r.cvFull, 100.0);
  EXPECT_GE (r.fairness, 1.0 / s.config.Map ().CellCount ());
  EXPECT_LE (r.fairness, 1.0);
  EXPECT_GE (r.cvFull + 1e-9, r.cvWindow);
}

TEST (EngineTest, PheromoneNeverNegative)
{
  auto s = MakeScenario ("C2", Scheme::TcPipe, ShortConfig ());
  World w (s, 9);
  w.RunUntil (200);
  EXPECT_GE (w.Field ().Min (), 0.0);
  EXPECT_GT (w.Field ().Total (), 0.0);
}

TEST (EngineTest, BatchKeepsInputOrderAndMatchesSingleRuns)
{
  auto s = MakeScenario ("C3", Scheme::Pipe, ShortConfig (12));
  std::vector<RunSpec> specs{{s, 2}, {s, 1}};
  auto reports = RunBatch (specs, 2);
  ASSERT_EQ (reports.size (), 2u);
  EXPECT_EQ (reports[0].key.seed, 2u);
  EXPECT_EQ (CsvOf (reports[1]), CsvOf (RunScenario (s, 1)));
}

} // namespace
} // namespace uavsim
