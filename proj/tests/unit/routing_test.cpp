#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "route_oracle.hpp"
#include "uavsim/routing.hpp"

namespace uavsim {
namespace {

SelectionParams
DefaultParams ()
{
  return SelectionParams{};
}

Candidate
Cand (std::vector<NodeId> nodes, int il, double rlt = 100, double en = 50)
{
  Candidate c;
  c.metrics.hc = static_cast<int> (nodes.size ()) - 1;
  c.metrics.il = il;
  c.metrics.rltS = rlt;
  c.metrics.enR = en;
  c.nodes = std::move (nodes);
  return c;
}

TEST (RouteCostTest, HandComputedValues)
{
  // HC 6 against HC_min 4, IL 5 against IL_min 2, alpha 0.3:
  // 0.5 * 1.5 + 0.5 * 5 / 3.5.
  RouteMetrics m{6, 5, 100, 50};
  EXPECT_NEAR (RouteCost (m, 4, 2, 0.5, 0.5, 0.3), 0.75 + 0.5 * 5.0 / 3.5, 1e-12);
  RouteMetrics best{4, 2, 100, 50};
  EXPECT_NEAR (RouteCost (best, 4, 2, 0.5, 0.5, 0.3), 0.5 + 0.5 * 2.0 / 2.6, 1e-12);
  RouteMetrics w{3, 0, 10, 10};
  EXPECT_NEAR (RouteCost (w, 3, 0, 0.7, 0.3, 0.3), 0.7 + 0.3 / 1.3, 1e-12);
  EXPECT_THROW (RouteCost (m, 0, 2, 0.5, 0.5, 0.3), std::invalid_argument);
}

TEST (RouteCostTest, ZeroInterferenceOnCandidateWithPositiveMinimum)
{
  // IL 0 with IL_min 0 uses the limit; IL 0 with IL_min > 0 is plainly 0.
  RouteMetrics quiet{5, 0, 100, 50};
  EXPECT_NEAR (RouteCost (quiet, 5, 1, 0.5, 0.5, 0.3), 0.5, 1e-12);
}

TEST (FeasibleTest, StrictInequalities)
{
  EXPECT_FALSE (Feasible ({3, 0, 3.0, 50}, 3.0, 10, 0.02));
  EXPECT_TRUE (Feasible ({3, 0, 3.0001, 50}, 3.0, 10, 0.02));
  EXPECT_FALSE (Feasible ({3, 0, 100, 10.02}, 3.0, 10, 0.02));
  EXPECT_TRUE (Feasible ({3, 0, 100, 10.03}, 3.0, 10, 0.02));
}

TEST (RouteMetricsTest, MinimaAlongRoute)
{
  LinkGraph g;
  g.AddNode (0, 100, 1);
  g.AddNode (1, 40, 2);
  g.AddNode (2, 70, 0);
  g.AddNode (3, 55, 3);
  g.AddLink (3, 2, 12.5);
  g.AddLink (2, 1, 7.0);
  g.AddLink (1, 0, 30.0);
  std::vector<NodeId> r{3, 2, 1, 0};
  auto m = MeasureRoute (r, g);
  EXPECT_EQ (m.hc, 3);
  EXPECT_EQ (m.il, 6);
  EXPECT_DOUBLE_EQ (m.rltS, 7.0);
  EXPECT_DOUBLE_EQ (m.enR, 40.0);
  g.RemoveLink (2, 1);
  EXPECT_DOUBLE_EQ (RouteLifetime (r, g), 0.0);
}

TEST (RouteEnergyTest, DeadNodeOnRouteIsALogicError)
{
  std::vector<double> en{100, 30, 60};
  std::vector<char> alive{1, 1, 1};
  std::vector<NodeId> r{2, 1, 0};
  EXPECT_DOUBLE_EQ (RouteEnergy (r, en, alive), 30.0);
  alive[1] = 0;
  EXPECT_THROW (RouteEnergy (r, en, alive), std::logic_error);
}

TEST (SelectActiveRouteTest, SlackWindowAndCost)
{
  auto p = DefaultParams ();
  std::vector<Candidate> c{
      Cand ({9, 1, 0}, 6),                      // HC 2, noisy
      Cand ({9, 2, 3, 0}, 1),                   // HC 3, quiet
      Cand ({9, 4, 5, 6, 7, 8, 10, 0}, 0),      // HC 7, outside slack
      Cand ({9, 11, 0}, 0, 2.0),                // infeasible lifetime
  };
  auto pick = SelectActiveRoute (c, p);
  ASSERT_TRUE (pick.has_value ());
  // Costs: HC 2 -> 0.5 + 0.5*6/(1+1.8) = 1.571; HC 3 -> 0.75 + 0.5/1.3 = 1.135.
  EXPECT_EQ (*pick, 1u);
}

TEST (SelectActiveRouteTest, TieBreaksToLexicographicallySmallerPath)
{
  auto p = DefaultParams ();
  std::vector<Candidate> c{Cand ({9, 5, 0}, 1), Cand ({9, 3, 0}, 1)};
  EXPECT_EQ (SelectActiveRoute (c, p), 1u);
  std::vector<Candidate> none{Cand ({9, 3, 0}, 1, 1.0)};
  EXPECT_FALSE (SelectActiveRoute (none, p).has_value ());
}

TEST (LinkGraphTest, InducedKeepsOnlyInternalLinks)
{
  LinkGraph g;
  g.AddLink (1, 2, 10);
  g.AddLink (2, 3, 20);
  g.AddLink (3, 4, 30);
  auto sub = g.Induced ({2, 3, 4});
  EXPECT_FALSE (sub.HasNode (1));
  EXPECT_FALSE (sub.HasLink (1, 2));
  EXPECT_TRUE (sub.HasLink (3, 2));
  EXPECT_EQ (sub.Llt (4, 3), 30.0);
  EXPECT_EQ (g.Neighbors (2), (std::vector<NodeId>{1, 3}));
}

TEST (FormPipeTest, RouteNodesPlusTwoHops)
{
  // Chain 0-1-2-3-4-5-6 with the route {2, 1, 0}: node 4 is two hops from
  // node 2, node 5 is three.
  LinkGraph g;
  for (int i = 0; i < 6; ++i)
    {
      g.AddLink (i, i + 1, 50);
    }
  std::vector<NodeId> route{2, 1, 0};
  auto pipe = FormPipe (route, g, 12.0);
  EXPECT_EQ (pipe.members, (std::set<NodeId>{0, 1, 2, 3, 4}));
  EXPECT_TRUE (pipe.graph.HasLink (3, 4));
  EXPECT_FALSE (pipe.graph.HasNode (5));
  EXPECT_DOUBLE_EQ (pipe.builtAt, 12.0);
}

TEST (EnumeratePipeRoutesTest, MatchesExhaustiveFeasibleSetWithinSlack)
{
  RngStream rng (21, RngStreamId::Test);
  auto p = DefaultParams ();
  for (int k = 0; k < 100; ++k)
    {
      int n = 4 + static_cast<int> (rng.Below (9));
      auto g = oracle::RandomGeometricGraph (n, 1000, 450, rng);
      NodeId src = n - 1;
      auto got = EnumeratePipeRoutes (g, src, 0, p);
      auto want = oracle::FeasiblePaths (g, src, 0, p);
      if (!want.empty ())
        {
          int hcMin = want.front ().hc;
          for (const auto &w : want)
            hcMin = std::min (hcMin, w.hc);
          std::erase_if (want, [&] (const auto &w) { return w.hc > hcMin + p.hcSlack; });
        }
      std::vector<std::vector<NodeId>> a, b;
      for (const auto &c : got)
        a.push_back (c.nodes);
      for (const auto &w : want)
        b.push_back (w.nodes);
      std::sort (a.begin (), a.end ());
      std::sort (b.begin (), b.end ());
      EXPECT_EQ (a, b) << "k=" << k;
    }
}

TEST (SelectPipeRouteTest, AgreesWithOracleOnRandomGraphs)
{
  RngStream rng (5, RngStreamId::Test);
  auto p = DefaultParams ();
  for (int k = 0; k < 150; ++k)
    {
      int n = 3 + static_cast<int> (rng.Below (13));
      auto g = oracle::RandomGeometricGraph (n, 1000, 420, rng);
      auto want = oracle::BestPath (g, n - 1, 0, p);
      auto got = SelectPipeRoute (g, n - 1, 0, p);
      ASSERT_EQ (got.has_value (), want.has_value ()) << "k=" << k;
      if (want)
        {
          EXPECT_EQ (got->nodes, want->nodes) << "k=" << k;
          EXPECT_EQ (got->metrics.il, want->il);
          EXPECT_DOUBLE_EQ (got->metrics.rltS, want->rlt);
        }
    }
}

TEST (SelectPipeRouteTest, VisitBudgetOnlyAppliesToLargePipes)
{
  // A 4x4 grid has many equal-length paths; with the budget disabled by a
  // high size threshold, the result equals the oracle.
  LinkGraph g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      {
        int id = r * 4 + c;
        g.AddNode (id, 50, (id * 7) % 5);
        if (c > 0)
          g.AddLink (id, id - 1, 40);
        if (r > 0)
          g.AddLink (id, id - 4, 40);
      }
  auto p = DefaultParams ();
  auto want = oracle::BestPath (g, 15, 0, p);
  auto got = SelectPipeRoute (g, 15, 0, p, {1, 100});
  ASSERT_TRUE (want && got);
  EXPECT_EQ (got->nodes, want->nodes);
}

TEST (MaybeSwitchTest, KeepsHealthyShortestRoute)
{
  LinkGraph g;
  g.AddLink (2, 1, 100);
  g.AddLink (1, 0, 100);
  g.AddLink (2, 3, 100);
  g.AddLink (3, 0, 100);
  for (int i = 0; i < 4; ++i)
    g.AddNode (i, 50, 0);
  PipeTopology pipe{{0, 1, 2, 3}, g, 0};
  std::vector<NodeId> cur{2, 1, 0};
  auto d = MaybeSwitch (cur, pipe, 0, DefaultParams ());
  EXPECT_EQ (d.action, SwitchAction::Keep);
  EXPECT_EQ (d.trigger, SwitchTrigger::None);
  EXPECT_EQ (d.current.hc, 2);
}

TEST (MaybeSwitchTest, LifetimeTriggerSwitchesToAlternate)
{
  LinkGraph g;
  for (int i = 0; i < 4; ++i)
    g.AddNode (i, 50, 0);
  g.AddLink (2, 1, 2.0); // about to break
  g.AddLink (1, 0, 100);
  g.AddLink (2, 3, 100);
  g.AddLink (3, 0, 100);
  PipeTopology pipe{{0, 1, 2, 3}, g, 0};
  std::vector<NodeId> cur{2, 1, 0};
  auto d = MaybeSwitch (cur, pipe, 0, DefaultParams ());
  EXPECT_EQ (d.trigger, SwitchTrigger::Lifetime);
  EXPECT_EQ (d.action, SwitchAction::Switched);
  EXPECT_EQ (d.route.nodes, (std::vector<NodeId>{2, 3, 0}));
}

TEST (MaybeSwitchTest, EnergyAndShorterTriggers)
{
  LinkGraph g;
  for (int i = 0; i < 5; ++i)
    g.AddNode (i, 50, 0);
  g.AddLink (4, 3, 100);
  g.AddLink (3, 2, 100);
  g.AddLink (2, 0, 100);
  g.AddLink (4, 1, 100);
  g.AddLink (1, 0, 100);
  PipeTopology pipe{{0, 1, 2, 3, 4}, g, 0};
  std::vector<NodeId> longer{4, 3, 2, 0};
  auto d = MaybeSwitch (longer, pipe, 0, DefaultParams ());
  EXPECT_EQ (d.trigger, SwitchTrigger::Shorter);
  EXPECT_EQ (d.route.nodes, (std::vector<NodeId>{4, 1, 0}));

  pipe.graph.AddNode (1, 9.0, 0);
  std::vector<NodeId> viaWeak{4, 1, 0};
  auto e = MaybeSwitch (viaWeak, pipe, 0, DefaultParams ());
  EXPECT_EQ (e.trigger, SwitchTrigger::Energy);
  EXPECT_EQ (e.route.nodes, (std::vector<NodeId>{4, 3, 2, 0}));
}

TEST (MaybeSwitchTest, NothingFeasibleAsksForRediscovery)
{
  LinkGraph g;
  g.AddNode (0, 50, 0);
  g.AddNode (1, 50, 0);
  g.AddLink (1, 0, 1.0);
  PipeTopology pipe{{0, 1}, g, 0};
  std::vector<NodeId> cur{1, 0};
  EXPECT_EQ (MaybeSwitch (cur, pipe, 0, DefaultParams ()).action, SwitchAction::Rediscover);
  EXPECT_EQ (MaybeSwitch ({}, pipe, 0, DefaultParams ()).action, SwitchAction::Rediscover);
}

// Ten nodes on a line at 300 m spacing, node 0 the BS.
struct LineWorld
{
  std::vector<Vec2> pos;
  std::vector<char> alive;
  std::vector<double> energy;
  std::vector<int> il;
  std::vector<std::vector<NodeId>> adj;
  DiscoveryWorld world;

  explicit LineWorld (int n)
  {
    for (int i = 0; i < n; ++i)
      {
        pos.push_back ({300.0 * i, 0});
        alive.push_back (1);
        energy.push_back (80);
        il.push_back (i % 3);
      }
    adj.resize (n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && Distance (pos[i], pos[j]) <= 700)
          adj[i].push_back (j);
    world.positions = pos;
    world.alive = alive;
    world.energy = energy;
    world.il = il;
    world.adjacency = &adj;
    world.llt = [] (NodeId, NodeId) { return std::optional<double> (100.0); };
    world.bs = 0;
  }
};

TEST (DiscoverRouteTest, AodvReturnsFirstArrival)
{
  LineWorld w (10);
  DiscoveryParams dp;
  dp.mode = DiscoveryMode::Aodv;
  dp.jitterS = 0.0;
  RngStream jitter (1, RngStreamId::Test);
  auto res = DiscoverRoute (9, w.world, dp, jitter);
  ASSERT_EQ (res.candidates.size (), 1u);
  const auto &r = res.candidates.front ().nodes;
  EXPECT_EQ (r.front (), 9);
  EXPECT_EQ (r.back (), 0);
  // Two-hop jumps of 600 m are possible, so the shortest is five hops.
  EXPECT_EQ (res.candidates.front ().metrics.hc, 5);
}

TEST (DiscoverRouteTest, GatedFloodDropsShortLivedAndWeakLinks)
{
  LineWorld w (6);
  w.world.llt = [] (NodeId rx, NodeId tx) {
    return (rx == 3 || tx == 3) ? std::optional<double> (2.0) : std::optional<double> (50.0);
  };
  w.energy[2] = 5.0;
  DiscoveryParams dp;
  RngStream jitter (2, RngStreamId::Test);
  auto res = DiscoverRoute (5, w.world, dp, jitter);
  for (const auto &c : res.candidates)
    {
      for (NodeId n : c.nodes)
        {
          EXPECT_NE (n, 3);
          EXPECT_NE (n, 2);
        }
    }
  EXPECT_TRUE (res.candidates.empty ()); // 3 and 2 together cut the line
}

TEST (DiscoverRouteTest, DirectionalGateBlocksBacktracking)
{
  LineWorld w (6);
  DiscoveryParams dp;
  dp.slackM = 0.0;
  RngStream jitter (3, RngStreamId::Test);
  auto res = DiscoverRoute (3, w.world, dp, jitter);
  ASSERT_FALSE (res.candidates.empty ());
  for (const auto &c : res.candidates)
    {
      for (std::size_t i = 1; i < c.nodes.size (); ++i)
        {
          EXPECT_LT (c.nodes[i], c.nodes[i - 1]); // always strictly closer to the BS
        }
    }
}

TEST (DiscoverRouteTest, DeadOrBsSourceFindsNothing)
{
  LineWorld w (4);
  DiscoveryParams dp;
  RngStream jitter (4, RngStreamId::Test);
  EXPECT_TRUE (DiscoverRoute (0, w.world, dp, jitter).candidates.empty ());
  w.alive[3] = 0;
  EXPECT_TRUE (DiscoverRoute (3, w.world, dp, jitter).candidates.empty ());
}

} // namespace
} // namespace uavsim
