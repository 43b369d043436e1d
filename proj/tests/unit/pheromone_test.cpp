#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "uavsim/pheromone_field.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {
namespace {

TEST (PheromoneFieldTest, EvaporationOnlyScalesEveryCell)
{
  AreaMap map (500, 500, 100);
  PheromoneField f (map);
  f.Deposit ({2, 2}, 3.0);
  f.Deposit ({0, 4}, 1.0);
  f.Step (0.1, 0.0);
  EXPECT_NEAR (f.Value ({2, 2}), 2.7, 1e-12);
  EXPECT_NEAR (f.Value ({0, 4}), 0.9, 1e-12);
  EXPECT_NEAR (f.Total (), 3.6, 1e-12);
}

TEST (PheromoneFieldTest, InteriorDiffusionSplitsEvenly)
{
  AreaMap map (500, 500, 100);
  PheromoneField f (map);
  f.Deposit ({2, 2}, 1.0);
  f.Step (0.0, 0.2);
  EXPECT_NEAR (f.Value ({2, 2}), 0.8, 1e-12);
  for (CellIndex c : {CellIndex{1, 2}, CellIndex{3, 2}, CellIndex{2, 1}, CellIndex{2, 3}})
    {
      EXPECT_NEAR (f.Value (c), 0.05, 1e-12);
    }
  EXPECT_DOUBLE_EQ (f.Value ({1, 1}), 0.0);
}

TEST (PheromoneFieldTest, CornerDiffusionUsesInMapNeighboursOnly)
{
  AreaMap map (500, 500, 100);
  PheromoneField f (map);
  f.Deposit ({0, 0}, 1.0);
  f.Step (0.0, 0.2);
  EXPECT_NEAR (f.Value ({0, 0}), 0.8, 1e-12);
  EXPECT_NEAR (f.Value ({1, 0}), 0.1, 1e-12);
  EXPECT_NEAR (f.Value ({0, 1}), 0.1, 1e-12);
}

TEST (PheromoneFieldTest, DiffusionConservesMass)
{
  AreaMap map (3000, 2000, 100);
  PheromoneField f (map);
  RngStream rng (3, RngStreamId::Test);
  double deposited = 0;
  for (int i = 0; i < 300; ++i)
    {
      CellIndex c{static_cast<int> (rng.Below (30)), static_cast<int> (rng.Below (20))};
      double m = rng.Uniform (0.1, 5.0);
      f.Deposit (c, m);
      deposited += m;
    }
  for (int t = 0; t < 500; ++t)
    {
      f.Step (0.0, 0.006);
    }
  EXPECT_NEAR (f.Total (), deposited, 1e-9 * deposited);
  EXPECT_GE (f.Min (), 0.0);
}

TEST (PheromoneFieldTest, EvaporationAndDiffusionDecayGeometrically)
{
  AreaMap map (1000, 1000, 100);
  PheromoneField f (map);
  f.Deposit ({5, 5}, 10.0);
  for (int t = 0; t < 50; ++t)
    {
      f.Step (0.006, 0.006);
    }
  EXPECT_NEAR (f.Total (), 10.0 * std::pow (0.994, 50), 1e-9);
}

TEST (PheromoneFieldTest, RejectsRatesOutsideUnitInterval)
{
  PheromoneField f (AreaMap (500, 500, 100));
  EXPECT_THROW (f.Step (1.0, 0.0), std::invalid_argument);
  EXPECT_THROW (f.Step (0.0, -0.1), std::invalid_argument);
}

TEST (PheromoneMaskTest, ZeroesEffectiveValueWithoutTouchingStored)
{
  AreaMap map;
  PheromoneField f (map);
  f.Deposit ({30, 30}, 2.0);
  // Route runs along +y, so the long side lies along x.
  auto res = f.ApplyMask (7, map.CellCenter ({30, 30}), {0, 1}, 300, 0.0, 10.0);
  EXPECT_FALSE (res.replaced);
  EXPECT_FALSE (res.degenerateAxis);
  EXPECT_NEAR (std::abs (res.longAxis.x), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ (f.Value ({30, 30}), 2.0);
  EXPECT_DOUBLE_EQ (f.EffectiveValue ({30, 30}), 0.0);
  EXPECT_TRUE (f.IsMasked ({33, 31}));
  EXPECT_FALSE (f.IsMasked ({30, 32}));
  // 600 m x 300 m around a cell center: 7 columns by 3 rows of centers.
  EXPECT_EQ (f.Masks ().at (7).cells.size (), 21u);
}

TEST (PheromoneMaskTest, ReplaceAndRemove)
{
  AreaMap map;
  PheromoneField f (map);
  f.ApplyMask (1, {3050, 3050}, {1, 0}, 200, 0.0, 0.0);
  auto second = f.ApplyMask (1, {1050, 1050}, {1, 0}, 200, 0.0, 1.0);
  EXPECT_TRUE (second.replaced);
  EXPECT_FALSE (f.IsMasked ({30, 30}));
  EXPECT_TRUE (f.IsMasked ({10, 10}));
  EXPECT_TRUE (f.RemoveMask (1));
  EXPECT_FALSE (f.RemoveMask (1));
  EXPECT_FALSE (f.IsMasked ({10, 10}));
}

TEST (PheromoneMaskTest, OverlappingMasksClearIndependently)
{
  AreaMap map;
  PheromoneField f (map);
  f.ApplyMask (1, {3050, 3050}, {0, 1}, 300, 0.0, 0.0);
  f.ApplyMask (2, {3150, 3050}, {0, 1}, 300, 0.0, 0.0);
  f.RemoveMask (1);
  EXPECT_TRUE (f.IsMasked ({31, 30}));
}

TEST (PheromoneMaskTest, ZeroAxisFallsBackToHeading)
{
  AreaMap map;
  PheromoneField f (map);
  auto res = f.ApplyMask (4, {3050, 3050}, {0, 0}, 200, 0.0, 0.0);
  EXPECT_TRUE (res.degenerateAxis);
  // Heading +x is taken as the route direction, so the long side is along y.
  EXPECT_NEAR (std::abs (res.longAxis.y), 1.0, 1e-12);
  EXPECT_THROW (f.ApplyMask (4, {3050, 3050}, {1, 0}, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST (LocalPheromoneMapTest, DecaysSinceObservationAndKeepsNewest)
{
  AreaMap map (1000, 1000, 100);
  LocalPheromoneMap local (map);
  EXPECT_FALSE (local.Known ({1, 1}));
  EXPECT_DOUBLE_EQ (local.Value ({1, 1}, 0, 0.1), 0.0);
  local.Observe ({1, 1}, 4.0, 10);
  local.Observe ({1, 1}, 9.0, 5); // older report ignored
  EXPECT_TRUE (local.Known ({1, 1}));
  EXPECT_NEAR (local.Value ({1, 1}, 12, 0.1), 4.0 * 0.81, 1e-6);
  local.Observe ({-1, 3}, 1.0, 0); // off-map, ignored
}

} // namespace
} // namespace uavsim
