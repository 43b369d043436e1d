#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {
namespace {

// Brute force over every cell of the map, with the projection written out
// by hand instead of going through InOrientedRect.
std::vector<CellIndex>
BruteRect (Vec2 center, double longM, double shortM, Vec2 axis, const AreaMap &map)
{
  double n = std::hypot (axis.x, axis.y);
  Vec2 u{axis.x / n, axis.y / n};
  std::vector<CellIndex> out;
  for (int c = 0; c < map.Cols (); ++c)
    {
      for (int r = 0; r < map.Rows (); ++r)
        {
          double px = (c + 0.5) * map.CellSize () - center.x;
          double py = (r + 0.5) * map.CellSize () - center.y;
          double along = px * u.x + py * u.y;
          double across = -px * u.y + py * u.x;
          if (std::abs (along) <= longM / 2 + 1e-9 && std::abs (across) <= shortM / 2 + 1e-9)
            {
              out.push_back ({c, r});
            }
        }
    }
  return out;
}

TEST (AreaMapTest, DimensionsFromCellSize)
{
  AreaMap map (6000, 6000, 100);
  EXPECT_EQ (map.Cols (), 60);
  EXPECT_EQ (map.Rows (), 60);
  EXPECT_EQ (map.CellCount (), 3600);
  EXPECT_THROW (AreaMap (6000, 6000, 70), std::invalid_argument);
  EXPECT_THROW (AreaMap (0, 6000, 100), std::invalid_argument);
}

TEST (AreaMapTest, FlatRoundTrip)
{
  AreaMap map (600, 400, 100);
  for (int i = 0; i < map.CellCount (); ++i)
    {
      EXPECT_EQ (map.Flat (map.Unflat (i)), i);
    }
}

TEST (CellOfTest, InteriorAndSharedEdges)
{
  AreaMap map;
  EXPECT_EQ (CellOf ({50, 50}, map), (CellIndex{0, 0}));
  EXPECT_EQ (CellOf ({0, 0}, map), (CellIndex{0, 0}));
  // A point on the edge between columns 0 and 1 belongs to column 0.
  EXPECT_EQ (CellOf ({100, 250}, map), (CellIndex{0, 2}));
  EXPECT_EQ (CellOf ({100.000001, 250}, map), (CellIndex{1, 2}));
  EXPECT_EQ (CellOf ({6000, 6000}, map), (CellIndex{59, 59}));
}

TEST (CellOfTest, OffMapThrowsNamingAxis)
{
  AreaMap map;
  try
    {
      CellOf ({-1, 10}, map);
      FAIL () << "expected out_of_range";
    }
  catch (const std::out_of_range &e)
    {
      EXPECT_NE (std::string (e.what ()).find ("x=-1"), std::string::npos);
    }
  EXPECT_THROW (CellOf ({10, 6000.5}, map), std::out_of_range);
}

TEST (OrientedRectTest, AxisAlignedCellCount)
{
  AreaMap map;
  // 600 m x 300 m centered on a cell center covers 6 x 3 centers... plus the
  // boundary ones at exactly +-300 and +-150 m, which do not fall on centers.
  auto cells = CellsInOrientedRect ({3050, 3050}, 600, 300, {1, 0}, map);
  EXPECT_EQ (cells.size (), 7u * 3u);
}

TEST (OrientedRectTest, MatchesBruteForceAtRandomAngles)
{
  AreaMap map (2000, 2000, 100);
  RngStream rng (7, RngStreamId::Test);
  for (int k = 0; k < 200; ++k)
    {
      Vec2 c{rng.Uniform (0, 2000), rng.Uniform (0, 2000)};
      double th = rng.Uniform (0, 2 * std::numbers::pi);
      double l = rng.Uniform (50, 800);
      Vec2 axis{std::cos (th), std::sin (th)};
      EXPECT_EQ (CellsInOrientedRect (c, 2 * l, l, axis, map), BruteRect (c, 2 * l, l, axis, map)) << "k=" << k;
    }
}

TEST (OrientedRectTest, ResultSortedAndClippedToMap)
{
  AreaMap map;
  auto cells = CellsInOrientedRect ({0, 0}, 1000, 500, {1, 1}, map);
  ASSERT_FALSE (cells.empty ());
  EXPECT_TRUE (std::is_sorted (cells.begin (), cells.end ()));
  for (const auto &c : cells)
    {
      EXPECT_TRUE (map.InBounds (c));
    }
}

TEST (OrientedRectTest, RejectsDegenerateInput)
{
  AreaMap map;
  EXPECT_THROW (CellsInOrientedRect ({100, 100}, 200, 100, {0, 0}, map), std::invalid_argument);
  EXPECT_THROW (CellsInOrientedRect ({100, 100}, 0, 100, {1, 0}, map), std::invalid_argument);
}

TEST (OrientedRectTest, PointTestAgreesWithCellList)
{
  AreaMap map;
  Vec2 center{2500, 2500};
  Vec2 axis = FromHeading (0.3);
  auto cells = CellsInOrientedRect (center, 800, 400, axis, map);
  for (const auto &c : cells)
    {
      EXPECT_TRUE (InOrientedRect (map.CellCenter (c), center, 800, 400, axis));
    }
}

} // namespace
} // namespace uavsim
