#include <gtest/gtest.h>

#include <map>

#include "uavsim/topology_control.hpp"

namespace uavsim {
namespace {

TEST (TcStepTest, ThinNodesAskForMasksAndFatOnesRelease)
{
  // Route 5 -> 4 -> 3 -> 0 along +y.
  std::vector<NodeId> route{5, 4, 3, 0};
  std::map<NodeId, std::vector<NodeId>> nb{
      {5, {4, 7}},             // one off-route neighbour
      {4, {5, 3, 8, 9, 10}},   // three off-route
      {3, {4, 0, 11, 12}},     // exactly two
  };
  std::map<NodeId, Vec2> pos{{5, {0, 3000}}, {4, {0, 2000}}, {3, {0, 1000}}, {0, {0, 0}}};
  auto d = TcStep (
      route, [&] (NodeId n) { return nb[n]; }, [&] (NodeId n) { return pos[n]; }, 2);
  ASSERT_EQ (d.size (), 3u); // the BS end is not evaluated
  EXPECT_EQ (d[0].owner, 5);
  EXPECT_TRUE (d[0].apply);
  EXPECT_EQ (d[0].offRouteDegree, 1);
  EXPECT_FALSE (d[1].apply);
  EXPECT_EQ (d[1].offRouteDegree, 3);
  EXPECT_TRUE (d[2].apply);
  EXPECT_EQ (d[2].offRouteDegree, 2);
  // Interior axis runs upstream to downstream.
  EXPECT_EQ (d[2].axis, (Vec2{0, -2000}));
  // The source looks two hops ahead.
  EXPECT_EQ (d[0].axis, (Vec2{0, -2000}));
}

TEST (TcStepTest, OneHopRouteAndEmptyRoute)
{
  std::vector<NodeId> route{2, 0};
  auto d = TcStep (
      route, [] (NodeId) { return std::vector<NodeId>{0}; },
      [] (NodeId n) { return n == 0 ? Vec2{0, 0} : Vec2{500, 0}; }, 2);
  ASSERT_EQ (d.size (), 1u);
  EXPECT_TRUE (d[0].apply);
  EXPECT_EQ (d[0].axis, (Vec2{-500, 0}));
  EXPECT_TRUE (TcStep ({}, [] (NodeId) { return std::vector<NodeId>{}; }, [] (NodeId) { return Vec2{}; }, 2)
                   .empty ());
}

} // namespace
} // namespace uavsim
