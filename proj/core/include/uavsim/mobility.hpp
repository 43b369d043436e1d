#ifndef UAVSIM_MOBILITY_HPP
#define UAVSIM_MOBILITY_HPP

#include <span>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/pheromone_field.hpp"

namespace uavsim {

enum class Role
{
  Searcher,
  TargetUav,
  Relay,
  BaseStation,
};

const char *RoleName (Role r);

/// Hop count advertised by a node with no route to the BS.
inline constexpr int kNoRouteHops = 15;

struct UavState
{
  NodeId id = kNoNode;
  Vec2 pos;
  double heading = 0.0; // radians, CCW from +x
  double speed = 0.0;
  CellIndex waypoint;
  double energy = 0.0;
  Role role = Role::Searcher;
  bool alive = true;

  // Orbit bookkeeping for target UAVs and relays.
  Vec2 orbitCenter;
  double orbitRadius = 0.0;
  bool onOrbit = false;
};

/// What a searcher knows about one neighbour when picking a waypoint: where
/// it will be (its advertised next waypoint) and its hop count to the BS.
struct NeighborView
{
  NodeId id = kNoNode;
  Vec2 pos;          // last heard position
  Vec2 predictedPos; // center of its advertised next waypoint (BS: its position)
  int hopsToBs = kNoRouteHops;
};

struct BscapParams
{
  double beta = 1.5;
  int degreeCap = 4;
  double txRangeM = 1000.0;
  double nearM = 300.0;
  double farM = 500.0;
  /// Slack subtracted from the range when keeping dependents in reach,
  /// covering waypoint tolerance and orbit wobble.
  double linkMarginM = 0.0;
  /// Hop count and id of the deciding node. When its hop count is finite, a
  /// neighbour anchors a candidate only if its (hops, id) pair is
  /// lexicographically smaller, so anchors form a chain that ends at the BS.
  /// Such a node also keeps in range every higher-ranked neighbour that has
  /// no other visible anchor.
  int ownHops = kNoRouteHops;
  NodeId ownId = kNoNode;
};

struct WaypointCandidate
{
  CellIndex cell;
  double pheromone = 0.0; // 3x3 effective sum
  int predictedDegree = 0;
  bool bsConnected = false;
  double score = 0.0;
};

enum class WaypointChoice
{
  Scored,
  FallbackToNeighbor,
  Hold,
};

struct WaypointDecision
{
  CellIndex cell;
  WaypointChoice choice = WaypointChoice::Hold;
};

/// Candidate cells at two ranges along five relative bearings (-90..+90 in
/// 45 degree steps), scored as 3x3 pheromone sum minus beta times the capped
/// predicted degree. Off-map and duplicate cells are dropped.
std::vector<WaypointCandidate> EnumerateCandidates (const UavState &uav, const PheromoneReader &pheromone,
                                                    std::span<const NeighborView> neighbors,
                                                    const AreaMap &map, const BscapParams &params);

/// Argmin over BS-connected candidates, ties to the lowest (col, row).
/// Without qualifying candidates a node that still has a route holds its
/// current cell, and one without heads for the nearest anchor neighbour.
/// With no neighbours at all it keeps the current waypoint.
WaypointDecision SelectWaypoint (const UavState &uav, const PheromoneReader &pheromone,
                                 std::span<const NeighborView> neighbors, const AreaMap &map,
                                 const BscapParams &params);

/// Pure argmin used by SelectWaypoint; exposed for tests.
const WaypointCandidate *BestCandidate (std::span<const WaypointCandidate> candidates);

/// Constant-speed point-mass step: turn toward the waypoint center by at
/// most maxTurnRate*dt, advance speed*dt, reflect off the map edge.
void StepKinematics (UavState &uav, const AreaMap &map, double dt, double maxTurnRateRad);

/// Circle `center` at `radius`. A node off the circle first travels
/// radially onto it at its speed.
void OrbitStep (UavState &uav, Vec2 center, double radius, double dt, const AreaMap &map);

bool WaypointReached (const UavState &uav, const AreaMap &map);

} // namespace uavsim

#endif
