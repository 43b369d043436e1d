#include "uavsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavsim {

const char *
RoleName (Role r)
{
  switch (r)
    {
    case Role::Searcher:
      return "searcher";
    case Role::TargetUav:
      return "target_uav";
    case Role::Relay:
      return "relay";
    case Role::BaseStation:
      return "bs";
    }
  return "?";
}

namespace {

double WrapAngle (double a)
{
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod (a + std::numbers::pi, kTwoPi);
  if (a < 0)
    {
      a += kTwoPi;
    }
  return a - std::numbers::pi;
}

double PatchSum (CellIndex c, const PheromoneReader &pheromone, const AreaMap &map)
{
  double s = 0;
  for (int dc = -1; dc <= 1; ++dc)
    {
      for (int dr = -1; dr <= 1; ++dr)
        {
          CellIndex n{c.col + dc, c.row + dr};
          if (map.InBounds (n))
            {
              s += pheromone.Effective (n);
            }
        }
    }
  return s;
}

bool IsAnchor (const NeighborView &n, const BscapParams &params)
{
  if (n.hopsToBs >= kNoRouteHops)
    {
      return false;
    }
  if (params.ownHops >= kNoRouteHops)
    {
      return true;
    }
  return n.hopsToBs < params.ownHops || (n.hopsToBs == params.ownHops && n.id < params.ownId);
}

double SafeRange2 (const BscapParams &params)
{
  double r = std::max (0.0, params.txRangeM - params.linkMarginM);
  return r * r;
}

bool KeyBelow (const NeighborView &a, const NeighborView &b)
{
  return a.hopsToBs < b.hopsToBs || (a.hopsToBs == b.hopsToBs && a.id < b.id);
}

// Neighbours that rank above the deciding node and, as far as its own table
// shows, have no lower-ranked node to hang on to. Only lower-ranked covers
// count, so two parents never both leave on each other's account.
std::vector<const NeighborView *> SoleDependents (std::span<const NeighborView> neighbors,
                                                  const BscapParams &params)
{
  std::vector<const NeighborView *> out;
  if (params.ownHops >= kNoRouteHops)
    {
      return out;
    }
  const double safe2 = SafeRange2 (params);
  NeighborView self;
  self.id = params.ownId;
  self.hopsToBs = params.ownHops;
  for (const auto &j : neighbors)
    {
      if (j.hopsToBs >= kNoRouteHops || !KeyBelow (self, j))
        {
          continue;
        }
      bool covered = std::any_of (neighbors.begin (), neighbors.end (), [&] (const NeighborView &k) {
        return k.id != j.id && k.hopsToBs < kNoRouteHops && KeyBelow (k, self)
               && DistanceSq (k.pos, j.pos) <= safe2 && DistanceSq (k.predictedPos, j.predictedPos) <= safe2;
      });
      if (!covered)
        {
          out.push_back (&j);
        }
    }
  return out;
}

} // namespace

std::vector<WaypointCandidate>
EnumerateCandidates (const UavState &uav, const PheromoneReader &pheromone, std::span<const NeighborView> neighbors,
                     const AreaMap &map, const BscapParams &params)
{
  static constexpr double kBearingsDeg[] = {-90.0, -45.0, 0.0, 45.0, 90.0};
  const double ranges[] = {params.nearM, params.farM};
  const double range2 = params.txRangeM * params.txRangeM;
  const double safe2 = SafeRange2 (params);

  const auto dependents = SoleDependents (neighbors, params);

  std::vector<WaypointCandidate> out;
  out.reserve (10);
  for (double r : ranges)
    {
      for (double b : kBearingsDeg)
        {
          double h = uav.heading + b * std::numbers::pi / 180.0;
          Vec2 p = uav.pos + FromHeading (h) * r;
          if (!map.Contains (p))
            {
              continue;
            }
          CellIndex cell = CellOf (p, map);
          bool dup = std::any_of (out.begin (), out.end (), [&] (const auto &c) { return c.cell == cell; });
          if (dup)
            {
              continue;
            }
          WaypointCandidate cand;
          cand.cell = cell;
          cand.pheromone = PatchSum (cell, pheromone, map);
          Vec2 center = map.CellCenter (cell);
          for (const auto &n : neighbors)
            {
              if (DistanceSq (n.predictedPos, center) <= range2)
                {
                  ++cand.predictedDegree;
                  // The anchor must cover the candidate for its whole current leg.
                  if (IsAnchor (n, params) && DistanceSq (n.pos, center) <= range2
                      && DistanceSq (n.predictedPos, center) <= range2)
                    {
                      cand.bsConnected = true;
                    }
                }
            }
          for (const auto *j : dependents)
            {
              if (DistanceSq (j->pos, center) > safe2 || DistanceSq (j->predictedPos, center) > safe2)
                {
                  cand.bsConnected = false;
                }
            }
          cand.score = cand.pheromone - params.beta * std::min (cand.predictedDegree, params.degreeCap);
          out.push_back (cand);
        }
    }
  return out;
}

const WaypointCandidate *
BestCandidate (std::span<const WaypointCandidate> candidates)
{
  const WaypointCandidate *best = nullptr;
  for (const auto &c : candidates)
    {
      if (!c.bsConnected)
        {
          continue;
        }
      if (best == nullptr || c.score < best->score || (c.score == best->score && c.cell < best->cell))
        {
          best = &c;
        }
    }
  return best;
}

WaypointDecision
SelectWaypoint (const UavState &uav, const PheromoneReader &pheromone, std::span<const NeighborView> neighbors,
                const AreaMap &map, const BscapParams &params)
{
  if (uav.role != Role::Searcher || !uav.alive)
    {
      throw std::logic_error ("SelectWaypoint: only live searchers pick waypoints");
    }
  if (neighbors.empty ())
    {
      return {uav.waypoint, WaypointChoice::Hold};
    }
  auto candidates = EnumerateCandidates (uav, pheromone, neighbors, map, params);
  if (const auto *best = BestCandidate (candidates))
    {
      return {best->cell, WaypointChoice::Scored};
    }
  if (params.ownHops < kNoRouteHops)
    {
      // Still connected but boxed in: loiter here rather than drop a dependent.
      return {CellOf (map.Clamp (uav.pos), map), WaypointChoice::Hold};
    }
  const NeighborView *nearest = nullptr;
  double bestD = 0;
  for (const auto &n : neighbors)
    {
      if (!IsAnchor (n, params))
        {
          continue;
        }
      double d = DistanceSq (n.pos, uav.pos);
      if (nearest == nullptr || d < bestD || (d == bestD && n.id < nearest->id))
        {
          nearest = &n;
          bestD = d;
        }
    }
  if (nearest != nullptr)
    {
      return {CellOf (map.Clamp (nearest->pos), map), WaypointChoice::FallbackToNeighbor};
    }
  return {uav.waypoint, WaypointChoice::Hold};
}

void
StepKinematics (UavState &uav, const AreaMap &map, double dt, double maxTurnRateRad)
{
  if (!(dt > 0))
    {
      throw std::invalid_argument ("StepKinematics: dt must be positive");
    }
  Vec2 target = map.CellCenter (uav.waypoint);
  Vec2 d = target - uav.pos;
  if (Norm (d) > 1e-9)
    {
      double desired = std::atan2 (d.y, d.x);
      double err = WrapAngle (desired - uav.heading);
      double maxTurn = maxTurnRateRad * dt;
      uav.heading = WrapAngle (uav.heading + std::clamp (err, -maxTurn, maxTurn));
    }
  Vec2 next = uav.pos + FromHeading (uav.heading) * (uav.speed * dt);
  Vec2 dir = FromHeading (uav.heading);
  if (next.x < 0)
    {
      next.x = -next.x;
      dir.x = -dir.x;
    }
  else if (next.x > map.Width ())
    {
      next.x = 2 * map.Width () - next.x;
      dir.x = -dir.x;
    }
  if (next.y < 0)
    {
      next.y = -next.y;
      dir.y = -dir.y;
    }
  else if (next.y > map.Height ())
    {
      next.y = 2 * map.Height () - next.y;
      dir.y = -dir.y;
    }
  uav.heading = std::atan2 (dir.y, dir.x);
  uav.pos = map.Clamp (next);
}

void
OrbitStep (UavState &uav, Vec2 center, double radius, double dt, const AreaMap &map)
{
  uav.orbitCenter = center;
  uav.orbitRadius = radius;
  Vec2 rel = uav.pos - center;
  double dist = Norm (rel);
  double stepLen = uav.speed * dt;
  if (!uav.onOrbit)
    {
      double gap = dist - radius;
      if (std::abs (gap) <= stepLen)
        {
          uav.onOrbit = true;
          double phi = dist > 1e-9 ? std::atan2 (rel.y, rel.x) : 0.0;
          uav.pos = map.Clamp (center + FromHeading (phi) * radius);
          uav.heading = WrapAngle (phi + std::numbers::pi / 2);
          return;
        }
      Vec2 radial = dist > 1e-9 ? rel * (1.0 / dist) : Vec2{1.0, 0.0};
      Vec2 dir = gap > 0 ? radial * -1.0 : radial;
      uav.heading = std::atan2 (dir.y, dir.x);
      uav.pos = map.Clamp (uav.pos + dir * stepLen);
      return;
    }
  double phi = std::atan2 (rel.y, rel.x) + stepLen / radius;
  uav.pos = map.Clamp (center + FromHeading (phi) * radius);
  uav.heading = WrapAngle (phi + std::numbers::pi / 2);
}

bool
WaypointReached (const UavState &uav, const AreaMap &map)
{
  return Distance (uav.pos, map.CellCenter (uav.waypoint)) <= map.CellSize ();
}

} // namespace uavsim
