#include "uavsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace uavsim {

void
NeighborTable::Upsert (NeighborEntry entry)
{
  NodeId id = entry.id;
  m_entries.insert_or_assign (id, std::move (entry));
}

std::vector<NodeId>
NeighborTable::Expire (double now, double maxAgeS)
{
  std::vector<NodeId> gone;
  for (auto it = m_entries.begin (); it != m_entries.end ();)
    {
      if (now - it->second.lastHeard > maxAgeS + 1e-9)
        {
          gone.push_back (it->first);
          it = m_entries.erase (it);
        }
      else
        {
          ++it;
        }
    }
  return gone;
}

const NeighborEntry *
NeighborTable::Find (NodeId id) const
{
  auto it = m_entries.find (id);
  return it == m_entries.end () ? nullptr : &it->second;
}

std::vector<NodeId>
Neighbors (std::span<const Vec2> positions, std::span<const char> alive, NodeId node, double range)
{
  std::vector<NodeId> out;
  if (node < 0 || static_cast<std::size_t> (node) >= positions.size () || !alive[node])
    {
      return out;
    }
  const double r2 = range * range;
  for (std::size_t j = 0; j < positions.size (); ++j)
    {
      if (static_cast<NodeId> (j) != node && alive[j] && DistanceSq (positions[node], positions[j]) <= r2)
        {
          out.push_back (static_cast<NodeId> (j));
        }
    }
  return out;
}

Vec2
VelocityFromTrajectory (Vec2 pos, Vec2 waypointCenter, double speed, double loiterM)
{
  Vec2 d = waypointCenter - pos;
  double n = Norm (d);
  if (n <= loiterM)
    {
      return {};
    }
  return d * (speed / n);
}

double
EstimateLlt (Vec2 posI, Vec2 velI, Vec2 posJ, Vec2 velJ, double range, double cap)
{
  Vec2 dp = posJ - posI;
  Vec2 dv = velJ - velI;
  double c = Dot (dp, dp) - range * range;
  if (c > 0)
    {
      return 0.0;
    }
  double a = Dot (dv, dv);
  if (a <= 1e-12)
    {
      return cap;
    }
  double b = 2.0 * Dot (dp, dv);
  double disc = b * b - 4 * a * c; // c <= 0 keeps this non-negative
  double t = (-b + std::sqrt (std::max (0.0, disc))) / (2 * a);
  return std::min (std::max (t, 0.0), cap);
}

double
EstimateLlt (const NeighborEntry &i, const NeighborEntry &j, double range, double cap)
{
  return EstimateLlt (i.pos, i.velocity, j.pos, j.velocity, range, cap);
}

double
EstimateLltToHorizon (const Leg &i, const Leg &j, double reachM, double loiterM, double range, double cap)
{
  if (i.speed < 0 || j.speed < 0)
    {
      throw std::invalid_argument ("EstimateLltToHorizon: negative speed");
    }
  auto commit = [&] (const Leg &l, Vec2 &v) {
    if (l.speed == 0)
      {
        v = {};
        return std::numeric_limits<double>::infinity ();
      }
    v = VelocityFromTrajectory (l.pos, l.waypoint, l.speed, loiterM);
    return (v.x == 0.0 && v.y == 0.0) ? 0.0 : std::max (0.0, Distance (l.pos, l.waypoint) - reachM) / l.speed;
  };
  Vec2 vI;
  Vec2 vJ;
  const double h = std::min (commit (i, vI), commit (j, vJ));
  const double t = EstimateLlt (i.pos, vI, j.pos, vJ, range, cap);
  const double spread = i.speed + j.speed;
  if (t <= h || spread == 0)
    {
      return t;
    }
  const double dh = Distance (i.pos + vI * h, j.pos + vJ * h);
  return std::min (cap, h + std::max (0.0, range - dh) / spread);
}

int
InterferingLinks (std::span<const Vec2> positions, NodeId node, std::span<const Link> activeLinks, double range)
{
  std::set<Link> seen;
  const double r2 = range * range;
  const Vec2 me = positions[node];
  int count = 0;
  for (const auto &l : activeLinks)
    {
      Link c = CanonicalLink (l.first, l.second);
      if (c.first == node || c.second == node || !seen.insert (c).second)
        {
          continue;
        }
      if (DistanceSq (positions[c.first], me) <= r2 || DistanceSq (positions[c.second], me) <= r2)
        {
          ++count;
        }
    }
  return count;
}

} // namespace uavsim
