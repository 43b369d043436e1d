#ifndef UAVSIM_RADIO_HPP
#define UAVSIM_RADIO_HPP

#include <array>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/hello.hpp"

namespace uavsim {

inline constexpr double kDefaultLltCapS = 3600.0;

/// Everything a node remembers about one neighbour from its last Hello.
struct NeighborEntry
{
  NodeId id = kNoNode;
  Vec2 pos;
  Vec2 velocity;
  CellIndex nextWaypoint;
  int hopsToBs = 15;
  double en = 0;
  int il = 0;
  double lltS = 0;
  double lastHeard = 0;
  std::array<double, HelloPacket::kPatchCells> patch{};
  std::optional<CellIndex> maskCell;
  std::vector<LinkSummary> summaries;
};

/// Hello-derived neighbour table of one node.
class NeighborTable
{
public:
  void Upsert (NeighborEntry entry);
  /// Drops entries last heard more than `maxAgeS` ago; returns their ids.
  std::vector<NodeId> Expire (double now, double maxAgeS);
  void Clear () { m_entries.clear (); }

  const NeighborEntry *Find (NodeId id) const;
  bool Contains (NodeId id) const { return m_entries.count (id) != 0; }
  std::size_t Size () const { return m_entries.size (); }
  const std::map<NodeId, NeighborEntry> &Entries () const { return m_entries; }

private:
  std::map<NodeId, NeighborEntry> m_entries;
};

/// Alive nodes within `range` of `node` (Euclidean, inclusive), by id.
std::vector<NodeId> Neighbors (std::span<const Vec2> positions, std::span<const char> alive, NodeId node,
                               double range);

/// Velocity implied by a Hello: the fixed cruise speed toward the advertised
/// waypoint, or zero for a node loitering within `loiterM` of it.
Vec2 VelocityFromTrajectory (Vec2 pos, Vec2 waypointCenter, double speed, double loiterM);

/// Link expiration time: smallest t > 0 with |dp + t dv| = range. Returns
/// `cap` when the pair never separates and 0 when already out of range.
double EstimateLlt (Vec2 posI, Vec2 velI, Vec2 posJ, Vec2 velJ, double range, double cap = kDefaultLltCapS);
double EstimateLlt (const NeighborEntry &i, const NeighborEntry &j, double range,
                    double cap = kDefaultLltCapS);

/// What a Hello reveals about where a node is heading.
struct Leg
{
  Vec2 pos;
  Vec2 waypoint;
  double speed = 0.0; // 0 for a node that never moves (the BS)
};

/// Link lifetime when each node is only known to fly toward its advertised
/// waypoint. The constant-velocity estimate holds until the first of the
/// two reaches its waypoint (within `reachM`); from then on the pair is
/// assumed to separate at the sum of their speeds. A loitering node has no
/// committed leg, so for it the fallback applies from the start.
double EstimateLltToHorizon (const Leg &i, const Leg &j, double reachM, double loiterM, double range,
                             double cap = kDefaultLltCapS);

using Link = std::pair<NodeId, NodeId>;

/// Number of active data links (u, v), neither endpoint `node`, with u or v
/// within `range` of `node`. Duplicate and reversed links count once.
int InterferingLinks (std::span<const Vec2> positions, NodeId node, std::span<const Link> activeLinks,
                      double range);

/// Canonical (min, max) ordering for link sets.
inline Link CanonicalLink (NodeId a, NodeId b) { return a < b ? Link{a, b} : Link{b, a}; }

} // namespace uavsim

#endif
