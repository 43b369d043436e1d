#ifndef UAVSIM_RELAY_HPP
#define UAVSIM_RELAY_HPP

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/routing.hpp"

namespace uavsim {

/// Where a node will circle once frozen, and how widely.
struct OrbitSlot
{
  Vec2 center;
  double radius = 0;
};

/// A link stays up for any orbit phases of both ends when the worst-case
/// separation, centers apart plus both radii, is within range.
bool RelayLinkAdmissible (const OrbitSlot &a, const OrbitSlot &b, double txRangeM);

/// Shared relay bookkeeping: which flows each relay serves.
class RelayManager
{
public:
  /// Records `route` for `flow` (replacing any previous one, which must have
  /// been released). Returns interior nodes that were not relays before.
  std::vector<NodeId> Assign (int flow, std::span<const NodeId> route);

  /// Forgets `flow`'s route. Returns the interior nodes that no longer serve
  /// any flow and may return to searching.
  std::vector<NodeId> Release (int flow);

  bool HasRoute (int flow) const { return m_routes.count (flow) != 0; }
  const std::vector<NodeId> *RouteOf (int flow) const;
  bool IsRelay (NodeId n) const { return m_refs.count (n) != 0; }
  int RefCount (NodeId n) const;
  std::size_t RelayCount () const { return m_refs.size (); }
  /// Flows whose route includes `n` anywhere (as relay or endpoint).
  std::vector<int> FlowsThrough (NodeId n) const;

private:
  std::map<int, std::vector<NodeId>> m_routes;
  std::map<NodeId, int> m_refs;
};

/// Runs an ungated shortest-arrival discovery restricted to admissible
/// links and, on success, registers the route with `manager`. `slotOf`
/// gives each node's prospective orbit. Returns the new relays' ids through
/// `newRelays`.
std::optional<Route> EstablishRelayRoute (int flow, NodeId source, const DiscoveryWorld &world,
                                          const std::function<OrbitSlot (NodeId)> &slotOf, double txRangeM,
                                          RelayManager &manager, RngStream &jitter, double now,
                                          std::vector<NodeId> *newRelays = nullptr);

/// Tears down `flow` after one of its relays died. Returns the relays freed.
std::vector<NodeId> OnRelayFailure (int flow, RelayManager &manager);

} // namespace uavsim

#endif
