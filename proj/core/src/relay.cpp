#include "uavsim/relay.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavsim {

bool
RelayLinkAdmissible (const OrbitSlot &a, const OrbitSlot &b, double txRangeM)
{
  return Distance (a.center, b.center) + a.radius + b.radius <= txRangeM;
}

std::vector<NodeId>
RelayManager::Assign (int flow, std::span<const NodeId> route)
{
  if (m_routes.count (flow))
    {
      throw std::logic_error ("RelayManager: flow " + std::to_string (flow) + " already has a route");
    }
  std::vector<NodeId> fresh;
  m_routes[flow].assign (route.begin (), route.end ());
  for (std::size_t i = 1; i + 1 < route.size (); ++i)
    {
      if (m_refs[route[i]]++ == 0)
        {
          fresh.push_back (route[i]);
        }
    }
  return fresh;
}

std::vector<NodeId>
RelayManager::Release (int flow)
{
  std::vector<NodeId> freed;
  auto it = m_routes.find (flow);
  if (it == m_routes.end ())
    {
      return freed;
    }
  const auto &route = it->second;
  for (std::size_t i = 1; i + 1 < route.size (); ++i)
    {
      auto r = m_refs.find (route[i]);
      if (r != m_refs.end () && --r->second == 0)
        {
          freed.push_back (route[i]);
          m_refs.erase (r);
        }
    }
  m_routes.erase (it);
  return freed;
}

const std::vector<NodeId> *
RelayManager::RouteOf (int flow) const
{
  auto it = m_routes.find (flow);
  return it == m_routes.end () ? nullptr : &it->second;
}

int
RelayManager::RefCount (NodeId n) const
{
  auto it = m_refs.find (n);
  return it == m_refs.end () ? 0 : it->second;
}

std::vector<int>
RelayManager::FlowsThrough (NodeId n) const
{
  std::vector<int> out;
  for (const auto &[flow, route] : m_routes)
    {
      if (std::find (route.begin (), route.end (), n) != route.end ())
        {
          out.push_back (flow);
        }
    }
  return out;
}

std::optional<Route>
EstablishRelayRoute (int flow, NodeId source, const DiscoveryWorld &world,
                     const std::function<OrbitSlot (NodeId)> &slotOf, double txRangeM, RelayManager &manager,
                     RngStream &jitter, double now, std::vector<NodeId> *newRelays)
{
  DiscoveryParams params;
  params.mode = DiscoveryMode::Aodv;
  params.admit = [&] (NodeId a, NodeId b) { return RelayLinkAdmissible (slotOf (a), slotOf (b), txRangeM); };
  auto found = DiscoverRoute (source, world, params, jitter);
  if (found.candidates.empty ())
    {
      return std::nullopt;
    }
  Route r;
  r.nodes = found.candidates.front ().nodes;
  r.establishedAt = now;
  auto fresh = manager.Assign (flow, r.nodes);
  if (newRelays != nullptr)
    {
      *newRelays = std::move (fresh);
    }
  return r;
}

std::vector<NodeId>
OnRelayFailure (int flow, RelayManager &manager)
{
  return manager.Release (flow);
}

} // namespace uavsim
