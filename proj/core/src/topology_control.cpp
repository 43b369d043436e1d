#include "uavsim/topology_control.hpp"

#include <algorithm>

namespace uavsim {

std::vector<TcDecision>
TcStep (std::span<const NodeId> route, const std::function<std::vector<NodeId> (NodeId)> &neighborsOf,
        const std::function<Vec2 (NodeId)> &posOf, int thDegree)
{
  std::vector<TcDecision> out;
  if (route.size () < 2)
    {
      return out;
    }
  for (std::size_t i = 0; i + 1 < route.size (); ++i)
    {
      const NodeId self = route[i];
      const NodeId up = i > 0 ? route[i - 1] : kNoNode;
      const NodeId down = route[i + 1];

      TcDecision d;
      d.owner = self;
      for (NodeId n : neighborsOf (self))
        {
          if (n != up && n != down)
            {
              ++d.offRouteDegree;
            }
        }
      d.apply = d.offRouteDegree <= thDegree;
      if (i > 0)
        {
          d.axis = posOf (down) - posOf (up);
        }
      else
        {
          // The source has no upstream node: orient along its downstream
          // node's successor, or the BS itself on a one-hop route.
          NodeId far = route.size () > 2 ? route[2] : route[1];
          d.axis = posOf (far) - posOf (self);
        }
      out.push_back (d);
    }
  return out;
}

} // namespace uavsim
