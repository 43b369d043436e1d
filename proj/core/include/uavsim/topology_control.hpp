#ifndef UAVSIM_TOPOLOGY_CONTROL_HPP
#define UAVSIM_TOPOLOGY_CONTROL_HPP

#include <functional>
#include <span>
#include <vector>

#include "uavsim/geometry.hpp"

namespace uavsim {

struct TcDecision
{
  NodeId owner = kNoNode;
  bool apply = false;
  int offRouteDegree = 0;
  Vec2 axis; // upstream -> downstream, not normalised; meaningful when apply
};

/// Per-route-node mask decisions for one tick. `neighborsOf(n)` returns the
/// ids in n's own neighbour table and `posOf(n)` its position. Every route
/// node except the BS end is evaluated: a node whose neighbours, less its
/// upstream and downstream route nodes, number at most `thDegree` asks for a
/// mask; any other node asks for removal.
std::vector<TcDecision> TcStep (std::span<const NodeId> route, const std::function<std::vector<NodeId> (NodeId)> &neighborsOf,
                                const std::function<Vec2 (NodeId)> &posOf, int thDegree);

} // namespace uavsim

#endif
