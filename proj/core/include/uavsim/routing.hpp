#ifndef UAVSIM_ROUTING_HPP
#define UAVSIM_ROUTING_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "uavsim/config.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

/// Ordered node list from the target UAV (front) to the BS (back).
struct Route
{
  std::vector<NodeId> nodes;
  double establishedAt = 0;

  int Hc () const { return nodes.empty () ? 0 : static_cast<int> (nodes.size ()) - 1; }
  bool Empty () const { return nodes.empty (); }
};

struct RouteMetrics
{
  int hc = 0;
  int il = 0;
  double rltS = 0;
  double enR = 0;
};

/// Undirected graph annotated with per-link lifetime and per-node energy and
/// interference. Used both for a source's pipe view and for test oracles.
class LinkGraph
{
public:
  void AddNode (NodeId id, double en, int il);
  /// Adds (or overwrites) the undirected link; endpoints are created with
  /// zero attributes when missing.
  void AddLink (NodeId a, NodeId b, double lltS);
  void RemoveLink (NodeId a, NodeId b);

  bool HasNode (NodeId id) const { return m_nodes.count (id) != 0; }
  bool HasLink (NodeId a, NodeId b) const;
  std::optional<double> Llt (NodeId a, NodeId b) const;
  double En (NodeId id) const;
  int Il (NodeId id) const;
  std::size_t NodeCount () const { return m_nodes.size (); }

  /// Sorted ids.
  std::vector<NodeId> Nodes () const;
  std::vector<NodeId> Neighbors (NodeId id) const;

  LinkGraph Induced (const std::set<NodeId> &keep) const;

private:
  struct Attr
  {
    double en = 0;
    int il = 0;
  };
  std::map<NodeId, Attr> m_nodes;
  std::map<NodeId, std::map<NodeId, double>> m_adj;
};

/// Minimum energy over the route's nodes. Throws std::logic_error when a
/// node on the route is dead.
double RouteEnergy (std::span<const NodeId> nodes, std::span<const double> energy, std::span<const char> alive);
double RouteEnergy (std::span<const NodeId> nodes, const LinkGraph &g);

/// Minimum link lifetime along the route; 0 when a link is missing.
double RouteLifetime (std::span<const NodeId> nodes, const LinkGraph &g);

/// HC, summed IL, RLT and En_R of a node sequence under `g`.
RouteMetrics MeasureRoute (std::span<const NodeId> nodes, const LinkGraph &g);

struct SelectionParams
{
  double ttlS = 3.0;
  double enThreshold = 10.0;
  double enTolerance = 0.02;
  int hcSlack = 3;
  double w1 = 0.5;
  double w2 = 0.5;
  double alpha = 0.3;

  static SelectionParams FromConfig (const SimConfig &cfg);
};

/// Lifetime outlasts the packet TTL and energy clears the threshold plus
/// tolerance, both strictly.
bool Feasible (const RouteMetrics &m, double ttlS, double enThreshold, double enTolerance);
bool Feasible (const RouteMetrics &m, const SelectionParams &p);

/// w1*HC/HC_min + w2*IL/(IL_min + alpha*IL). With IL = IL_min = 0 the IL
/// term takes its limit 1/(1+alpha).
double RouteCost (const RouteMetrics &m, int hcMin, int ilMin, double w1, double w2, double alpha);

struct Candidate
{
  std::vector<NodeId> nodes;
  RouteMetrics metrics;
};

/// Feasibility filter, then HC <= HC_min + slack, then argmin cost with ties
/// to lower HC, lower IL, then lexicographically smaller node list. Returns
/// the index of the winner, or nullopt when nothing is feasible.
std::optional<std::size_t> SelectActiveRoute (std::span<const Candidate> candidates, const SelectionParams &p);

// ---------------------------------------------------------------------------
// Route discovery

enum class DiscoveryMode
{
  Aodv, // ungated flood, BS answers the first RREQ
  Pipe, // directional, lifetime and energy gates; BS answers every copy
};

/// What an RREQ flood can observe. `adjacency[i]` lists the nodes that hear
/// a broadcast from i. `llt(receiver, sender)` is the receiver's own
/// lifetime estimate of the incoming link, nullopt if it has none.
struct DiscoveryWorld
{
  std::span<const Vec2> positions;
  std::span<const char> alive;
  std::span<const double> energy;
  std::span<const int> il;
  const std::vector<std::vector<NodeId>> *adjacency = nullptr;
  std::function<std::optional<double> (NodeId, NodeId)> llt;
  NodeId bs = 0;
};

struct DiscoveryParams
{
  DiscoveryMode mode = DiscoveryMode::Pipe;
  double slackM = 200.0;
  double ttlS = 3.0;
  double enThreshold = 10.0;
  double hopDelayS = 0.001;
  double jitterS = 0.010;
  /// Optional extra link filter (sender, receiver); used by the relay scheme.
  std::function<bool (NodeId, NodeId)> admit;
};

struct DiscoveryResult
{
  std::vector<Candidate> candidates; // in arrival order at the BS
  int rreqBroadcasts = 0;
};

/// Event-driven RREQ flood from `source`. Every node forwards a given
/// request at most once, after a per-hop delay plus uniform jitter drawn
/// from `jitter`.
DiscoveryResult DiscoverRoute (NodeId source, const DiscoveryWorld &world, const DiscoveryParams &params,
                               RngStream &jitter);

// ---------------------------------------------------------------------------
// Pipe

struct PipeTopology
{
  std::set<NodeId> members;
  LinkGraph graph;
  double builtAt = 0;
};

/// Route nodes plus every node within two hops of one in `known`.
PipeTopology FormPipe (std::span<const NodeId> route, const LinkGraph &known, double now);

struct EnumerationLimits
{
  int visitBudget = 64;     // expansions per node once the pipe is large
  int sizeForBudget = 16;   // pipe size above which the budget applies
};

/// Breadth-first enumeration of simple source-to-BS paths that pass the
/// feasibility filter, capped at HC_min + slack hops. Infeasible links and
/// nodes are pruned up front.
std::vector<Candidate> EnumeratePipeRoutes (const LinkGraph &pipe, NodeId source, NodeId bs,
                                            const SelectionParams &p, const EnumerationLimits &limits = {});

/// SelectActiveRoute over EnumeratePipeRoutes without materialising every
/// candidate path.
std::optional<Candidate> SelectPipeRoute (const LinkGraph &pipe, NodeId source, NodeId bs, const SelectionParams &p,
                                          const EnumerationLimits &limits = {});

enum class SwitchTrigger
{
  None,
  Lifetime,
  Energy,
  Shorter,
};

enum class SwitchAction
{
  Keep,
  Switched,
  Rediscover,
};

const char *SwitchTriggerName (SwitchTrigger t);

struct SwitchDecision
{
  SwitchAction action = SwitchAction::Keep;
  SwitchTrigger trigger = SwitchTrigger::None;
  Candidate route;       // valid when Switched
  RouteMetrics current;  // current route as seen through the pipe
};

/// Periodic proactive check of the current route against its pipe.
SwitchDecision MaybeSwitch (std::span<const NodeId> current, const PipeTopology &pipe, NodeId bs,
                            const SelectionParams &p, const EnumerationLimits &limits = {});

} // namespace uavsim

#endif
