#include "uavsim/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>

namespace uavsim {

// ---------------------------------------------------------------------------
// LinkGraph

void
LinkGraph::AddNode (NodeId id, double en, int il)
{
  m_nodes[id] = Attr{en, il};
  m_adj[id];
}

void
LinkGraph::AddLink (NodeId a, NodeId b, double lltS)
{
  if (a == b)
    {
      throw std::invalid_argument ("LinkGraph: self link");
    }
  m_nodes.try_emplace (a);
  m_nodes.try_emplace (b);
  m_adj[a][b] = lltS;
  m_adj[b][a] = lltS;
}

void
LinkGraph::RemoveLink (NodeId a, NodeId b)
{
  if (auto it = m_adj.find (a); it != m_adj.end ())
    {
      it->second.erase (b);
    }
  if (auto it = m_adj.find (b); it != m_adj.end ())
    {
      it->second.erase (a);
    }
}

bool
LinkGraph::HasLink (NodeId a, NodeId b) const
{
  return Llt (a, b).has_value ();
}

std::optional<double>
LinkGraph::Llt (NodeId a, NodeId b) const
{
  auto it = m_adj.find (a);
  if (it == m_adj.end ())
    {
      return std::nullopt;
    }
  auto jt = it->second.find (b);
  if (jt == it->second.end ())
    {
      return std::nullopt;
    }
  return jt->second;
}

double
LinkGraph::En (NodeId id) const
{
  auto it = m_nodes.find (id);
  return it == m_nodes.end () ? 0.0 : it->second.en;
}

int
LinkGraph::Il (NodeId id) const
{
  auto it = m_nodes.find (id);
  return it == m_nodes.end () ? 0 : it->second.il;
}

std::vector<NodeId>
LinkGraph::Nodes () const
{
  std::vector<NodeId> out;
  out.reserve (m_nodes.size ());
  for (const auto &[id, attr] : m_nodes)
    {
      out.push_back (id);
    }
  return out;
}

std::vector<NodeId>
LinkGraph::Neighbors (NodeId id) const
{
  std::vector<NodeId> out;
  if (auto it = m_adj.find (id); it != m_adj.end ())
    {
      for (const auto &[n, llt] : it->second)
        {
          out.push_back (n);
        }
    }
  return out;
}

LinkGraph
LinkGraph::Induced (const std::set<NodeId> &keep) const
{
  LinkGraph g;
  for (NodeId id : keep)
    {
      auto it = m_nodes.find (id);
      if (it != m_nodes.end ())
        {
          g.AddNode (id, it->second.en, it->second.il);
        }
      else
        {
          g.AddNode (id, 0.0, 0);
        }
    }
  for (NodeId id : keep)
    {
      auto it = m_adj.find (id);
      if (it == m_adj.end ())
        {
          continue;
        }
      for (const auto &[n, llt] : it->second)
        {
          if (n > id && keep.count (n))
            {
              g.AddLink (id, n, llt);
            }
        }
    }
  return g;
}

// ---------------------------------------------------------------------------
// Metrics, feasibility, cost

double
RouteEnergy (std::span<const NodeId> nodes, std::span<const double> energy, std::span<const char> alive)
{
  if (nodes.empty ())
    {
      throw std::invalid_argument ("RouteEnergy: empty route");
    }
  double m = std::numeric_limits<double>::infinity ();
  for (NodeId n : nodes)
    {
      if (!alive[n])
        {
          throw std::logic_error ("RouteEnergy: node " + std::to_string (n) + " on the route is dead");
        }
      m = std::min (m, energy[n]);
    }
  return m;
}

double
RouteEnergy (std::span<const NodeId> nodes, const LinkGraph &g)
{
  double m = std::numeric_limits<double>::infinity ();
  for (NodeId n : nodes)
    {
      m = std::min (m, g.En (n));
    }
  return nodes.empty () ? 0.0 : m;
}

double
RouteLifetime (std::span<const NodeId> nodes, const LinkGraph &g)
{
  if (nodes.size () < 2)
    {
      return 0.0;
    }
  double m = std::numeric_limits<double>::infinity ();
  for (std::size_t i = 0; i + 1 < nodes.size (); ++i)
    {
      auto llt = g.Llt (nodes[i], nodes[i + 1]);
      if (!llt)
        {
          return 0.0;
        }
      m = std::min (m, *llt);
    }
  return m;
}

RouteMetrics
MeasureRoute (std::span<const NodeId> nodes, const LinkGraph &g)
{
  RouteMetrics m;
  m.hc = nodes.empty () ? 0 : static_cast<int> (nodes.size ()) - 1;
  for (NodeId n : nodes)
    {
      m.il += g.Il (n);
    }
  m.rltS = RouteLifetime (nodes, g);
  m.enR = RouteEnergy (nodes, g);
  return m;
}

SelectionParams
SelectionParams::FromConfig (const SimConfig &cfg)
{
  SelectionParams p;
  p.ttlS = cfg.ttlS;
  p.enThreshold = cfg.enThreshold;
  p.enTolerance = cfg.enTolerance;
  p.hcSlack = cfg.hcSlack;
  p.w1 = cfg.w1;
  p.w2 = cfg.w2;
  p.alpha = cfg.alpha;
  return p;
}

bool
Feasible (const RouteMetrics &m, double ttlS, double enThreshold, double enTolerance)
{
  return m.rltS > ttlS && m.enR > enThreshold + enTolerance;
}

bool
Feasible (const RouteMetrics &m, const SelectionParams &p)
{
  return Feasible (m, p.ttlS, p.enThreshold, p.enTolerance);
}

double
RouteCost (const RouteMetrics &m, int hcMin, int ilMin, double w1, double w2, double alpha)
{
  if (hcMin <= 0)
    {
      throw std::invalid_argument ("RouteCost: HC_min must be positive");
    }
  double hcTerm = static_cast<double> (m.hc) / hcMin;
  double denom = ilMin + alpha * m.il;
  double ilTerm = denom > 0 ? m.il / denom : 1.0 / (1.0 + alpha);
  return w1 * hcTerm + w2 * ilTerm;
}

std::optional<std::size_t>
SelectActiveRoute (std::span<const Candidate> candidates, const SelectionParams &p)
{
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < candidates.size (); ++i)
    {
      if (Feasible (candidates[i].metrics, p))
        {
          pool.push_back (i);
        }
    }
  if (pool.empty ())
    {
      return std::nullopt;
    }
  int hcMin = std::numeric_limits<int>::max ();
  for (auto i : pool)
    {
      hcMin = std::min (hcMin, candidates[i].metrics.hc);
    }
  std::erase_if (pool, [&] (std::size_t i) { return candidates[i].metrics.hc > hcMin + p.hcSlack; });
  int ilMin = std::numeric_limits<int>::max ();
  for (auto i : pool)
    {
      ilMin = std::min (ilMin, candidates[i].metrics.il);
    }

  std::optional<std::size_t> best;
  double bestCost = 0;
  for (auto i : pool)
    {
      const auto &c = candidates[i];
      double cost = RouteCost (c.metrics, hcMin, ilMin, p.w1, p.w2, p.alpha);
      if (!best)
        {
          best = i;
          bestCost = cost;
          continue;
        }
      const auto &b = candidates[*best];
      bool better = cost < bestCost
                    || (cost == bestCost
                        && (c.metrics.hc < b.metrics.hc
                            || (c.metrics.hc == b.metrics.hc
                                && (c.metrics.il < b.metrics.il
                                    || (c.metrics.il == b.metrics.il && c.nodes < b.nodes)))));
      if (better)
        {
          best = i;
          bestCost = cost;
        }
    }
  return best;
}

// ---------------------------------------------------------------------------
// Discovery

namespace {

struct Broadcast
{
  double t;
  long seq;
  NodeId node;
  std::size_t path;

  bool operator> (const Broadcast &o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

} // namespace

DiscoveryResult
DiscoverRoute (NodeId source, const DiscoveryWorld &world, const DiscoveryParams &params, RngStream &jitter)
{
  if (world.adjacency == nullptr)
    {
      throw std::invalid_argument ("DiscoverRoute: adjacency missing");
    }
  const auto &adj = *world.adjacency;
  const std::size_t n = adj.size ();
  DiscoveryResult result;
  if (source < 0 || static_cast<std::size_t> (source) >= n || !world.alive[source] || source == world.bs)
    {
      return result;
    }

  const bool gated = params.mode == DiscoveryMode::Pipe;
  const Vec2 bsPos = world.positions[world.bs];
  std::vector<char> forwarded (n, 0);
  std::vector<std::vector<NodeId>> paths;
  std::priority_queue<Broadcast, std::vector<Broadcast>, std::greater<>> heap;
  long seq = 0;

  forwarded[source] = 1;
  paths.push_back ({source});
  heap.push ({0.0, seq++, source, 0});

  auto linkLlt = [&] (NodeId rx, NodeId tx) -> std::optional<double> {
    return world.llt ? world.llt (rx, tx) : std::nullopt;
  };

  while (!heap.empty ())
    {
      Broadcast b = heap.top ();
      heap.pop ();
      ++result.rreqBroadcasts;
      const NodeId u = b.node;
      for (NodeId v : adj[u])
        {
          if (!world.alive[v] || (v != world.bs && forwarded[v]))
            {
              continue;
            }
          const auto &path = paths[b.path];
          if (std::find (path.begin (), path.end (), v) != path.end ())
            {
              continue;
            }
          if (params.admit && !params.admit (u, v))
            {
              continue;
            }
          if (gated)
            {
              if (!(Distance (world.positions[v], bsPos) < Distance (world.positions[u], bsPos) + params.slackM))
                {
                  continue;
                }
              auto llt = linkLlt (v, u);
              if (!llt || !(*llt > params.ttlS))
                {
                  continue;
                }
              if (!(world.energy[v] > params.enThreshold))
                {
                  continue;
                }
            }

          std::vector<NodeId> next = paths[b.path];
          next.push_back (v);
          if (v == world.bs)
            {
              Candidate c;
              c.metrics.hc = static_cast<int> (next.size ()) - 1;
              c.metrics.rltS = std::numeric_limits<double>::infinity ();
              c.metrics.enR = std::numeric_limits<double>::infinity ();
              for (std::size_t i = 0; i < next.size (); ++i)
                {
                  c.metrics.il += world.il[next[i]];
                  c.metrics.enR = std::min (c.metrics.enR, world.energy[next[i]]);
                  if (i + 1 < next.size ())
                    {
                      c.metrics.rltS = std::min (c.metrics.rltS, linkLlt (next[i + 1], next[i]).value_or (0.0));
                    }
                }
              c.nodes = std::move (next);
              result.candidates.push_back (std::move (c));
              if (!gated)
                {
                  return result;
                }
              continue;
            }
          forwarded[v] = 1;
          paths.push_back (std::move (next));
          double delay = params.hopDelayS + jitter.Uniform (0.0, params.jitterS);
          heap.push ({b.t + delay, seq++, v, paths.size () - 1});
        }
    }
  return result;
}

// ---------------------------------------------------------------------------
// Pipe

PipeTopology
FormPipe (std::span<const NodeId> route, const LinkGraph &known, double now)
{
  PipeTopology pipe;
  pipe.builtAt = now;
  std::map<NodeId, int> depth;
  std::deque<NodeId> q;
  for (NodeId r : route)
    {
      if (depth.emplace (r, 0).second)
        {
          q.push_back (r);
        }
    }
  while (!q.empty ())
    {
      NodeId u = q.front ();
      q.pop_front ();
      int d = depth[u];
      if (d == 2)
        {
          continue;
        }
      for (NodeId v : known.Neighbors (u))
        {
          if (depth.emplace (v, d + 1).second)
            {
              q.push_back (v);
            }
        }
    }
  for (const auto &[id, d] : depth)
    {
      pipe.members.insert (id);
    }
  pipe.graph = known.Induced (pipe.members);
  return pipe;
}

namespace {

// Breadth-first path search over a pruned, densely indexed copy of the pipe.
// Partial paths live in a flat arena linked through parent indices, with
// their metrics carried along, so no per-path vectors are built.
class PipeSearch
{
public:
  struct Rec
  {
    int node;   // dense index
    int parent; // arena index, -1 at the source
    int hops;
    int il;
    double rlt;
    double en;
  };

  PipeSearch (const LinkGraph &pipe, NodeId source, NodeId bs, const SelectionParams &p,
              const EnumerationLimits &limits)
  {
    const double enFloor = p.enThreshold + p.enTolerance;
    for (NodeId u : pipe.Nodes ())
      {
        if (pipe.En (u) > enFloor)
          {
            m_index[u] = static_cast<int> (m_ids.size ());
            m_ids.push_back (u);
            m_il.push_back (pipe.Il (u));
            m_en.push_back (pipe.En (u));
          }
      }
    auto si = m_index.find (source);
    auto bi = m_index.find (bs);
    if (si == m_index.end () || bi == m_index.end () || source == bs)
      {
        return;
      }
    const int n = static_cast<int> (m_ids.size ());
    m_adj.resize (n);
    for (int i = 0; i < n; ++i)
      {
        for (NodeId v : pipe.Neighbors (m_ids[i]))
          {
            auto it = m_index.find (v);
            if (it == m_index.end ())
              {
                continue;
              }
            double llt = *pipe.Llt (m_ids[i], v);
            if (llt > p.ttlS)
              {
                m_adj[i].push_back ({it->second, llt});
              }
          }
      }
    m_src = si->second;
    m_bs = bi->second;

    std::vector<int> dist (n, -1);
    std::deque<int> q{m_bs};
    dist[m_bs] = 0;
    while (!q.empty ())
      {
        int u = q.front ();
        q.pop_front ();
        for (const auto &[v, llt] : m_adj[u])
          {
            if (dist[v] < 0)
              {
                dist[v] = dist[u] + 1;
                q.push_back (v);
              }
          }
      }
    if (dist[m_src] < 0)
      {
        return;
      }
    m_shortest = dist[m_src];
    m_cap = *m_shortest + p.hcSlack;
    m_budget = static_cast<int> (pipe.NodeCount ()) > limits.sizeForBudget ? limits.visitBudget : -1;
    m_dist = std::move (dist);
  }

  /// Expands every partial path within the hop cap; idempotent.
  void Enumerate ()
  {
    if (m_enumerated || !m_shortest)
      {
        return;
      }
    m_enumerated = true;
    std::vector<int> expansions (m_ids.size (), 0);
    m_arena.push_back ({m_src, -1, 0, m_il[m_src], std::numeric_limits<double>::infinity (), m_en[m_src]});
    for (std::size_t head = 0; head < m_arena.size (); ++head)
      {
        const Rec r = m_arena[head];
        if (r.node == m_bs)
          {
            continue;
          }
        if (m_budget >= 0 && ++expansions[r.node] > m_budget)
          {
            continue;
          }
        for (const auto &[v, llt] : m_adj[r.node])
          {
            if (m_dist[v] < 0 || r.hops + 1 + m_dist[v] > m_cap || OnPath (static_cast<int> (head), v))
              {
                continue;
              }
            m_arena.push_back ({v, static_cast<int> (head), r.hops + 1, r.il + m_il[v], std::min (r.rlt, llt),
                                std::min (r.en, m_en[v])});
            if (v == m_bs)
              {
                m_terminals.push_back (static_cast<int> (m_arena.size ()) - 1);
              }
          }
      }
  }

  /// Hop count of the shortest feasible path, when one exists.
  std::optional<int> Shortest () const { return m_shortest; }
  const std::vector<int> &Terminals () const { return m_terminals; }
  const Rec &At (int i) const { return m_arena[i]; }

  RouteMetrics Metrics (int i) const
  {
    const Rec &r = m_arena[i];
    return {r.hops, r.il, r.rlt, r.en};
  }

  std::vector<NodeId> Path (int i) const
  {
    std::vector<NodeId> out;
    for (int k = i; k >= 0; k = m_arena[k].parent)
      {
        out.push_back (m_ids[m_arena[k].node]);
      }
    std::reverse (out.begin (), out.end ());
    return out;
  }

private:
  bool OnPath (int rec, int node) const
  {
    for (int k = rec; k >= 0; k = m_arena[k].parent)
      {
        if (m_arena[k].node == node)
          {
            return true;
          }
      }
    return false;
  }

  std::vector<NodeId> m_ids;
  std::map<NodeId, int> m_index;
  std::vector<std::vector<std::pair<int, double>>> m_adj;
  int m_src = -1;
  int m_bs = -1;
  std::optional<int> m_shortest;
  std::vector<int> m_dist;
  std::vector<int> m_il;
  std::vector<double> m_en;
  int m_cap = 0;
  int m_budget = -1;
  bool m_enumerated = false;
  std::vector<Rec> m_arena;
  std::vector<int> m_terminals;
};

// Same selection as SelectActiveRoute, run over arena records.
std::optional<int> SelectFromSearch (const PipeSearch &search, const SelectionParams &p)
{
  std::vector<int> pool;
  for (int t : search.Terminals ())
    {
      if (Feasible (search.Metrics (t), p))
        {
          pool.push_back (t);
        }
    }
  if (pool.empty ())
    {
      return std::nullopt;
    }
  int hcMin = std::numeric_limits<int>::max ();
  for (int t : pool)
    {
      hcMin = std::min (hcMin, search.At (t).hops);
    }
  std::erase_if (pool, [&] (int t) { return search.At (t).hops > hcMin + p.hcSlack; });
  int ilMin = std::numeric_limits<int>::max ();
  for (int t : pool)
    {
      ilMin = std::min (ilMin, search.At (t).il);
    }
  std::optional<int> best;
  double bestCost = 0;
  for (int t : pool)
    {
      auto m = search.Metrics (t);
      double cost = RouteCost (m, hcMin, ilMin, p.w1, p.w2, p.alpha);
      if (!best)
        {
          best = t;
          bestCost = cost;
          continue;
        }
      auto b = search.Metrics (*best);
      bool better = cost < bestCost
                    || (cost == bestCost
                        && (m.hc < b.hc
                            || (m.hc == b.hc
                                && (m.il < b.il || (m.il == b.il && search.Path (t) < search.Path (*best))))));
      if (better)
        {
          best = t;
          bestCost = cost;
        }
    }
  return best;
}

} // namespace

std::vector<Candidate>
EnumeratePipeRoutes (const LinkGraph &pipe, NodeId source, NodeId bs, const SelectionParams &p,
                     const EnumerationLimits &limits)
{
  PipeSearch search (pipe, source, bs, p, limits);
  search.Enumerate ();
  std::vector<Candidate> out;
  out.reserve (search.Terminals ().size ());
  for (int t : search.Terminals ())
    {
      out.push_back ({search.Path (t), search.Metrics (t)});
    }
  return out;
}

std::optional<Candidate>
SelectPipeRoute (const LinkGraph &pipe, NodeId source, NodeId bs, const SelectionParams &p,
                 const EnumerationLimits &limits)
{
  PipeSearch search (pipe, source, bs, p, limits);
  search.Enumerate ();
  auto pick = SelectFromSearch (search, p);
  if (!pick)
    {
      return std::nullopt;
    }
  return Candidate{search.Path (*pick), search.Metrics (*pick)};
}

const char *
SwitchTriggerName (SwitchTrigger t)
{
  switch (t)
    {
    case SwitchTrigger::None:
      return "none";
    case SwitchTrigger::Lifetime:
      return "lifetime";
    case SwitchTrigger::Energy:
      return "energy";
    case SwitchTrigger::Shorter:
      return "shorter";
    }
  return "?";
}

SwitchDecision
MaybeSwitch (std::span<const NodeId> current, const PipeTopology &pipe, NodeId bs, const SelectionParams &p,
             const EnumerationLimits &limits)
{
  SwitchDecision d;
  if (current.empty ())
    {
      d.action = SwitchAction::Rediscover;
      return d;
    }
  d.current = MeasureRoute (current, pipe.graph);
  PipeSearch search (pipe.graph, current.front (), bs, p, limits);

  if (d.current.rltS <= p.ttlS)
    {
      d.trigger = SwitchTrigger::Lifetime;
    }
  else if (d.current.enR <= p.enThreshold)
    {
      d.trigger = SwitchTrigger::Energy;
    }
  else if (search.Shortest () && *search.Shortest () <= d.current.hc - 1)
    {
      d.trigger = SwitchTrigger::Shorter;
    }
  if (d.trigger == SwitchTrigger::None)
    {
      return d;
    }

  search.Enumerate ();
  auto pick = SelectFromSearch (search, p);
  if (!pick)
    {
      d.action = SwitchAction::Rediscover;
      return d;
    }
  auto nodes = search.Path (*pick);
  if (std::equal (current.begin (), current.end (), nodes.begin (), nodes.end ()))
    {
      return d; // the current route is still the best one
    }
  d.action = SwitchAction::Switched;
  d.route = {std::move (nodes), search.Metrics (*pick)};
  return d;
}

} // namespace uavsim
