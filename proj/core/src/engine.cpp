#include "uavsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <mutex>
#include <exception>

#include "uavsim/data_plane.hpp"
#include "uavsim/hello.hpp"
#include "uavsim/relay.hpp"
#include "uavsim/topology_control.hpp"

namespace uavsim {

namespace {

// A node this close to its advertised waypoint is taken to be loitering.
constexpr double kLoiterM = 150.0;
constexpr NodeId kBs = 0;

std::string JoinRoute (std::span<const NodeId> nodes)
{
  std::string s;
  for (std::size_t i = 0; i < nodes.size (); ++i)
    {
      s += (i ? " " : "") + std::to_string (nodes[i]);
    }
  return s;
}

/// A node's effective pheromone belief: its local map with every mask it
/// knows about zeroed out.
class LocalView : public PheromoneReader
{
public:
  LocalView (const LocalPheromoneMap &local, const AreaMap &map, long long tick, double lambda,
             std::vector<const MaskRect *> masks)
      : m_local (local), m_map (map), m_tick (tick), m_lambda (lambda), m_masks (std::move (masks))
  {
  }

  double Effective (CellIndex c) const override
  {
    Vec2 center = m_map.CellCenter (c);
    for (const auto *m : m_masks)
      {
        if (m->Covers (center))
          {
            return 0.0;
          }
      }
    return m_local.Value (c, m_tick, m_lambda);
  }

private:
  const LocalPheromoneMap &m_local;
  const AreaMap &m_map;
  long long m_tick;
  double m_lambda;
  std::vector<const MaskRect *> m_masks;
};

struct TargetState
{
  Vec2 pos;
  CellIndex cell;
  bool found = false;
  NodeId uav = kNoNode;
};

struct FlowState
{
  int id = 0;
  int target = 0;
  NodeId source = kNoNode;
  double startedAt = 0;
  double nextGen = 0;

  Route route;
  bool hasRoute = false;
  PipeTopology pipe;
  bool hasPipe = false;

  int failedAttempts = 0;
  double holdUntil = 0;
  bool inDiscovery = false;

  int linkLosses = 0;
  int breaks = 0;
  int reestablishments = 0;
  int switches = 0;
  int discoveries = 0;

  std::vector<std::pair<double, double>> upIntervals;
  bool upOpen = false;
  double upStart = 0;
  double upTime = 0;
  double hopTime = 0;
};

} // namespace

struct World::Impl
{
  Impl (Scenario sc, std::uint64_t seed, RunOptions opts);

  // Step phases
  void StepOnce ();
  void ApplyFailures (double now);
  void ProtocolTick (double now);
  void ExchangeHellos (double now, long long tick);
  void UpdateHops (double lastHello);
  void ScanAndDeposit (double now);
  void DetectTargets (double now);
  void StartWindow (double now);
  void UpdateInterference ();
  void RouteFlows (double now, long long tick);
  void RouteFlow (FlowState &f, double now, bool notify);
  void RunTopologyControl (double now);
  void ChooseWaypoints (long long tick);
  void TrackRouteUp (double now, double dt);
  void GenerateTraffic (double t0, double t1);
  void Kinematics (double dt);
  void RecordSeries (double now);

  // Helpers
  void CreateFlow (int target, NodeId uav, double now);
  void MakeTargetUav (NodeId uav, int target);
  bool InWindow (double t) const { return t >= cfg.warmupS && t < cfg.TotalS (); }
  bool PipeScheme () const { return sc.scheme == Scheme::Pipe || sc.scheme == Scheme::TcPipe; }
  bool Valid (const FlowState &f) const;
  std::optional<std::pair<NodeId, NodeId>> DetectBreak (const FlowState &f) const;
  void InstallRoute (FlowState &f, std::vector<NodeId> nodes, double now, const char *event);
  void DropRoute (FlowState &f);
  bool Discover (FlowState &f, double now);
  bool EstablishRelay (FlowState &f, double now);
  LinkGraph KnownGraph (std::span<const NodeId> route) const;
  DiscoveryWorld DiscoveryView ();
  OrbitSlot SlotOf (NodeId n, const FlowState &f) const;
  void LogRoute (double now, const FlowState &f, const char *event, std::span<const NodeId> nodes,
                 const RouteMetrics &m);
  void LogEvent (double now, int flow, const char *event);
  std::vector<NeighborView> NeighborViews (NodeId n) const;
  double NodeEnergy (NodeId n) const { return nodes[n].energy; }

  Scenario sc;
  SimConfig cfg;
  std::uint64_t seed;
  RunOptions opts;
  AreaMap map;
  SimClock clock;
  SelectionParams sel;
  EnumerationLimits limits;
  int n; // total nodes including the BS

  RngStream launchRng;
  RngStream failureRng;
  RngStream trafficRng;

  std::vector<UavState> nodes;
  std::vector<Vec2> pos;
  std::vector<char> alive;
  std::vector<NeighborTable> tables;
  std::vector<LocalPheromoneMap> local;
  std::vector<int> hops;
  std::vector<int> il;
  std::vector<std::vector<NodeId>> adjacency;
  std::vector<Link> activeLinks;

  PheromoneField field;
  std::vector<std::uint32_t> scanWindow;
  std::vector<std::uint32_t> scanFull;

  std::vector<TargetState> targets;
  std::vector<FlowState> flows;
  RelayManager relays;
  DataPlane data;
  double genInterval;

  bool windowStarted = false;
  FailurePlan failures;
  std::size_t nextFailure = 0;

  double helloBits = 0;
  long helloCount = 0;
  int notifyTicks = 2;
  int seriesTicks = 10;
  int heatmapTicks = 100;
  std::vector<SeriesPoint> series;
};

World::Impl::Impl (Scenario scIn, std::uint64_t seedIn, RunOptions optsIn)
    : sc (std::move (scIn)), cfg (sc.config), seed (seedIn), opts (optsIn), map (cfg.Map ()),
      clock (cfg.dtS, cfg.protocolTickS), sel (SelectionParams::FromConfig (cfg)), n (cfg.nUavs + 1),
      launchRng (seedIn, RngStreamId::Launch), failureRng (seedIn, RngStreamId::Failures),
      trafficRng (seedIn, RngStreamId::Traffic), field (map),
      data (cfg.nUavs + 1, DataPlaneParams{cfg.channelRateBps, cfg.PacketBits (), cfg.processingDelayS, cfg.ttlS,
                                           cfg.txRangeM})
{
  sc.Validate ();
  cfg.seed = seed;
  limits.visitBudget = cfg.pipeVisitBudget;
  limits.sizeForBudget = cfg.pipeSizeForBudget;
  genInterval = cfg.PacketBits () / cfg.dataRateBps;
  notifyTicks = std::max (1, static_cast<int> (std::lround (cfg.notifyIntervalS / cfg.protocolTickS)));
  seriesTicks = std::max (1, static_cast<int> (std::lround (opts.seriesIntervalS / cfg.protocolTickS)));
  heatmapTicks = std::max (1, static_cast<int> (std::lround (opts.heatmapIntervalS / cfg.protocolTickS)));

  nodes.resize (n);
  pos.resize (n);
  alive.assign (n, 1);
  tables.resize (n);
  local.assign (n, LocalPheromoneMap (map));
  hops.assign (n, kNoRouteHops);
  il.assign (n, 0);
  scanWindow.assign (map.CellCount (), 0);
  scanFull.assign (map.CellCount (), 0);

  const Vec2 bs = cfg.BsPos ();
  auto &b = nodes[kBs];
  b.id = kBs;
  b.pos = bs;
  b.role = Role::BaseStation;
  b.energy = cfg.enInitial;
  b.waypoint = CellOf (bs, map);
  hops[kBs] = 0;

  for (NodeId i = 1; i < n; ++i)
    {
      auto &u = nodes[i];
      u.id = i;
      Vec2 p;
      do
        {
          double r = cfg.launchRadiusM * std::sqrt (launchRng.Uniform ());
          double a = launchRng.Uniform (0.0, 2.0 * std::numbers::pi);
          p = bs + FromHeading (a) * r;
        }
      while (!map.Contains (p));
      u.pos = p;
      u.heading = launchRng.Uniform (-std::numbers::pi, std::numbers::pi);
      u.speed = cfg.speedMps;
      u.energy = cfg.enInitial;
      u.role = Role::Searcher;
      u.waypoint = CellOf (p, map);
    }
  for (NodeId i = 0; i < n; ++i)
    {
      pos[i] = nodes[i].pos;
    }
  for (const auto &t : sc.targets)
    {
      targets.push_back ({t, CellOf (t, map), false, kNoNode});
    }

  if (opts.eventLog)
    {
      *opts.eventLog << "t,flow,event,route,hc,il,rlt,en_r\n";
    }
  if (opts.maskLog)
    {
      *opts.maskLog << "t,owner,col,row,axis_x,axis_y,action\n";
    }
  if (opts.trace)
    {
      *opts.trace << "t,node,x,y,role\n";
    }
  if (opts.heatmap)
    {
      *opts.heatmap << "t,col,row,value,effective_value\n";
    }
}

// ---------------------------------------------------------------------------
// Logging

void
World::Impl::LogRoute (double now, const FlowState &f, const char *event, std::span<const NodeId> route,
                       const RouteMetrics &m)
{
  if (!opts.eventLog)
    {
      return;
    }
  char buf[160];
  std::snprintf (buf, sizeof buf, "%.1f,%d,%s,", now, f.id, event);
  *opts.eventLog << buf << JoinRoute (route);
  std::snprintf (buf, sizeof buf, ",%d,%d,%.3f,%.3f\n", m.hc, m.il, m.rltS, m.enR);
  *opts.eventLog << buf;
}

void
World::Impl::LogEvent (double now, int flow, const char *event)
{
  if (!opts.eventLog)
    {
      return;
    }
  char buf[96];
  std::snprintf (buf, sizeof buf, "%.1f,%d,%s,,,,,\n", now, flow, event);
  *opts.eventLog << buf;
}

// ---------------------------------------------------------------------------
// Main loop

void
World::Impl::StepOnce ()
{
  const double now = clock.Now ();
  const double dt = clock.Dt ();
  ApplyFailures (now);
  if (clock.AtTickBoundary ())
    {
      ProtocolTick (now);
    }
  TrackRouteUp (now, dt);
  GenerateTraffic (now, now + dt);

  DataPlaneContext ctx;
  ctx.positions = pos;
  ctx.alive = alive;
  ctx.bs = kBs;
  ctx.routeOf = [this] (int flow) -> const std::vector<NodeId> * {
    const auto &f = flows[flow];
    return f.hasRoute ? &f.route.nodes : nullptr;
  };
  ctx.onTransmit = [this] (NodeId node) {
    if (node != kBs)
      {
        nodes[node].energy = std::max (0.0, nodes[node].energy - cfg.enDrainPerPacket);
      }
  };
  data.Step (now, dt, ctx);

  Kinematics (dt);
  clock.Advance ();
}

void
World::Impl::ApplyFailures (double now)
{
  while (nextFailure < failures.events.size () && failures.events[nextFailure].time <= now)
    {
      NodeId id = failures.events[nextFailure++].node;
      if (!alive[id])
        {
          continue;
        }
      alive[id] = 0;
      nodes[id].alive = false;
      tables[id].Clear ();
      hops[id] = kNoRouteHops;
      data.KillNode (id);
      if (opts.eventLog)
        {
          char buf[64];
          std::snprintf (buf, sizeof buf, "%.1f,-1,node_failure,%d,,,,\n", now, id);
          *opts.eventLog << buf;
        }
    }
}

void
World::Impl::ProtocolTick (double now)
{
  const long long tick = clock.Ticks ();
  if (!windowStarted && now >= cfg.warmupS)
    {
      StartWindow (now);
    }

  adjacency.assign (n, {});
  for (NodeId i = 0; i < n; ++i)
    {
      adjacency[i] = Neighbors (pos, alive, i, cfg.txRangeM);
    }

  ExchangeHellos (now, tick);
  UpdateHops (now);
  ScanAndDeposit (now);
  DetectTargets (now);
  UpdateInterference ();
  RouteFlows (now, tick);
  if (sc.scheme == Scheme::TcPipe)
    {
      RunTopologyControl (now);
    }
  ChooseWaypoints (tick);

  for (NodeId i = 1; i < n; ++i)
    {
      if (alive[i])
        {
          nodes[i].energy = std::max (0.0, nodes[i].energy - cfg.enDrainFlightPerS * cfg.protocolTickS);
        }
    }

  if (tick % seriesTicks == 0)
    {
      RecordSeries (now);
    }
  if (opts.trace)
    {
      for (NodeId i = 0; i < n; ++i)
        {
          if (!alive[i])
            {
              continue;
            }
          char buf[128];
          std::snprintf (buf, sizeof buf, "%.1f,%d,%.2f,%.2f,%s\n", now, i, pos[i].x, pos[i].y,
                         RoleName (nodes[i].role));
          *opts.trace << buf;
        }
    }
  if (opts.heatmap && tick % heatmapTicks == 0)
    {
      field.WriteCsv (*opts.heatmap, now);
    }
}

void
World::Impl::StartWindow (double now)
{
  windowStarted = true;
  // Any target still undiscovered goes to its nearest searcher.
  for (std::size_t t = 0; t < targets.size (); ++t)
    {
      if (targets[t].found)
        {
          continue;
        }
      NodeId best = kNoNode;
      double bestD = 0;
      for (NodeId i = 1; i < n; ++i)
        {
          if (!alive[i] || nodes[i].role != Role::Searcher)
            {
              continue;
            }
          double d = DistanceSq (pos[i], targets[t].pos);
          if (best == kNoNode || d < bestD)
            {
              best = i;
              bestD = d;
            }
        }
      if (best != kNoNode)
        {
          MakeTargetUav (best, static_cast<int> (t));
          CreateFlow (static_cast<int> (t), best, now);
          LogEvent (now, static_cast<int> (flows.size ()) - 1, "target_assigned");
        }
    }
  std::vector<NodeId> excluded;
  for (const auto &t : targets)
    {
      if (t.uav != kNoNode)
        {
          excluded.push_back (t.uav);
        }
    }
  failures = MakeFailurePlan (cfg.nUavs, sc.failurePct, excluded, cfg.warmupS, cfg.TotalS (), failureRng);
}

// ---------------------------------------------------------------------------
// Beaconing

void
World::Impl::ExchangeHellos (double now, long long tick)
{
  std::set<NodeId> routeNodes;
  std::set<Link> linkSet (activeLinks.begin (), activeLinks.end ());
  for (const auto &f : flows)
    {
      if (f.hasRoute)
        {
          routeNodes.insert (f.route.nodes.begin (), f.route.nodes.end ());
        }
    }

  std::vector<std::optional<HelloPacket>> heard (n);
  for (NodeId i = 0; i < n; ++i)
    {
      if (!alive[i])
        {
          continue;
        }
      const auto &u = nodes[i];
      HelloPacket h;
      h.id = i;
      h.pos = pos[i];
      h.nextWaypoint = u.waypoint;
      const CellIndex here = CellOf (pos[i], map);
      for (int dr = -2; dr <= 2; ++dr)
        {
          for (int dc = -2; dc <= 2; ++dc)
            {
              CellIndex c{here.col + dc, here.row + dr};
              double v = map.InBounds (c) ? field.Value (c) : 0.0;
              h.patch[(dr + 2) * HelloPacket::kPatchSide + (dc + 2)] = v;
              if (map.InBounds (c))
                {
                  local[i].Observe (c, v, tick); // own sensing, unquantised
                }
            }
        }
      h.hopsToBs = hops[i];
      if (auto it = field.Masks ().find (i); it != field.Masks ().end ())
        {
          h.maskCell = it->second.center;
        }
      h.en = u.energy;
      h.il = il[i];
      bool nearRoute = false;
      for (const auto &[id, e] : tables[i].Entries ())
        {
          if (routeNodes.count (id))
            {
              nearRoute = true;
              break;
            }
        }
      if (nearRoute)
        {
          for (const auto &[id, e] : tables[i].Entries ())
            {
              h.summaries.push_back ({id, e.lltS, e.en, e.il, linkSet.count (CanonicalLink (i, id)) != 0});
            }
        }
      auto enc = EncodeHello (h, map);
      helloBits += static_cast<double> (enc.bits.Bits ());
      ++helloCount;
      heard[i] = DecodeHello (enc.bits, map, pos[i]);
    }

  auto velocityOf = [&] (Vec2 p, CellIndex wp, NodeId id) {
    if (id == kBs)
      {
        return Vec2{};
      }
    return VelocityFromTrajectory (p, map.CellCenter (wp), cfg.speedMps, kLoiterM);
  };

  for (NodeId j = 0; j < n; ++j)
    {
      if (!alive[j])
        {
          continue;
        }
      for (NodeId i : adjacency[j])
        {
          const auto &h = *heard[i];
          NeighborEntry e;
          e.id = i;
          e.pos = h.pos;
          e.velocity = velocityOf (h.pos, h.nextWaypoint, i);
          e.nextWaypoint = h.nextWaypoint;
          e.hopsToBs = h.hopsToBs;
          e.en = h.en;
          e.il = h.il;
          e.lltS = EstimateLltToHorizon ({pos[j], map.CellCenter (nodes[j].waypoint), j == kBs ? 0.0 : cfg.speedMps},
                                         {e.pos, map.CellCenter (h.nextWaypoint), i == kBs ? 0.0 : cfg.speedMps},
                                         cfg.cellSizeM, kLoiterM, cfg.txRangeM, cfg.lltCapS);
          e.lastHeard = now;
          e.patch = h.patch;
          e.maskCell = h.maskCell;
          e.summaries = h.summaries;
          const CellIndex there = CellOf (map.Clamp (h.pos), map);
          for (int dr = -2; dr <= 2; ++dr)
            {
              for (int dc = -2; dc <= 2; ++dc)
                {
                  CellIndex c{there.col + dc, there.row + dr};
                  if (map.InBounds (c))
                    {
                      local[j].Observe (c, h.patch[(dr + 2) * HelloPacket::kPatchSide + (dc + 2)], tick);
                    }
                }
            }
          tables[j].Upsert (std::move (e));
        }
      tables[j].Expire (now, cfg.neighborExpiryIntervals * cfg.helloIntervalS);
    }
}

void
World::Impl::UpdateHops (double lastHello)
{
  std::vector<int> next (n, kNoRouteHops);
  next[kBs] = 0;
  for (NodeId i = 1; i < n; ++i)
    {
      if (!alive[i])
        {
          continue;
        }
      int best = kNoRouteHops;
      for (const auto &[id, e] : tables[i].Entries ())
        {
          if (e.lastHeard >= lastHello)
            {
              best = std::min (best, e.hopsToBs + 1);
            }
        }
      next[i] = std::min (best, kNoRouteHops);
    }
  hops.swap (next);
}

void
World::Impl::ScanAndDeposit (double now)
{
  const bool window = InWindow (now);
  for (NodeId i = 1; i < n; ++i)
    {
      if (!alive[i] || nodes[i].role != Role::Searcher)
        {
          continue;
        }
      CellIndex c = CellOf (pos[i], map);
      int k = map.Flat (c);
      ++scanFull[k];
      if (window)
        {
          ++scanWindow[k];
        }
      field.Deposit (c, cfg.depositMagnitude);
    }
  field.Step (cfg.lambdaEvap, cfg.psiDiff);
}

void
World::Impl::MakeTargetUav (NodeId uav, int target)
{
  auto &u = nodes[uav];
  u.role = Role::TargetUav;
  u.orbitCenter = targets[target].pos;
  u.orbitRadius = cfg.orbitRadiusM;
  u.onOrbit = false;
  u.waypoint = targets[target].cell;
  targets[target].found = true;
  targets[target].uav = uav;
}

void
World::Impl::CreateFlow (int target, NodeId uav, double now)
{
  FlowState f;
  f.id = static_cast<int> (flows.size ());
  f.target = target;
  f.source = uav;
  f.startedAt = now;
  f.nextGen = now;
  flows.push_back (std::move (f));
  data.AddFlow (flows.back ().id, uav);
}

void
World::Impl::DetectTargets (double now)
{
  for (std::size_t t = 0; t < targets.size (); ++t)
    {
      if (targets[t].found)
        {
          continue;
        }
      for (NodeId i = 1; i < n; ++i)
        {
          if (alive[i] && nodes[i].role == Role::Searcher && CellOf (pos[i], map) == targets[t].cell)
            {
              MakeTargetUav (i, static_cast<int> (t));
              CreateFlow (static_cast<int> (t), i, now);
              LogEvent (now, static_cast<int> (flows.size ()) - 1, "target_found");
              break;
            }
        }
    }
}

void
World::Impl::UpdateInterference ()
{
  std::set<Link> links;
  for (const auto &f : flows)
    {
      if (!f.hasRoute)
        {
          continue;
        }
      for (std::size_t i = 0; i + 1 < f.route.nodes.size (); ++i)
        {
          links.insert (CanonicalLink (f.route.nodes[i], f.route.nodes[i + 1]));
        }
    }
  activeLinks.assign (links.begin (), links.end ());
  for (NodeId i = 0; i < n; ++i)
    {
      il[i] = alive[i] ? InterferingLinks (pos, i, activeLinks, cfg.txRangeM) : 0;
    }
}

// ---------------------------------------------------------------------------
// Routing

bool
World::Impl::Valid (const FlowState &f) const
{
  if (!f.hasRoute)
    {
      return false;
    }
  const auto &r = f.route.nodes;
  for (std::size_t i = 0; i < r.size (); ++i)
    {
      if (!alive[r[i]])
        {
          return false;
        }
      if (i + 1 < r.size () && Distance (pos[r[i]], pos[r[i + 1]]) > cfg.txRangeM)
        {
          return false;
        }
    }
  return true;
}

std::optional<std::pair<NodeId, NodeId>>
World::Impl::DetectBreak (const FlowState &f) const
{
  const auto &r = f.route.nodes;
  for (std::size_t i = 0; i + 1 < r.size (); ++i)
    {
      if (alive[r[i]] && !tables[r[i]].Contains (r[i + 1]))
        {
          return std::make_pair (r[i], r[i + 1]);
        }
    }
  return std::nullopt;
}

LinkGraph
World::Impl::KnownGraph (std::span<const NodeId> route) const
{
  LinkGraph g;
  for (NodeId r : route)
    {
      g.AddNode (r, NodeEnergy (r), il[r]);
    }
  std::set<NodeId> onRoute (route.begin (), route.end ());
  for (NodeId r : route)
    {
      if (!alive[r])
        {
          continue;
        }
      for (const auto &[id, e] : tables[r].Entries ())
        {
          if (!onRoute.count (id))
            {
              g.AddNode (id, e.en, e.il);
            }
          g.AddLink (r, id, e.lltS);
        }
    }
  for (NodeId r : route)
    {
      if (!alive[r])
        {
          continue;
        }
      for (const auto &[id, e] : tables[r].Entries ())
        {
          for (const auto &s : e.summaries)
            {
              if (s.neighbor == id)
                {
                  continue;
                }
              if (!g.HasNode (s.neighbor))
                {
                  g.AddNode (s.neighbor, s.en, s.il);
                }
              if (!g.HasLink (id, s.neighbor))
                {
                  g.AddLink (id, s.neighbor, s.lltS);
                }
            }
        }
    }
  return g;
}

DiscoveryWorld
World::Impl::DiscoveryView ()
{
  static thread_local std::vector<double> energy;
  energy.resize (n);
  for (NodeId i = 0; i < n; ++i)
    {
      energy[i] = nodes[i].energy;
    }
  DiscoveryWorld w;
  w.positions = pos;
  w.alive = alive;
  w.energy = energy;
  w.il = il;
  w.adjacency = &adjacency;
  w.bs = kBs;
  w.llt = [this] (NodeId rx, NodeId tx) -> std::optional<double> {
    const auto *e = tables[rx].Find (tx);
    return e ? std::optional<double> (e->lltS) : std::nullopt;
  };
  return w;
}

void
World::Impl::InstallRoute (FlowState &f, std::vector<NodeId> route, double now, const char *event)
{
  f.route.nodes = std::move (route);
  f.route.establishedAt = now;
  f.hasRoute = true;
  f.failedAttempts = 0;
  f.inDiscovery = false;
  LinkGraph known = KnownGraph (f.route.nodes);
  if (PipeScheme ())
    {
      f.pipe = FormPipe (f.route.nodes, known, now);
      f.hasPipe = true;
    }
  LogRoute (now, f, event, f.route.nodes, MeasureRoute (f.route.nodes, known));
}

void
World::Impl::DropRoute (FlowState &f)
{
  f.hasRoute = false;
  f.hasPipe = false;
  f.route.nodes.clear ();
}

bool
World::Impl::Discover (FlowState &f, double now)
{
  if (!f.inDiscovery)
    {
      f.inDiscovery = true;
      if (InWindow (now))
        {
          ++f.discoveries;
        }
    }
  if (now < f.holdUntil)
    {
      return false;
    }
  DiscoveryParams dp;
  dp.mode = PipeScheme () ? DiscoveryMode::Pipe : DiscoveryMode::Aodv;
  dp.slackM = cfg.rreqSlackM;
  dp.ttlS = cfg.ttlS;
  dp.enThreshold = cfg.enThreshold;
  auto world = DiscoveryView ();
  auto found = DiscoverRoute (f.source, world, dp, trafficRng);
  std::optional<std::size_t> pick;
  if (dp.mode == DiscoveryMode::Pipe)
    {
      pick = SelectActiveRoute (found.candidates, sel);
    }
  else if (!found.candidates.empty ())
    {
      pick = 0;
    }
  if (!pick)
    {
      if (++f.failedAttempts > cfg.rreqRetries)
        {
          f.failedAttempts = 0;
          f.holdUntil = now + cfg.discoveryHolddownS;
          LogEvent (now, f.id, "expired");
        }
      return false;
    }
  InstallRoute (f, std::move (found.candidates[*pick].nodes), now, "discovered");
  return true;
}

OrbitSlot
World::Impl::SlotOf (NodeId id, const FlowState &f) const
{
  const auto &u = nodes[id];
  if (id == kBs)
    {
      return {u.pos, 0.0};
    }
  if (u.role == Role::Relay || u.role == Role::TargetUav)
    {
      return {u.orbitCenter, u.orbitRadius};
    }
  if (id == f.source)
    {
      return {targets[f.target].pos, cfg.orbitRadiusM};
    }
  return {map.CellCenter (CellOf (pos[id], map)), cfg.orbitRadiusM};
}

bool
World::Impl::EstablishRelay (FlowState &f, double now)
{
  if (!f.inDiscovery)
    {
      f.inDiscovery = true;
      if (InWindow (now))
        {
          ++f.discoveries;
        }
    }
  auto world = DiscoveryView ();
  std::vector<NodeId> fresh;
  auto route = EstablishRelayRoute (
      f.id, f.source, world, [&] (NodeId id) { return SlotOf (id, f); }, cfg.txRangeM, relays, trafficRng, now,
      &fresh);
  if (!route)
    {
      return false;
    }
  for (NodeId r : fresh)
    {
      auto &u = nodes[r];
      if (u.role != Role::Searcher)
        {
          continue; // target UAVs keep circling their own target
        }
      CellIndex c = CellOf (pos[r], map);
      u.role = Role::Relay;
      u.orbitCenter = map.CellCenter (c);
      u.orbitRadius = cfg.orbitRadiusM;
      u.onOrbit = false;
      u.waypoint = c;
    }
  bool again = f.reestablishments > 0 || f.linkLosses > 0;
  InstallRoute (f, route->nodes, now, again ? "relay_reestablished" : "relay_established");
  return true;
}

void
World::Impl::RouteFlows (double now, long long tick)
{
  const bool notify = tick % notifyTicks == 0;
  for (auto &f : flows)
    {
      RouteFlow (f, now, notify);
    }
}

void
World::Impl::RouteFlow (FlowState &f, double now, bool notify)
{
  if (!alive[f.source])
    {
      DropRoute (f);
      return;
    }
  const bool window = InWindow (now);

  if (f.hasRoute)
    {
      if (auto broken = DetectBreak (f))
        {
          ++f.linkLosses;
          LinkGraph known = KnownGraph (f.route.nodes);
          LogRoute (now, f, "break", f.route.nodes, MeasureRoute (f.route.nodes, known));
          if (sc.scheme == Scheme::Relay)
            {
              if (window)
                {
                  ++f.reestablishments;
                }
              auto freed = OnRelayFailure (f.id, relays);
              for (NodeId r : freed)
                {
                  if (alive[r] && nodes[r].role == Role::Relay)
                    {
                      nodes[r].role = Role::Searcher;
                      nodes[r].onOrbit = false;
                      nodes[r].waypoint = CellOf (pos[r], map);
                    }
                }
              DropRoute (f);
            }
          else
            {
              if (window)
                {
                  ++f.breaks;
                }
              bool recovered = false;
              if (PipeScheme () && f.hasPipe)
                {
                  LinkGraph g = f.pipe.graph;
                  g.RemoveLink (broken->first, broken->second);
                  if (auto pick = SelectPipeRoute (g, f.source, kBs, sel, limits))
                    {
                      InstallRoute (f, std::move (pick->nodes), now, "switched");
                      recovered = true;
                    }
                }
              if (!recovered)
                {
                  DropRoute (f);
                  LogEvent (now, f.id, "rediscover");
                }
            }
        }
      else if (PipeScheme () && notify)
        {
          LinkGraph known = KnownGraph (f.route.nodes);
          f.pipe = FormPipe (f.route.nodes, known, now);
          f.hasPipe = true;
          auto d = MaybeSwitch (f.route.nodes, f.pipe, kBs, sel, limits);
          if (d.action == SwitchAction::Switched)
            {
              if (window)
                {
                  ++f.switches;
                }
              InstallRoute (f, std::move (d.route.nodes), now, "switched");
            }
          else if (d.action == SwitchAction::Rediscover)
            {
              // Keep forwarding on the old route until a new one is found
              // or the old one actually breaks.
              LogEvent (now, f.id, "rediscover");
              Discover (f, now);
            }
        }
    }

  if (!f.hasRoute)
    {
      if (sc.scheme == Scheme::Relay)
        {
          EstablishRelay (f, now);
        }
      else
        {
          Discover (f, now);
        }
    }
}

// ---------------------------------------------------------------------------
// Topology control

void
World::Impl::RunTopologyControl (double now)
{
  std::set<NodeId> decided;
  std::set<NodeId> onRoutes;
  for (const auto &f : flows)
    {
      if (f.hasRoute)
        {
          onRoutes.insert (f.route.nodes.begin (), f.route.nodes.end ());
        }
    }
  // Retract masks of nodes that no longer serve any route first.
  std::vector<NodeId> stale;
  for (const auto &[owner, m] : field.Masks ())
    {
      if (!onRoutes.count (owner) || !alive[owner])
        {
          stale.push_back (owner);
        }
    }
  auto logMask = [&] (NodeId owner, const MaskRect *m, const char *action) {
    if (!opts.maskLog)
      {
        return;
      }
    char buf[128];
    if (m)
      {
        std::snprintf (buf, sizeof buf, "%.1f,%d,%d,%d,%.4f,%.4f,%s\n", now, owner, m->center.col, m->center.row,
                       m->longAxis.x, m->longAxis.y, action);
      }
    else
      {
        std::snprintf (buf, sizeof buf, "%.1f,%d,,,,,%s\n", now, owner, action);
      }
    *opts.maskLog << buf;
  };
  for (NodeId owner : stale)
    {
      field.RemoveMask (owner);
      logMask (owner, nullptr, "removed");
    }

  auto neighborsOf = [this] (NodeId id) {
    std::vector<NodeId> out;
    for (const auto &[nid, e] : tables[id].Entries ())
      {
        out.push_back (nid);
      }
    return out;
  };
  auto posOf = [this] (NodeId id) { return pos[id]; };
  for (const auto &f : flows)
    {
      if (!f.hasRoute)
        {
          continue;
        }
      for (const auto &d : TcStep (f.route.nodes, neighborsOf, posOf, cfg.thDegree))
        {
          if (!alive[d.owner] || !decided.insert (d.owner).second)
            {
              continue;
            }
          if (d.apply)
            {
              bool had = field.HasMask (d.owner);
              auto res = field.ApplyMask (d.owner, pos[d.owner], d.axis, cfg.txRangeM, nodes[d.owner].heading, now);
              if (!had)
                {
                  logMask (d.owner, &field.Masks ().at (d.owner), res.degenerateAxis ? "applied_degenerate" : "applied");
                }
            }
          else if (field.RemoveMask (d.owner))
            {
              logMask (d.owner, nullptr, "removed");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Mobility

std::vector<NeighborView>
World::Impl::NeighborViews (NodeId id) const
{
  std::vector<NeighborView> out;
  for (const auto &[nid, e] : tables[id].Entries ())
    {
      NeighborView v;
      v.id = nid;
      v.pos = e.pos;
      v.predictedPos = nid == kBs ? e.pos : map.CellCenter (e.nextWaypoint);
      v.hopsToBs = e.hopsToBs;
      out.push_back (v);
    }
  return out;
}

void
World::Impl::ChooseWaypoints (long long tick)
{
  BscapParams bp{cfg.beta, cfg.degreeCap, cfg.txRangeM, cfg.candidateNearM, cfg.candidateFarM,
                 cfg.connectivityMarginM};
  for (NodeId i = 1; i < n; ++i)
    {
      auto &u = nodes[i];
      if (!alive[i] || u.role != Role::Searcher)
        {
          continue;
        }
      u.pos = pos[i];
      if (hops[i] >= kNoRouteHops && tick > 2)
        {
          // Cut off from the BS: head back until a route is heard again.
          Vec2 d = cfg.BsPos () - pos[i];
          double len = Norm (d);
          Vec2 goal = len > 1e-9 ? pos[i] + d * (std::min (len, cfg.candidateFarM) / len) : pos[i];
          u.waypoint = CellOf (map.Clamp (goal), map);
          continue;
        }
      if (!WaypointReached (u, map))
        {
          continue;
        }
      auto views = NeighborViews (i);
      std::vector<const MaskRect *> masks;
      const auto &all = field.Masks ();
      if (auto it = all.find (i); it != all.end ())
        {
          masks.push_back (&it->second);
        }
      for (const auto &[nid, e] : tables[i].Entries ())
        {
          if (e.maskCell)
            {
              if (auto it = all.find (nid); it != all.end ())
                {
                  masks.push_back (&it->second);
                }
            }
        }
      LocalView view (local[i], map, tick, cfg.lambdaEvap, std::move (masks));
      bp.ownHops = hops[i];
      bp.ownId = i;
      u.waypoint = SelectWaypoint (u, view, views, map, bp).cell;
    }
}

void
World::Impl::Kinematics (double dt)
{
  const double turn = cfg.maxTurnRateDegPerS * std::numbers::pi / 180.0;
  for (NodeId i = 1; i < n; ++i)
    {
      auto &u = nodes[i];
      if (!alive[i])
        {
          continue;
        }
      switch (u.role)
        {
        case Role::Searcher:
          StepKinematics (u, map, dt, turn);
          break;
        case Role::TargetUav:
        case Role::Relay:
          OrbitStep (u, u.orbitCenter, u.orbitRadius, dt, map);
          break;
        case Role::BaseStation:
          break;
        }
      pos[i] = u.pos;
    }
}

// ---------------------------------------------------------------------------
// Accounting

void
World::Impl::TrackRouteUp (double now, double dt)
{
  if (!InWindow (now))
    {
      return;
    }
  for (auto &f : flows)
    {
      bool up = Valid (f);
      if (up)
        {
          f.upTime += dt;
          f.hopTime += dt * f.route.Hc ();
          if (!f.upOpen)
            {
              f.upOpen = true;
              f.upStart = now;
            }
        }
      else if (f.upOpen)
        {
          f.upOpen = false;
          f.upIntervals.emplace_back (f.upStart, now);
        }
    }
}

void
World::Impl::GenerateTraffic (double t0, double t1)
{
  for (auto &f : flows)
    {
      while (f.nextGen < t1 - 1e-12)
        {
          double t = std::max (f.nextGen, t0);
          data.Generate (f.id, t, InWindow (t));
          f.nextGen += genInterval;
        }
    }
}

void
World::Impl::RecordSeries (double now)
{
  SeriesPoint p;
  p.t = now;
  long full = std::count_if (scanFull.begin (), scanFull.end (), [] (auto v) { return v > 0; });
  long win = std::count_if (scanWindow.begin (), scanWindow.end (), [] (auto v) { return v > 0; });
  p.coverageFull = 100.0 * static_cast<double> (full) / static_cast<double> (scanFull.size ());
  p.coverageWindow = 100.0 * static_cast<double> (win) / static_cast<double> (scanWindow.size ());
  double s = 0;
  int k = 0;
  for (const auto &f : flows)
    {
      if (auto v = Pdr (data.Counts (f.id)))
        {
          s += *v;
          ++k;
        }
    }
  p.pdr = k ? s / k : 0.0;
  series.push_back (p);
}

// ---------------------------------------------------------------------------
// World facade

World::World (Scenario scenario, std::uint64_t seed, RunOptions options)
    : m_impl (std::make_unique<Impl> (std::move (scenario), seed, options))
{
}

World::~World () = default;

void
World::Step ()
{
  m_impl->StepOnce ();
}

void
World::RunUntil (double t)
{
  while (m_impl->clock.Now () < t - 1e-9)
    {
      m_impl->StepOnce ();
    }
}

MetricsReport
World::Run ()
{
  RunUntil (m_impl->cfg.TotalS ());
  return Report ();
}

MetricsReport
World::Report () const
{
  const auto &im = *m_impl;
  const double now = im.clock.Now ();
  const double w0 = im.cfg.warmupS;
  const double w1 = std::min (now, im.cfg.TotalS ());

  MetricsReport r;
  r.key.scenario = im.sc.name;
  r.key.scheme = SchemeName (im.sc.scheme);
  r.key.nUavs = im.cfg.nUavs;
  r.key.speedMps = im.cfg.speedMps;
  r.key.dataRateBps = im.cfg.dataRateBps;
  r.key.failurePct = im.sc.failurePct;
  r.key.seed = im.seed;

  for (const auto &f : im.flows)
    {
      FlowReport fr;
      fr.flow = f.id;
      fr.counts = im.data.Counts (f.id);
      fr.counts.inFlight = im.data.InFlight (f.id);
      fr.pdr = Pdr (fr.counts);
      fr.linkLosses = f.linkLosses;
      fr.routeBreaks = im.sc.scheme == Scheme::Relay ? 0 : f.breaks;
      fr.reestablishments = f.reestablishments;
      fr.switches = f.switches;
      fr.discoveries = f.discoveries;
      if (w1 > w0)
        {
          auto iv = f.upIntervals;
          if (f.upOpen)
            {
              iv.emplace_back (f.upStart, w1);
            }
          fr.routeUpPct = RouteUpPercent (iv, w0, w1);
        }
      fr.avgRouteLength = f.upTime > 0 ? f.hopTime / f.upTime : 0.0;
      r.flows.push_back (fr);
    }
  r.Aggregate ();

  auto cw = CoverageAndFairness (im.scanWindow);
  auto cf = CoverageAndFairness (im.scanFull);
  r.cvWindow = cw.cvPercent;
  r.fairness = cw.fairness;
  r.vf = cw.vf;
  r.cvFull = cf.cvPercent;
  r.relays = static_cast<double> (im.relays.RelayCount ());
  r.meanHelloBits = im.helloCount ? im.helloBits / static_cast<double> (im.helloCount) : 0.0;
  r.series = im.series;
  return r;
}

double
World::Now () const
{
  return m_impl->clock.Now ();
}

const SimConfig &
World::Config () const
{
  return m_impl->cfg;
}

const std::vector<UavState> &
World::Nodes () const
{
  return m_impl->nodes;
}

const PheromoneField &
World::Field () const
{
  return m_impl->field;
}

const NeighborTable &
World::Table (NodeId n) const
{
  return m_impl->tables.at (n);
}

int
World::HopsToBs (NodeId n) const
{
  return m_impl->hops.at (n);
}

const FailurePlan &
World::Failures () const
{
  return m_impl->failures;
}

int
World::FlowCount () const
{
  return static_cast<int> (m_impl->flows.size ());
}

FlowView
World::Flow (int fi) const
{
  const auto &f = m_impl->flows.at (fi);
  FlowView v;
  v.id = f.id;
  v.target = f.target;
  v.source = f.source;
  v.route = f.hasRoute ? &f.route : nullptr;
  v.counts = m_impl->data.Counts (f.id);
  v.counts.inFlight = m_impl->data.InFlight (f.id);
  v.linkLosses = f.linkLosses;
  v.switches = f.switches;
  return v;
}

bool
World::RouteValid (int f) const
{
  return m_impl->Valid (m_impl->flows.at (f));
}

std::size_t
World::RelayCount () const
{
  return m_impl->relays.RelayCount ();
}

MetricsReport
RunScenario (const Scenario &scenario, std::uint64_t seed, const RunOptions &options)
{
  World w (scenario, seed, options);
  return w.Run ();
}

std::vector<MetricsReport>
RunBatch (std::span<const RunSpec> specs, int threads)
{
  std::vector<MetricsReport> out (specs.size ());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex errorMutex;
  auto worker = [&] {
    for (;;)
      {
        std::size_t i = next.fetch_add (1);
        if (i >= specs.size ())
          {
            return;
          }
        try
          {
            out[i] = RunScenario (specs[i].scenario, specs[i].seed);
          }
        catch (...)
          {
            std::lock_guard lock (errorMutex);
            if (!error)
              {
                error = std::current_exception ();
              }
          }
      }
  };
  int k = std::max (1, std::min<int> (threads, static_cast<int> (specs.size ())));
  if (k == 1)
    {
      worker ();
    }
  else
    {
      std::vector<std::thread> pool;
      for (int t = 0; t < k; ++t)
        {
          pool.emplace_back (worker);
        }
      for (auto &t : pool)
        {
          t.join ();
        }
    }
  if (error)
    {
      std::rethrow_exception (error);
    }
  return out;
}

} // namespace uavsim
