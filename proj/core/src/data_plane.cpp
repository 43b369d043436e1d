#include "uavsim/data_plane.hpp"

#include <stdexcept>

namespace uavsim {

namespace {
constexpr int kArrival = 0;
constexpr int kServerFree = 1;
constexpr int kDelivered = 0;
constexpr int kExpired = 1;
constexpr int kDropped = 2;
} // namespace

DataPlane::DataPlane (int nodeCount, DataPlaneParams params)
    : m_p (params), m_queues (nodeCount), m_sourceOf (nodeCount), m_busyUntil (nodeCount, 0.0), m_txPrev (nodeCount, 0),
      m_txNow (nodeCount, 0), m_contenders (nodeCount, 0), m_rate (nodeCount, params.channelRateBps)
{
  if (nodeCount <= 0 || !(params.channelRateBps > 0) || !(params.packetBits > 0) || !(params.ttlS > 0))
    {
      throw std::invalid_argument ("DataPlane: invalid parameters");
    }
}

double
DataPlane::TxTime (int contenders) const
{
  return m_p.packetBits / (m_p.channelRateBps / (1.0 + contenders));
}

void
DataPlane::AddFlow (int flow, NodeId source)
{
  if (flow != static_cast<int> (m_flows.size ()))
    {
      throw std::invalid_argument ("DataPlane: flows must be added in id order");
    }
  m_sourceOf.at (source).push_back (flow);
  m_flows.push_back ({source, 0, {}, {}});
}

void
DataPlane::Generate (int flow, double t, bool counted)
{
  auto &f = m_flows.at (flow);
  DataPacket p;
  p.flow = flow;
  p.seq = f.nextSeq++;
  p.createdAt = t;
  p.counted = counted;
  if (counted)
    {
      ++f.counts.generated;
    }
  std::size_t idx = Alloc (std::move (p));
  m_events.push ({t, m_order++, kArrival, f.source, idx});
}

long
DataPlane::InFlight (int flow) const
{
  const auto &c = m_flows.at (flow).counts;
  return c.generated - c.delivered - c.expired - c.dropped;
}

std::size_t
DataPlane::Alloc (DataPacket p)
{
  if (!m_free.empty ())
    {
      std::size_t idx = m_free.back ();
      m_free.pop_back ();
      m_pool[idx] = std::move (p);
      return idx;
    }
  m_pool.push_back (std::move (p));
  return m_pool.size () - 1;
}

void
DataPlane::Free (std::size_t idx)
{
  m_pool[idx].path.clear ();
  m_free.push_back (idx);
}

void
DataPlane::Finish (std::size_t idx, int fate)
{
  const auto &p = m_pool[idx];
  if (p.counted)
    {
      auto &c = m_flows[p.flow].counts;
      (fate == kDelivered ? c.delivered : fate == kExpired ? c.expired : c.dropped) += 1;
    }
  Free (idx);
}

void
DataPlane::Enqueue (NodeId node, std::size_t idx)
{
  const auto &p = m_pool[idx];
  QueueKey key{p.createdAt + m_p.ttlS, m_order++, idx};
  if (p.path.empty ())
    {
      m_flows[p.flow].held.push_back (key); // creation order is expiry order
    }
  else
    {
      m_queues[node].insert (key);
    }
}

void
DataPlane::PurgeExpired (NodeId node, double t)
{
  auto &q = m_queues[node];
  while (!q.empty () && q.begin ()->expiry < t)
    {
      Finish (q.begin ()->packet, kExpired);
      q.erase (q.begin ());
    }
  for (int flow : m_sourceOf[node])
    {
      auto &held = m_flows[flow].held;
      while (!held.empty () && held.front ().expiry < t)
        {
          Finish (held.front ().packet, kExpired);
          held.pop_front ();
        }
    }
}

void
DataPlane::KillNode (NodeId node)
{
  for (const auto &k : m_queues.at (node))
    {
      Finish (k.packet, kDropped);
    }
  m_queues[node].clear ();
  for (int flow : m_sourceOf.at (node))
    {
      for (const auto &k : m_flows[flow].held)
        {
          Finish (k.packet, kDropped);
        }
      m_flows[flow].held.clear ();
    }
}

void
DataPlane::TryServe (NodeId node, double t, const DataPlaneContext &ctx)
{
  if (!ctx.alive[node] || m_busyUntil[node] > t)
    {
      return;
    }
  PurgeExpired (node, t);
  auto &q = m_queues[node];

  // Held packets of flows with a usable route compete with the queue in
  // expiry order; the rest stay put.
  const std::vector<NodeId> *routes[8] = {};
  const auto &sourced = m_sourceOf[node];
  for (std::size_t k = 0; k < sourced.size () && k < 8; ++k)
    {
      const auto *route = ctx.routeOf ? ctx.routeOf (sourced[k]) : nullptr;
      if (route != nullptr && route->size () >= 2 && route->front () == node)
        {
          routes[k] = route;
        }
    }
  if (sourced.size () > 8)
    {
      throw std::logic_error ("DataPlane: too many flows sourced at one node");
    }

  for (;;)
    {
      int from = -1; // -1: the routed queue; k: held packets of sourced[k]
      const QueueKey *best = q.empty () ? nullptr : &*q.begin ();
      for (std::size_t k = 0; k < sourced.size (); ++k)
        {
          const auto &held = m_flows[sourced[k]].held;
          if (routes[k] != nullptr && !held.empty () && (best == nullptr || held.front () < *best))
            {
              best = &held.front ();
              from = static_cast<int> (k);
            }
        }
      if (best == nullptr)
        {
          return;
        }
      const std::size_t idx = best->packet;
      DataPacket &p = m_pool[idx];
      if (from < 0)
        {
          q.erase (q.begin ());
        }
      else
        {
          m_flows[sourced[from]].held.pop_front ();
          p.path = *routes[from];
          p.hop = 0;
        }
      const NodeId next = p.path[p.hop + 1];
      if (!ctx.alive[next] || Distance (ctx.positions[node], ctx.positions[next]) > m_p.rangeM)
        {
          Finish (idx, kDropped);
          continue;
        }
      const double tx = m_p.packetBits / m_rate[node];
      m_busyUntil[node] = t + tx;
      m_txNow[node] = 1;
      ++m_transmissions;
      if (ctx.onTransmit)
        {
          ctx.onTransmit (node);
        }
      ++p.hop;
      m_events.push ({t + tx + m_p.processingDelayS, m_order++, kArrival, next, idx});
      m_events.push ({t + tx, m_order++, kServerFree, node, 0});
      return;
    }
}

void
DataPlane::Step (double t0, double dt, const DataPlaneContext &ctx)
{
  const std::size_t n = m_queues.size ();
  const double t1 = t0 + dt;
  const double r2 = m_p.rangeM * m_p.rangeM;
  m_talkers.clear ();
  for (std::size_t j = 0; j < n; ++j)
    {
      if (m_txPrev[j] && ctx.alive[j])
        {
          m_talkers.push_back (j);
        }
    }
  for (std::size_t i = 0; i < n; ++i)
    {
      int c = 0;
      if (ctx.alive[i])
        {
          for (std::size_t j : m_talkers)
            {
              if (j != i && DistanceSq (ctx.positions[i], ctx.positions[j]) <= r2)
                {
                  ++c;
                }
            }
        }
      m_contenders[i] = c;
      m_rate[i] = m_p.channelRateBps / (1.0 + c);
      m_txNow[i] = 0;
    }

  for (std::size_t i = 0; i < n; ++i)
    {
      if (!m_queues[i].empty () || !m_sourceOf[i].empty ())
        {
          TryServe (static_cast<NodeId> (i), t0, ctx);
        }
    }

  while (!m_events.empty () && m_events.top ().t < t1)
    {
      Event e = m_events.top ();
      m_events.pop ();
      if (e.kind == kServerFree)
        {
          TryServe (e.node, e.t, ctx);
          continue;
        }
      const DataPacket &p = m_pool[e.packet];
      if (!ctx.alive[e.node])
        {
          Finish (e.packet, kDropped);
          continue;
        }
      if (e.node == ctx.bs)
        {
          Finish (e.packet, e.t - p.createdAt <= m_p.ttlS ? kDelivered : kExpired);
          continue;
        }
      Enqueue (e.node, e.packet);
      TryServe (e.node, e.t, ctx);
    }
  m_txPrev.swap (m_txNow);
}

} // namespace uavsim
