#ifndef UAVSIM_DATA_PLANE_HPP
#define UAVSIM_DATA_PLANE_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <span>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/metrics.hpp"

namespace uavsim {

struct DataPacket
{
  int flow = 0;
  long seq = 0;
  double createdAt = 0;
  bool counted = false;       // generated inside the measurement window
  std::vector<NodeId> path;   // fixed when the source first transmits
  std::size_t hop = 0;        // index of the holder in `path`
};

struct DataPlaneParams
{
  double channelRateBps = 11e6;
  double packetBits = 12000;
  double processingDelayS = 0.010;
  double ttlS = 3.0;
  double rangeM = 1000.0;
};

/// Per-step view of the world the data plane needs.
struct DataPlaneContext
{
  std::span<const Vec2> positions;
  std::span<const char> alive;
  NodeId bs = 0;
  /// Current route of a flow, source first; nullptr when it has none.
  std::function<const std::vector<NodeId> *(int flow)> routeOf;
  /// Called once per data transmission by `node`.
  std::function<void (NodeId node)> onTransmit;
};

/// Abstracted TDMA forwarding: each node serves its queue in order of
/// time-to-expiry at channel_rate / (1 + contenders), where contenders are
/// the nodes in range that transmitted during the previous step.
class DataPlane
{
public:
  DataPlane (int nodeCount, DataPlaneParams params);

  /// Seconds to push one packet at `contenders` competing transmitters.
  double TxTime (int contenders) const;

  void AddFlow (int flow, NodeId source);
  /// Injects one packet at the flow's source queue.
  void Generate (int flow, double t, bool counted);

  /// Processes every event in [t0, t0 + dt).
  void Step (double t0, double dt, const DataPlaneContext &ctx);

  /// Drops everything queued at `node` (counted as dropped).
  void KillNode (NodeId node);

  const FlowCounts &Counts (int flow) const { return m_flows.at (flow).counts; }
  /// Counted packets not yet delivered, expired or dropped.
  long InFlight (int flow) const;
  long Transmissions () const { return m_transmissions; }
  int Contenders (NodeId node) const { return m_contenders.at (node); }
  bool TransmittedLastStep (NodeId node) const { return m_txPrev.at (node) != 0; }

private:
  struct QueueKey
  {
    double expiry;
    long order;
    std::size_t packet;
    auto operator<=> (const QueueKey &) const = default;
  };
  struct Event
  {
    double t;
    long order;
    int kind; // 0 arrival, 1 server free
    NodeId node;
    std::size_t packet;
    bool operator> (const Event &o) const { return t != o.t ? t > o.t : order > o.order; }
  };
  struct FlowState
  {
    NodeId source = kNoNode;
    long nextSeq = 0;
    FlowCounts counts;
    std::deque<QueueKey> held; // at the source, waiting for a route
  };

  std::size_t Alloc (DataPacket p);
  void Free (std::size_t idx);
  void Finish (std::size_t idx, int fate); // 0 delivered, 1 expired, 2 dropped
  void Enqueue (NodeId node, std::size_t idx);
  void TryServe (NodeId node, double t, const DataPlaneContext &ctx);
  void PurgeExpired (NodeId node, double t);

  DataPlaneParams m_p;
  std::vector<DataPacket> m_pool;
  std::vector<std::size_t> m_free;
  std::vector<std::set<QueueKey>> m_queues; // packets already on a path
  std::vector<std::vector<int>> m_sourceOf;  // flows sourced at each node
  std::vector<double> m_busyUntil;
  std::vector<char> m_txPrev;
  std::vector<char> m_txNow;
  std::vector<int> m_contenders;
  std::vector<std::size_t> m_talkers;
  std::vector<double> m_rate;
  std::vector<FlowState> m_flows;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> m_events;
  long m_order = 0;
  long m_transmissions = 0;
};

} // namespace uavsim

#endif
