#ifndef UAVSIM_ENGINE_HPP
#define UAVSIM_ENGINE_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "uavsim/metrics.hpp"
#include "uavsim/mobility.hpp"
#include "uavsim/pheromone_field.hpp"
#include "uavsim/radio.hpp"
#include "uavsim/routing.hpp"
#include "uavsim/scenario.hpp"

namespace uavsim {

/// Optional outputs of a run. Null streams are skipped.
struct RunOptions
{
  std::ostream *eventLog = nullptr; // t,flow,event,route,hc,il,rlt,en_r
  std::ostream *maskLog = nullptr;  // t,owner,col,row,axis_x,axis_y,action
  std::ostream *trace = nullptr;    // t,node,x,y,role per protocol tick
  std::ostream *heatmap = nullptr;  // pheromone snapshots
  double heatmapIntervalS = 100.0;
  double seriesIntervalS = 10.0;
};

/// Read-only view of one flow for tests and tools.
struct FlowView
{
  int id = 0;
  int target = 0;
  NodeId source = kNoNode;
  const Route *route = nullptr; // null when route-less
  FlowCounts counts;
  int linkLosses = 0;
  int switches = 0;
};

/// One simulation run: node state, protocol state and metric accumulators.
/// Strictly single-threaded.
class World
{
public:
  World (Scenario scenario, std::uint64_t seed, RunOptions options = {});
  ~World ();
  World (const World &) = delete;
  World &operator= (const World &) = delete;

  /// Advances one kinematic step.
  void Step ();
  void RunUntil (double t);
  /// Runs to the end of the measurement window and returns the report.
  MetricsReport Run ();
  /// Report over everything simulated so far.
  MetricsReport Report () const;

  double Now () const;
  const SimConfig &Config () const;
  const std::vector<UavState> &Nodes () const;
  const PheromoneField &Field () const;
  const NeighborTable &Table (NodeId n) const;
  int HopsToBs (NodeId n) const;
  const FailurePlan &Failures () const;
  int FlowCount () const;
  FlowView Flow (int f) const;
  /// Route installed and physically intact right now.
  bool RouteValid (int f) const;
  std::size_t RelayCount () const;

private:
  struct Impl;
  std::unique_ptr<Impl> m_impl;
};

MetricsReport RunScenario (const Scenario &scenario, std::uint64_t seed, const RunOptions &options = {});

struct RunSpec
{
  Scenario scenario;
  std::uint64_t seed = 1;
};

/// Runs every spec, `threads` at a time; results keep the order of `specs`.
std::vector<MetricsReport> RunBatch (std::span<const RunSpec> specs, int threads = 1);

} // namespace uavsim

#endif
