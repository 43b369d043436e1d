#ifndef UAVSIM_SCENARIO_HPP
#define UAVSIM_SCENARIO_HPP

#include <span>
#include <string>
#include <vector>

#include "uavsim/config.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

enum class Scheme
{
  Aodv,
  Pipe,
  TcPipe,
  Relay,
};

const char *SchemeName (Scheme s);
/// Accepts aodv, pipe, tcpipe (or tc-pipe) and relay, case-insensitively.
Scheme ParseScheme (const std::string &name);
inline constexpr Scheme kAllSchemes[] = {Scheme::Aodv, Scheme::Pipe, Scheme::TcPipe, Scheme::Relay};

struct Scenario
{
  std::string name;
  std::vector<Vec2> targets;
  Scheme scheme = Scheme::TcPipe;
  int failurePct = 0;
  int nRuns = 30;
  SimConfig config;

  /// Throws std::invalid_argument for targets off the map, a failure
  /// percentage outside [0, 100] or an invalid configuration.
  void Validate () const;
};

struct TargetLayout
{
  std::string name;
  std::vector<Vec2> targets;
};

/// C1..C6 target layouts on the 6 km map.
const std::vector<TargetLayout> &BuiltinLayouts ();
/// Throws std::invalid_argument for unknown names.
const TargetLayout &FindLayout (const std::string &name);
Scenario MakeScenario (const std::string &layout, Scheme scheme, const SimConfig &cfg = {}, int failurePct = 0);

struct FailureEvent
{
  NodeId node = kNoNode;
  double time = 0;
};

/// Node failures sorted by time.
struct FailurePlan
{
  std::vector<FailureEvent> events;
};

/// round(pct% of nUavs) victims among UAV ids 1..nUavs minus `excluded`,
/// each failing at a uniform time in [t0, t1]. Eligible nodes are shuffled
/// and every one gets a time before the prefix is taken, so a higher
/// percentage from the same stream extends a lower one.
FailurePlan MakeFailurePlan (int nUavs, int pct, std::span<const NodeId> excluded, double t0, double t1,
                             RngStream &rng);

} // namespace uavsim

#endif
