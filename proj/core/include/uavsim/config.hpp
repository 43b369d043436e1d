#ifndef UAVSIM_CONFIG_HPP
#define UAVSIM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "uavsim/geometry.hpp"

namespace uavsim {

/// Every tunable of a run. Defaults reproduce the evaluation setup (6 km map,
/// 100 m cells, 1 km range, 11 Mbps channel, 1500 B packets, 3 s TTL,
/// 1000 s warm-up plus 2000 s measurement). Constants without a published
/// value (energy model, BS-CAP candidate geometry, protocol cadences) are
/// exposed here so they can be swept.
struct SimConfig
{
  // World
  double mapWidthM = 6000.0;
  double mapHeightM = 6000.0;
  double cellSizeM = 100.0;
  double bsX = 3000.0;
  double bsY = 200.0;

  // Swarm
  int nUavs = 50;
  double speedMps = 20.0;
  double maxTurnRateDegPerS = 30.0;
  double launchRadiusM = 500.0;
  double orbitRadiusM = 100.0;

  // Radio / traffic
  double txRangeM = 1000.0;
  double channelRateBps = 11e6;
  int packetBytes = 1500;
  double ttlS = 3.0;
  double dataRateBps = 2e6;
  double processingDelayS = 0.010;
  double lltCapS = 3600.0;

  // Phases
  double warmupS = 1000.0;
  double measureS = 2000.0;

  // Pheromone
  double lambdaEvap = 0.006;
  double psiDiff = 0.006;
  double depositMagnitude = 1.0;

  // BS-CAP mobility
  double beta = 1.5;
  int degreeCap = 4;
  double candidateNearM = 300.0;
  double candidateFarM = 500.0;
  double connectivityMarginM = 200.0;

  // Routing
  double w1 = 0.5;
  double w2 = 0.5;
  double alpha = 0.3;
  int hcSlack = 3;
  double rreqSlackM = 200.0;
  int rreqRetries = 3;
  double discoveryHolddownS = 5.0;
  int pipeVisitBudget = 64;
  int pipeSizeForBudget = 16;

  // Topology control
  int thDegree = 2;

  // Energy model
  double enInitial = 100.0;
  double enThreshold = 10.0;
  double enDrainFlightPerS = 0.01;
  double enDrainPerPacket = 2e-5;
  double enTolerance = 0.02;

  // Cadences
  double dtS = 0.1;
  double protocolTickS = 1.0;
  double helloIntervalS = 1.0;
  double notifyIntervalS = 2.0;
  int neighborExpiryIntervals = 2;

  std::uint64_t seed = 1;

  double TotalS () const { return warmupS + measureS; }
  Vec2 BsPos () const { return {bsX, bsY}; }
  AreaMap Map () const { return AreaMap (mapWidthM, mapHeightM, cellSizeM); }
  double PacketBits () const { return packetBytes * 8.0; }

  /// Throws std::invalid_argument on the first violated invariant.
  void Validate () const;

  std::map<std::string, std::string> ToKeyValues () const;
  /// Applies recognised keys; unknown keys throw std::invalid_argument.
  void Apply (const std::map<std::string, std::string> &kv);
};

/// Flat `key = value` text format; `#` starts a comment.
SimConfig ReadConfig (std::istream &in, SimConfig base = {});
SimConfig LoadConfigFile (const std::string &path, SimConfig base = {});
void WriteConfig (std::ostream &out, const SimConfig &cfg);

/// Simulation clock: fixed kinematic sub-steps inside protocol ticks.
class SimClock
{
public:
  SimClock (double dtS, double tickS);

  double Now () const { return static_cast<double> (m_steps) * m_dt; }
  double Dt () const { return m_dt; }
  long long Steps () const { return m_steps; }
  long long Ticks () const { return m_steps / m_stepsPerTick; }
  int StepsPerTick () const { return m_stepsPerTick; }
  bool AtTickBoundary () const { return m_steps % m_stepsPerTick == 0; }
  void Advance () { ++m_steps; }

private:
  double m_dt;
  int m_stepsPerTick;
  long long m_steps = 0;
};

} // namespace uavsim

#endif
