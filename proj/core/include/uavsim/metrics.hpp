#ifndef UAVSIM_METRICS_HPP
#define UAVSIM_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uavsim {

/// Packet fates for one flow. Only packets generated inside the measurement
/// window are counted.
struct FlowCounts
{
  long generated = 0;
  long delivered = 0;
  long expired = 0;
  long dropped = 0;
  long inFlight = 0;

  bool Conserved () const { return generated == delivered + expired + dropped + inFlight; }
};

/// delivered / generated; nullopt when nothing was generated.
std::optional<double> Pdr (const FlowCounts &c);

/// Percentage of [w0, w1] covered by the union of `up` intervals. Intervals
/// may overlap and extend past the window.
double RouteUpPercent (std::vector<std::pair<double, double>> up, double w0, double w1);

struct CoverageStats
{
  double cvPercent = 0;  // cells with at least one scan
  double fairness = 0;   // Jain index; 0 with allZero when nothing was scanned
  double vf = 0;         // mean scans per cell
  bool allZero = true;
};

CoverageStats CoverageAndFairness (std::span<const std::uint32_t> scans);

/// (sum x)^2 / (n sum x^2); 0 for an all-zero or empty input.
double JainIndex (std::span<const double> x);

struct RunKey
{
  std::string scenario;
  std::string scheme;
  int nUavs = 0;
  double speedMps = 0;
  double dataRateBps = 0;
  int failurePct = 0;
  std::uint64_t seed = 0;
};

struct FlowReport
{
  int flow = 0;
  FlowCounts counts;
  std::optional<double> pdr;
  int routeBreaks = 0;      // as reported (pinned to 0 for the relay scheme)
  int linkLosses = 0;       // detected losses before any reporting rule
  int reestablishments = 0; // relay routes rebuilt after a failure
  int switches = 0;
  int discoveries = 0;
  double routeUpPct = 0;
  double avgRouteLength = 0; // route-up-time weighted hop count
};

struct SeriesPoint
{
  double t = 0;
  double coverageFull = 0;
  double coverageWindow = 0;
  double pdr = 0;
};

struct MetricsReport
{
  RunKey key;
  int runs = 1;
  std::vector<FlowReport> flows;

  double pdr = 0; // mean of per-flow PDRs
  double routeBreaks = 0;
  double reestablishments = 0;
  double routeUpPct = 0;
  double routeLength = 0;
  double cvWindow = 0;
  double cvFull = 0;
  double fairness = 0;
  double vf = 0;
  double switches = 0;
  double discoveries = 0;
  double relays = 0;
  double meanHelloBits = 0;
  FlowCounts totals;

  std::vector<SeriesPoint> series;

  /// Fills the aggregate fields from `flows`.
  void Aggregate ();
};

/// Field-wise arithmetic mean over runs of one configuration. Flows are
/// matched by position; series points by index.
MetricsReport Average (std::span<const MetricsReport> reports);

void WriteMetricsHeader (std::ostream &out);
void WriteMetricsRow (std::ostream &out, const MetricsReport &r);
void WriteSeriesHeader (std::ostream &out);
void WriteSeriesRows (std::ostream &out, const MetricsReport &r);

/// Parses a file written by WriteMetricsHeader/WriteMetricsRow back into
/// reports (aggregate fields only).
std::vector<MetricsReport> ReadMetricsCsv (std::istream &in);

} // namespace uavsim

#endif
