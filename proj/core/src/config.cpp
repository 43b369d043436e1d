#include "uavsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace uavsim {

namespace {

struct Field
{
  const char *key;
  std::function<std::string (const SimConfig &)> get;
  std::function<void (SimConfig &, const std::string &)> set;
};

std::string FormatDouble (double v)
{
  std::ostringstream os;
  os << std::setprecision (17) << v;
  return os.str ();
}

double ParseDouble (const std::string &key, const std::string &s)
{
  std::size_t pos = 0;
  double v = 0;
  try
    {
      v = std::stod (s, &pos);
    }
  catch (const std::exception &)
    {
      throw std::invalid_argument ("config: bad number for '" + key + "': " + s);
    }
  if (pos != s.size ())
    {
      throw std::invalid_argument ("config: trailing characters for '" + key + "': " + s);
    }
  return v;
}

long long ParseInt (const std::string &key, const std::string &s)
{
  long long v = 0;
  auto [ptr, ec] = std::from_chars (s.data (), s.data () + s.size (), v);
  if (ec != std::errc () || ptr != s.data () + s.size ())
    {
      throw std::invalid_argument ("config: bad integer for '" + key + "': " + s);
    }
  return v;
}

#define UAVSIM_DBL(name, member)                                                                   \
  Field { name, [] (const SimConfig &c) { return FormatDouble (c.member); },                      \
          [] (SimConfig &c, const std::string &v) { c.member = ParseDouble (name, v); } }
#define UAVSIM_INT(name, member)                                                                   \
  Field { name, [] (const SimConfig &c) { return std::to_string (c.member); },                    \
          [] (SimConfig &c, const std::string &v) {                                                \
            c.member = static_cast<decltype (c.member)> (ParseInt (name, v));                      \
          } }

const std::vector<Field> &Fields ()
{
  static const std::vector<Field> fields = {
      UAVSIM_DBL ("map_width_m", mapWidthM),
      UAVSIM_DBL ("map_height_m", mapHeightM),
      UAVSIM_DBL ("cell_size_m", cellSizeM),
      UAVSIM_DBL ("bs_x_m", bsX),
      UAVSIM_DBL ("bs_y_m", bsY),
      UAVSIM_INT ("n_uavs", nUavs),
      UAVSIM_DBL ("speed_mps", speedMps),
      UAVSIM_DBL ("max_turn_rate_deg_s", maxTurnRateDegPerS),
      UAVSIM_DBL ("launch_radius_m", launchRadiusM),
      UAVSIM_DBL ("orbit_radius_m", orbitRadiusM),
      UAVSIM_DBL ("tx_range_m", txRangeM),
      UAVSIM_DBL ("channel_rate_bps", channelRateBps),
      UAVSIM_INT ("packet_bytes", packetBytes),
      UAVSIM_DBL ("ttl_s", ttlS),
      UAVSIM_DBL ("data_rate_bps", dataRateBps),
      UAVSIM_DBL ("processing_delay_s", processingDelayS),
      UAVSIM_DBL ("llt_cap_s", lltCapS),
      UAVSIM_DBL ("warmup_s", warmupS),
      UAVSIM_DBL ("measure_s", measureS),
      UAVSIM_DBL ("lambda_evap", lambdaEvap),
      UAVSIM_DBL ("psi_diff", psiDiff),
      UAVSIM_DBL ("deposit_magnitude", depositMagnitude),
      UAVSIM_DBL ("beta", beta),
      UAVSIM_INT ("degree_cap", degreeCap),
      UAVSIM_DBL ("candidate_near_m", candidateNearM),
      UAVSIM_DBL ("candidate_far_m", candidateFarM),
      UAVSIM_DBL ("connectivity_margin_m", connectivityMarginM),
      UAVSIM_DBL ("w1", w1),
      UAVSIM_DBL ("w2", w2),
      UAVSIM_DBL ("alpha", alpha),
      UAVSIM_INT ("hc_slack", hcSlack),
      UAVSIM_DBL ("rreq_slack_m", rreqSlackM),
      UAVSIM_INT ("rreq_retries", rreqRetries),
      UAVSIM_DBL ("discovery_holddown_s", discoveryHolddownS),
      UAVSIM_INT ("pipe_visit_budget", pipeVisitBudget),
      UAVSIM_INT ("pipe_size_for_budget", pipeSizeForBudget),
      UAVSIM_INT ("th_degree", thDegree),
      UAVSIM_DBL ("en_initial", enInitial),
      UAVSIM_DBL ("en_threshold", enThreshold),
      UAVSIM_DBL ("en_drain_flight_per_s", enDrainFlightPerS),
      UAVSIM_DBL ("en_drain_per_packet", enDrainPerPacket),
      UAVSIM_DBL ("en_tolerance", enTolerance),
      UAVSIM_DBL ("dt_s", dtS),
      UAVSIM_DBL ("protocol_tick_s", protocolTickS),
      UAVSIM_DBL ("hello_interval_s", helloIntervalS),
      UAVSIM_DBL ("notify_interval_s", notifyIntervalS),
      UAVSIM_INT ("neighbor_expiry_intervals", neighborExpiryIntervals),
      Field{"seed", [] (const SimConfig &c) { return std::to_string (c.seed); },
            [] (SimConfig &c, const std::string &v) {
              std::uint64_t s = 0;
              auto [ptr, ec] = std::from_chars (v.data (), v.data () + v.size (), s);
              if (ec != std::errc () || ptr != v.data () + v.size ())
                {
                  throw std::invalid_argument ("config: bad seed: " + v);
                }
              c.seed = s;
            }},
  };
  return fields;
}

#undef UAVSIM_DBL
#undef UAVSIM_INT

std::string Trim (const std::string &s)
{
  auto b = s.find_first_not_of (" \t\r");
  if (b == std::string::npos)
    {
      return {};
    }
  auto e = s.find_last_not_of (" \t\r");
  return s.substr (b, e - b + 1);
}

void Require (bool ok, const char *what)
{
  if (!ok)
    {
      throw std::invalid_argument (std::string ("SimConfig: ") + what);
    }
}

} // namespace

void
SimConfig::Validate () const
{
  Require (mapWidthM > 0 && mapHeightM > 0 && cellSizeM > 0, "map dimensions must be positive");
  (void) Map (); // multiples of the cell size
  Require (bsX >= 0 && bsX <= mapWidthM && bsY >= 0 && bsY <= mapHeightM, "BS outside the map");
  Require (nUavs > 0 && nUavs < 127, "n_uavs must fit the 7-bit Hello id field");
  Require (speedMps > 0, "speed_mps must be positive");
  Require (txRangeM > 0 && channelRateBps > 0 && packetBytes > 0, "radio parameters must be positive");
  Require (ttlS > 0 && dataRateBps > 0, "ttl_s and data_rate_bps must be positive");
  Require (warmupS >= 0 && measureS > 0, "phase durations must be positive");
  Require (lambdaEvap >= 0 && lambdaEvap < 1, "lambda_evap must lie in [0, 1)");
  Require (psiDiff >= 0 && psiDiff < 1, "psi_diff must lie in [0, 1)");
  Require (std::abs (w1 + w2 - 1.0) < 1e-9, "w1 + w2 must equal 1");
  Require (w1 >= 0 && w2 >= 0 && alpha > 0, "cost weights must be non-negative, alpha positive");
  Require (dtS > 0 && protocolTickS > 0, "time steps must be positive");
  double ratio = protocolTickS / dtS;
  Require (std::abs (ratio - std::round (ratio)) < 1e-9, "dt_s must divide protocol_tick_s");
  Require (std::abs (helloIntervalS - protocolTickS) < 1e-12, "hello interval equals the protocol tick");
  double nr = notifyIntervalS / protocolTickS;
  Require (notifyIntervalS > 0 && std::abs (nr - std::round (nr)) < 1e-9,
           "notify interval must be a whole number of ticks");
  Require (enTolerance >= 0 && enThreshold >= 0, "energy thresholds must be non-negative");
  Require (thDegree >= 0 && degreeCap >= 0 && hcSlack >= 0, "integer knobs must be non-negative");
  Require (candidateNearM > 0 && candidateFarM > 0, "candidate ranges must be positive");
  Require (connectivityMarginM >= 0 && connectivityMarginM < txRangeM, "connectivity margin must lie in [0, range)");
}

std::map<std::string, std::string>
SimConfig::ToKeyValues () const
{
  std::map<std::string, std::string> kv;
  for (const auto &f : Fields ())
    {
      kv[f.key] = f.get (*this);
    }
  return kv;
}

void
SimConfig::Apply (const std::map<std::string, std::string> &kv)
{
  for (const auto &[k, v] : kv)
    {
      bool found = false;
      for (const auto &f : Fields ())
        {
          if (k == f.key)
            {
              f.set (*this, v);
              found = true;
              break;
            }
        }
      if (!found)
        {
          throw std::invalid_argument ("config: unknown key '" + k + "'");
        }
    }
}

SimConfig
ReadConfig (std::istream &in, SimConfig base)
{
  std::map<std::string, std::string> kv;
  std::string line;
  int lineNo = 0;
  while (std::getline (in, line))
    {
      ++lineNo;
      auto hash = line.find ('#');
      if (hash != std::string::npos)
        {
          line.resize (hash);
        }
      line = Trim (line);
      if (line.empty ())
        {
          continue;
        }
      auto eq = line.find ('=');
      if (eq == std::string::npos)
        {
          throw std::invalid_argument ("config line " + std::to_string (lineNo) + ": expected key = value");
        }
      kv[Trim (line.substr (0, eq))] = Trim (line.substr (eq + 1));
    }
  base.Apply (kv);
  base.Validate ();
  return base;
}

SimConfig
LoadConfigFile (const std::string &path, SimConfig base)
{
  std::ifstream in (path);
  if (!in)
    {
      throw std::runtime_error ("cannot open config file " + path);
    }
  return ReadConfig (in, base);
}

void
WriteConfig (std::ostream &out, const SimConfig &cfg)
{
  for (const auto &f : Fields ())
    {
      out << f.key << " = " << f.get (cfg) << '\n';
    }
}

SimClock::SimClock (double dtS, double tickS) : m_dt (dtS)
{
  double ratio = tickS / dtS;
  if (!(dtS > 0) || std::abs (ratio - std::round (ratio)) > 1e-9 || ratio < 1)
    {
      throw std::invalid_argument ("SimClock: dt must divide the protocol tick");
    }
  m_stepsPerTick = static_cast<int> (std::lround (ratio));
}

} // namespace uavsim
