#include "uavsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uavsim {

std::optional<double>
Pdr (const FlowCounts &c)
{
  if (c.generated <= 0)
    {
      return std::nullopt;
    }
  return static_cast<double> (c.delivered) / static_cast<double> (c.generated);
}

double
RouteUpPercent (std::vector<std::pair<double, double>> up, double w0, double w1)
{
  if (!(w1 > w0))
    {
      throw std::invalid_argument ("RouteUpPercent: empty window");
    }
  for (auto &iv : up)
    {
      iv.first = std::max (iv.first, w0);
      iv.second = std::min (iv.second, w1);
    }
  std::erase_if (up, [] (const auto &iv) { return !(iv.second > iv.first); });
  std::sort (up.begin (), up.end ());
  double covered = 0;
  double curLo = 0;
  double curHi = 0;
  bool open = false;
  for (const auto &[lo, hi] : up)
    {
      if (open && lo <= curHi)
        {
          curHi = std::max (curHi, hi);
          continue;
        }
      if (open)
        {
          covered += curHi - curLo;
        }
      curLo = lo;
      curHi = hi;
      open = true;
    }
  if (open)
    {
      covered += curHi - curLo;
    }
  return 100.0 * covered / (w1 - w0);
}

double
JainIndex (std::span<const double> x)
{
  double s = 0;
  double s2 = 0;
  for (double v : x)
    {
      s += v;
      s2 += v * v;
    }
  if (x.empty () || s2 == 0)
    {
      return 0.0;
    }
  return s * s / (static_cast<double> (x.size ()) * s2);
}

CoverageStats
CoverageAndFairness (std::span<const std::uint32_t> scans)
{
  CoverageStats st;
  if (scans.empty ())
    {
      return st;
    }
  std::vector<double> x (scans.begin (), scans.end ());
  long visited = std::count_if (scans.begin (), scans.end (), [] (std::uint32_t v) { return v > 0; });
  double total = 0;
  for (double v : x)
    {
      total += v;
    }
  st.cvPercent = 100.0 * static_cast<double> (visited) / static_cast<double> (x.size ());
  st.vf = total / static_cast<double> (x.size ());
  st.allZero = visited == 0;
  st.fairness = JainIndex (x);
  return st;
}

void
MetricsReport::Aggregate ()
{
  double pdrSum = 0;
  int pdrN = 0;
  double lenSum = 0;
  int lenN = 0;
  routeBreaks = reestablishments = routeUpPct = switches = discoveries = 0;
  totals = {};
  for (const auto &f : flows)
    {
      if (f.pdr)
        {
          pdrSum += *f.pdr;
          ++pdrN;
        }
      if (f.avgRouteLength > 0)
        {
          lenSum += f.avgRouteLength;
          ++lenN;
        }
      routeBreaks += f.routeBreaks;
      reestablishments += f.reestablishments;
      routeUpPct += f.routeUpPct;
      switches += f.switches;
      discoveries += f.discoveries;
      totals.generated += f.counts.generated;
      totals.delivered += f.counts.delivered;
      totals.expired += f.counts.expired;
      totals.dropped += f.counts.dropped;
      totals.inFlight += f.counts.inFlight;
    }
  double n = flows.empty () ? 1.0 : static_cast<double> (flows.size ());
  pdr = pdrN ? pdrSum / pdrN : 0.0;
  routeLength = lenN ? lenSum / lenN : 0.0;
  routeBreaks /= n;
  reestablishments /= n;
  routeUpPct /= n;
  switches /= n;
  discoveries /= n;
}

MetricsReport
Average (std::span<const MetricsReport> reports)
{
  if (reports.empty ())
    {
      throw std::invalid_argument ("Average: no reports");
    }
  MetricsReport out;
  out.key = reports.front ().key;
  out.runs = 0;
  const double k = static_cast<double> (reports.size ());
  double gen = 0, del = 0, exp = 0, drop = 0, infl = 0;
  for (const auto &r : reports)
    {
      out.runs += r.runs;
      out.pdr += r.pdr / k;
      out.routeBreaks += r.routeBreaks / k;
      out.reestablishments += r.reestablishments / k;
      out.routeUpPct += r.routeUpPct / k;
      out.routeLength += r.routeLength / k;
      out.cvWindow += r.cvWindow / k;
      out.cvFull += r.cvFull / k;
      out.fairness += r.fairness / k;
      out.vf += r.vf / k;
      out.switches += r.switches / k;
      out.discoveries += r.discoveries / k;
      out.relays += r.relays / k;
      out.meanHelloBits += r.meanHelloBits / k;
      gen += r.totals.generated / k;
      del += r.totals.delivered / k;
      exp += r.totals.expired / k;
      drop += r.totals.dropped / k;
      infl += r.totals.inFlight / k;
    }
  out.totals = {std::lround (gen), std::lround (del), std::lround (exp), std::lround (drop), std::lround (infl)};

  std::size_t nFlows = reports.front ().flows.size ();
  bool sameFlows = std::all_of (reports.begin (), reports.end (),
                                [&] (const MetricsReport &r) { return r.flows.size () == nFlows; });
  if (sameFlows)
    {
      out.flows.resize (nFlows);
      for (std::size_t f = 0; f < nFlows; ++f)
        {
          FlowReport &dst = out.flows[f];
          dst.flow = reports.front ().flows[f].flow;
          double pdrSum = 0;
          int pdrN = 0;
          double brk = 0, loss = 0, re = 0, sw = 0, disc = 0;
          double cg = 0, cd = 0, ce = 0, cx = 0, ci = 0;
          for (const auto &r : reports)
            {
              const FlowReport &src = r.flows[f];
              if (src.pdr)
                {
                  pdrSum += *src.pdr;
                  ++pdrN;
                }
              brk += src.routeBreaks / k;
              loss += src.linkLosses / k;
              re += src.reestablishments / k;
              sw += src.switches / k;
              disc += src.discoveries / k;
              dst.routeUpPct += src.routeUpPct / k;
              dst.avgRouteLength += src.avgRouteLength / k;
              cg += src.counts.generated / k;
              cd += src.counts.delivered / k;
              ce += src.counts.expired / k;
              cx += src.counts.dropped / k;
              ci += src.counts.inFlight / k;
            }
          if (pdrN > 0)
            {
              dst.pdr = pdrSum / pdrN;
            }
          dst.routeBreaks = static_cast<int> (std::lround (brk));
          dst.linkLosses = static_cast<int> (std::lround (loss));
          dst.reestablishments = static_cast<int> (std::lround (re));
          dst.switches = static_cast<int> (std::lround (sw));
          dst.discoveries = static_cast<int> (std::lround (disc));
          dst.counts = {std::lround (cg), std::lround (cd), std::lround (ce), std::lround (cx), std::lround (ci)};
        }
    }

  std::size_t points = reports.front ().series.size ();
  bool aligned = std::all_of (reports.begin (), reports.end (),
                              [&] (const MetricsReport &r) { return r.series.size () == points; });
  if (aligned)
    {
      out.series.resize (points);
      for (std::size_t i = 0; i < points; ++i)
        {
          out.series[i].t = reports.front ().series[i].t;
          for (const auto &r : reports)
            {
              out.series[i].coverageFull += r.series[i].coverageFull / k;
              out.series[i].coverageWindow += r.series[i].coverageWindow / k;
              out.series[i].pdr += r.series[i].pdr / k;
            }
        }
    }
  return out;
}

namespace {

constexpr const char *kColumns[] = {
    "scenario", "scheme", "n_uavs", "speed_mps", "data_rate_bps", "failure_pct", "seed", "runs",
    "n_flows", "pdr", "r_b", "reestablishments", "r_u", "route_length", "c_v", "c_v_full",
    "fairness", "v_f", "switches", "discoveries", "relays", "hello_bits", "generated",
    "delivered", "expired", "dropped", "in_flight",
};

std::string Fixed (double v, int digits = 6)
{
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> SplitCsv (const std::string &line)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is (line);
  while (std::getline (is, cur, ','))
    {
      out.push_back (cur);
    }
  if (!line.empty () && line.back () == ',')
    {
      out.emplace_back ();
    }
  return out;
}

} // namespace

void
WriteMetricsHeader (std::ostream &out)
{
  bool first = true;
  for (const char *c : kColumns)
    {
      out << (first ? "" : ",") << c;
      first = false;
    }
  out << '\n';
}

void
WriteMetricsRow (std::ostream &out, const MetricsReport &r)
{
  const auto &k = r.key;
  out << k.scenario << ',' << k.scheme << ',' << k.nUavs << ',' << Fixed (k.speedMps, 1) << ','
      << Fixed (k.dataRateBps, 0) << ',' << k.failurePct << ',' << k.seed << ',' << r.runs << ','
      << r.flows.size () << ',' << Fixed (r.pdr) << ',' << Fixed (r.routeBreaks, 3) << ','
      << Fixed (r.reestablishments, 3) << ',' << Fixed (r.routeUpPct, 4) << ',' << Fixed (r.routeLength, 4) << ','
      << Fixed (r.cvWindow, 4) << ',' << Fixed (r.cvFull, 4) << ',' << Fixed (r.fairness) << ','
      << Fixed (r.vf, 4) << ',' << Fixed (r.switches, 3) << ',' << Fixed (r.discoveries, 3) << ','
      << Fixed (r.relays, 3) << ',' << Fixed (r.meanHelloBits, 2) << ',' << r.totals.generated << ','
      << r.totals.delivered << ',' << r.totals.expired << ',' << r.totals.dropped << ',' << r.totals.inFlight
      << '\n';
}

void
WriteSeriesHeader (std::ostream &out)
{
  out << "scenario,scheme,n_uavs,speed_mps,data_rate_bps,failure_pct,seed,t,metric,value\n";
}

void
WriteSeriesRows (std::ostream &out, const MetricsReport &r)
{
  const auto &k = r.key;
  std::string prefix = k.scenario + ',' + k.scheme + ',' + std::to_string (k.nUavs) + ',' + Fixed (k.speedMps, 1)
                       + ',' + Fixed (k.dataRateBps, 0) + ',' + std::to_string (k.failurePct) + ','
                       + std::to_string (k.seed) + ',';
  for (const auto &p : r.series)
    {
      std::string t = Fixed (p.t, 1);
      out << prefix << t << ",coverage_full," << Fixed (p.coverageFull, 4) << '\n';
      out << prefix << t << ",coverage_window," << Fixed (p.coverageWindow, 4) << '\n';
      out << prefix << t << ",pdr," << Fixed (p.pdr) << '\n';
    }
}

std::vector<MetricsReport>
ReadMetricsCsv (std::istream &in)
{
  std::vector<MetricsReport> out;
  std::string line;
  if (!std::getline (in, line))
    {
      return out;
    }
  auto header = SplitCsv (line);
  constexpr std::size_t kCount = sizeof kColumns / sizeof kColumns[0];
  if (header.size () != kCount || !std::equal (header.begin (), header.end (), std::begin (kColumns)))
    {
      throw std::invalid_argument ("ReadMetricsCsv: unexpected header");
    }
  int lineNo = 1;
  while (std::getline (in, line))
    {
      ++lineNo;
      if (line.empty ())
        {
          continue;
        }
      auto f = SplitCsv (line);
      if (f.size () != kCount)
        {
          throw std::invalid_argument ("ReadMetricsCsv: line " + std::to_string (lineNo) + " has "
                                       + std::to_string (f.size ()) + " fields");
        }
      MetricsReport r;
      try
        {
          r.key = {f[0], f[1], std::stoi (f[2]), std::stod (f[3]), std::stod (f[4]), std::stoi (f[5]),
                   std::stoull (f[6])};
          r.runs = std::stoi (f[7]);
          r.flows.resize (std::stoul (f[8]));
          r.pdr = std::stod (f[9]);
          r.routeBreaks = std::stod (f[10]);
          r.reestablishments = std::stod (f[11]);
          r.routeUpPct = std::stod (f[12]);
          r.routeLength = std::stod (f[13]);
          r.cvWindow = std::stod (f[14]);
          r.cvFull = std::stod (f[15]);
          r.fairness = std::stod (f[16]);
          r.vf = std::stod (f[17]);
          r.switches = std::stod (f[18]);
          r.discoveries = std::stod (f[19]);
          r.relays = std::stod (f[20]);
          r.meanHelloBits = std::stod (f[21]);
          r.totals = {std::stol (f[22]), std::stol (f[23]), std::stol (f[24]), std::stol (f[25]), std::stol (f[26])};
        }
      catch (const std::exception &)
        {
          throw std::invalid_argument ("ReadMetricsCsv: bad number on line " + std::to_string (lineNo));
        }
      out.push_back (std::move (r));
    }
  return out;
}

} // namespace uavsim
