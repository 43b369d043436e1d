// uavsim: run UAV swarm routing scenarios and aggregate their metrics.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "uavsim/config.hpp"
#include "uavsim/engine.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace uavsim;

namespace {

std::ofstream OpenOut (const fs::path &p)
{
  std::ofstream out (p);
  if (!out)
    {
      throw std::runtime_error ("cannot write " + p.string ());
    }
  return out;
}

SimConfig BaseConfig (const std::string &path)
{
  return path.empty () ? SimConfig{} : LoadConfigFile (path);
}

using GroupKey = std::tuple<std::string, std::string, int, double, double, int>;

GroupKey KeyOf (const MetricsReport &r)
{
  const auto &k = r.key;
  return {k.scenario, k.scheme, k.nUavs, k.speedMps, k.dataRateBps, k.failurePct};
}

/// One averaged row per configuration, in first-seen order.
std::vector<MetricsReport> Summarise (const std::vector<MetricsReport> &reports)
{
  std::vector<GroupKey> order;
  std::map<GroupKey, std::vector<MetricsReport>> groups;
  for (const auto &r : reports)
    {
      auto k = KeyOf (r);
      if (!groups.count (k))
        {
          order.push_back (k);
        }
      groups[k].push_back (r);
    }
  std::vector<MetricsReport> out;
  for (const auto &k : order)
    {
      out.push_back (Average (groups[k]));
    }
  return out;
}

void WriteReports (const fs::path &path, const std::vector<MetricsReport> &reports)
{
  auto out = OpenOut (path);
  WriteMetricsHeader (out);
  for (const auto &r : reports)
    {
      WriteMetricsRow (out, r);
    }
}

void WriteSeries (const fs::path &path, const std::vector<MetricsReport> &reports)
{
  auto out = OpenOut (path);
  WriteSeriesHeader (out);
  for (const auto &r : reports)
    {
      WriteSeriesRows (out, r);
    }
}

template <typename T>
std::vector<T> SplitList (const std::string &s)
{
  std::vector<T> out;
  std::stringstream ss (s);
  std::string item;
  while (std::getline (ss, item, ','))
    {
      std::istringstream is (item);
      T v{};
      if (!(is >> v))
        {
          throw std::invalid_argument ("bad list item '" + item + "'");
        }
      out.push_back (v);
    }
  return out;
}

} // namespace

int
main (int argc, char **argv)
{
  CLI::App app{"UAV swarm routing simulator"};
  app.require_subcommand (1);

  // run ---------------------------------------------------------------------
  std::string scenario = "C1";
  std::string scheme = "tcpipe";
  int uavs = 50;
  double speed = 20.0;
  double rate = 2e6;
  int failures = 0;
  int seeds = 1;
  std::uint64_t firstSeed = 1;
  std::string outDir = "out";
  std::string configPath;
  bool trace = false;
  bool heatmap = false;
  bool events = false;

  auto *run = app.add_subcommand ("run", "Run one scenario over one or more seeds");
  run->add_option ("--scenario", scenario, "Target layout C1..C6")->capture_default_str ();
  run->add_option ("--scheme", scheme, "aodv | pipe | tcpipe | relay")->capture_default_str ();
  run->add_option ("--uavs", uavs, "Number of UAVs")->capture_default_str ();
  run->add_option ("--speed", speed, "UAV speed in m/s")->capture_default_str ();
  run->add_option ("--rate", rate, "Per-flow data rate in bit/s")->capture_default_str ();
  run->add_option ("--failures", failures, "Percentage of UAVs that fail")->capture_default_str ();
  run->add_option ("--seeds", seeds, "Number of seeds")->capture_default_str ();
  run->add_option ("--first-seed", firstSeed, "First seed")->capture_default_str ();
  run->add_option ("--out-dir", outDir, "Output directory")->capture_default_str ();
  run->add_option ("--config", configPath, "key = value configuration file");
  run->add_flag ("--events", events, "Write routing and mask event logs");
  run->add_flag ("--trace", trace, "Write per-tick trajectories");
  run->add_flag ("--heatmap", heatmap, "Write pheromone snapshots");

  // batch -------------------------------------------------------------------
  std::string scenarios = "C1,C4";
  std::string schemes = "aodv,pipe,tcpipe,relay";
  std::string uavList = "30,50";
  std::string speedList = "20,40";
  std::string rateList = "1e6,2e6,3e6";
  std::string failureList = "0";
  int threads = static_cast<int> (std::max (1u, std::thread::hardware_concurrency ()));

  auto *batch = app.add_subcommand ("batch", "Sweep layouts x schemes x densities x speeds x rates");
  batch->add_option ("--scenario", scenarios, "Comma-separated layouts")->capture_default_str ();
  batch->add_option ("--scheme", schemes, "Comma-separated schemes")->capture_default_str ();
  batch->add_option ("--uavs", uavList, "Comma-separated UAV counts")->capture_default_str ();
  batch->add_option ("--speed", speedList, "Comma-separated speeds")->capture_default_str ();
  batch->add_option ("--rate", rateList, "Comma-separated data rates")->capture_default_str ();
  batch->add_option ("--failures", failureList, "Comma-separated failure percentages")->capture_default_str ();
  batch->add_option ("--seeds", seeds, "Seeds per configuration")->capture_default_str ();
  batch->add_option ("--first-seed", firstSeed, "First seed")->capture_default_str ();
  batch->add_option ("--threads", threads, "Worker threads")->capture_default_str ();
  batch->add_option ("--out-dir", outDir, "Output directory")->capture_default_str ();
  batch->add_option ("--config", configPath, "key = value configuration file");

  // report ------------------------------------------------------------------
  std::string input;
  std::string output;
  auto *report = app.add_subcommand ("report", "Average a per-run metrics CSV per configuration");
  report->add_option ("input", input, "metrics CSV written by run or batch")->required ()->check (CLI::ExistingFile);
  report->add_option ("-o,--output", output, "Output CSV (default: stdout)");

  CLI11_PARSE (app, argc, argv);

  try
    {
      if (run->parsed ())
        {
          SimConfig cfg = BaseConfig (configPath);
          cfg.nUavs = uavs;
          cfg.speedMps = speed;
          cfg.dataRateBps = rate;
          Scenario sc = MakeScenario (scenario, ParseScheme (scheme), cfg, failures);
          sc.Validate ();
          fs::create_directories (outDir);
          std::vector<MetricsReport> reports;
          for (int s = 0; s < seeds; ++s)
            {
              std::uint64_t seed = firstSeed + static_cast<std::uint64_t> (s);
              std::string tag = sc.name + "_" + SchemeName (sc.scheme) + "_" + std::to_string (seed);
              std::ofstream ev, mask, tr, hm;
              RunOptions opts;
              if (events)
                {
                  ev = OpenOut (fs::path (outDir) / ("events_" + tag + ".csv"));
                  mask = OpenOut (fs::path (outDir) / ("masks_" + tag + ".csv"));
                  opts.eventLog = &ev;
                  opts.maskLog = &mask;
                }
              if (trace)
                {
                  tr = OpenOut (fs::path (outDir) / ("trace_" + tag + ".csv"));
                  opts.trace = &tr;
                }
              if (heatmap)
                {
                  hm = OpenOut (fs::path (outDir) / ("heatmap_" + tag + ".csv"));
                  opts.heatmap = &hm;
                }
              reports.push_back (RunScenario (sc, seed, opts));
              const auto &r = reports.back ();
              std::cerr << tag << ": pdr=" << r.pdr << " r_b=" << r.routeBreaks << " r_u=" << r.routeUpPct
                        << " len=" << r.routeLength << " c_v=" << r.cvWindow << '\n';
            }
          WriteReports (fs::path (outDir) / "metrics.csv", reports);
          WriteReports (fs::path (outDir) / "summary.csv", Summarise (reports));
          WriteSeries (fs::path (outDir) / "series.csv", reports);
          std::ofstream cfgOut = OpenOut (fs::path (outDir) / "config.txt");
          WriteConfig (cfgOut, sc.config);
        }
      else if (batch->parsed ())
        {
          SimConfig base = BaseConfig (configPath);
          std::vector<RunSpec> specs;
          for (const auto &layout : SplitList<std::string> (scenarios))
            for (const auto &sch : SplitList<std::string> (schemes))
              for (int u : SplitList<int> (uavList))
                for (double sp : SplitList<double> (speedList))
                  for (double rt : SplitList<double> (rateList))
                    for (int fp : SplitList<int> (failureList))
                      for (int s = 0; s < seeds; ++s)
                        {
                          SimConfig cfg = base;
                          cfg.nUavs = u;
                          cfg.speedMps = sp;
                          cfg.dataRateBps = rt;
                          Scenario sc = MakeScenario (layout, ParseScheme (sch), cfg, fp);
                          sc.Validate ();
                          specs.push_back ({sc, firstSeed + static_cast<std::uint64_t> (s)});
                        }
          std::cerr << "running " << specs.size () << " simulations on " << threads << " threads\n";
          auto reports = RunBatch (specs, threads);
          fs::create_directories (outDir);
          WriteReports (fs::path (outDir) / "metrics.csv", reports);
          WriteReports (fs::path (outDir) / "summary.csv", Summarise (reports));
          WriteSeries (fs::path (outDir) / "series.csv", reports);
        }
      else if (report->parsed ())
        {
          std::ifstream in (input);
          auto summary = Summarise (ReadMetricsCsv (in));
          if (output.empty ())
            {
              WriteMetricsHeader (std::cout);
              for (const auto &r : summary)
                {
                  WriteMetricsRow (std::cout, r);
                }
            }
          else
            {
              WriteReports (output, summary);
            }
        }
    }
  catch (const std::exception &e)
    {
      std::cerr << "uavsim: " << e.what () << '\n';
      return 1;
    }
  return 0;
}
