#include "uavsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace uavsim {

const char *
SchemeName (Scheme s)
{
  switch (s)
    {
    case Scheme::Aodv:
      return "aodv";
    case Scheme::Pipe:
      return "pipe";
    case Scheme::TcPipe:
      return "tcpipe";
    case Scheme::Relay:
      return "relay";
    }
  return "?";
}

Scheme
ParseScheme (const std::string &name)
{
  std::string s;
  for (char c : name)
    {
      if (c != '-' && c != '_')
        {
          s.push_back (static_cast<char> (std::tolower (static_cast<unsigned char> (c))));
        }
    }
  for (Scheme sc : kAllSchemes)
    {
      if (s == SchemeName (sc))
        {
          return sc;
        }
    }
  throw std::invalid_argument ("unknown scheme '" + name + "' (expected aodv, pipe, tcpipe or relay)");
}

void
Scenario::Validate () const
{
  config.Validate ();
  AreaMap map = config.Map ();
  if (targets.empty ())
    {
      throw std::invalid_argument ("Scenario " + name + ": no targets");
    }
  for (const auto &t : targets)
    {
      if (!map.Contains (t))
        {
          throw std::invalid_argument ("Scenario " + name + ": target outside the map");
        }
    }
  if (failurePct < 0 || failurePct > 100)
    {
      throw std::invalid_argument ("Scenario " + name + ": failure percentage outside [0, 100]");
    }
  if (nRuns <= 0)
    {
      throw std::invalid_argument ("Scenario " + name + ": n_runs must be positive");
    }
}

const std::vector<TargetLayout> &
BuiltinLayouts ()
{
  static const std::vector<TargetLayout> layouts = {
      {"C1", {{1500, 5000}}},
      {"C2", {{4000, 4000}}},
      {"C3", {{2000, 2000}}},
      {"C4", {{1000, 4500}, {3000, 5000}, {5000, 4500}}},
      {"C5", {{1000, 4000}, {3600, 2500}, {5000, 4800}}},
      {"C6", {{1000, 1500}, {3000, 2000}, {5000, 1500}}},
  };
  return layouts;
}

const TargetLayout &
FindLayout (const std::string &name)
{
  for (const auto &l : BuiltinLayouts ())
    {
      if (l.name.size () == name.size ()
          && std::equal (l.name.begin (), l.name.end (), name.begin (),
                         [] (char a, char b) { return std::toupper (a) == std::toupper (b); }))
        {
          return l;
        }
    }
  throw std::invalid_argument ("unknown scenario '" + name + "' (expected C1..C6)");
}

Scenario
MakeScenario (const std::string &layout, Scheme scheme, const SimConfig &cfg, int failurePct)
{
  const auto &l = FindLayout (layout);
  Scenario s;
  s.name = l.name;
  s.targets = l.targets;
  s.scheme = scheme;
  s.failurePct = failurePct;
  s.config = cfg;
  return s;
}

FailurePlan
MakeFailurePlan (int nUavs, int pct, std::span<const NodeId> excluded, double t0, double t1, RngStream &rng)
{
  if (pct < 0 || pct > 100 || nUavs < 0 || t1 < t0)
    {
      throw std::invalid_argument ("MakeFailurePlan: bad arguments");
    }
  std::vector<NodeId> eligible;
  for (NodeId id = 1; id <= nUavs; ++id)
    {
      if (std::find (excluded.begin (), excluded.end (), id) == excluded.end ())
        {
          eligible.push_back (id);
        }
    }
  for (std::size_t i = eligible.size (); i > 1; --i)
    {
      std::size_t j = rng.Below (i);
      std::swap (eligible[i - 1], eligible[j]);
    }
  std::vector<FailureEvent> all;
  for (NodeId id : eligible)
    {
      all.push_back ({id, rng.Uniform (t0, t1)});
    }
  std::size_t k = static_cast<std::size_t> (std::lround (pct / 100.0 * nUavs));
  k = std::min (k, all.size ());
  FailurePlan plan;
  plan.events.assign (all.begin (), all.begin () + static_cast<std::ptrdiff_t> (k));
  std::stable_sort (plan.events.begin (), plan.events.end (),
                    [] (const FailureEvent &a, const FailureEvent &b) { return a.time < b.time; });
  return plan;
}

} // namespace uavsim
