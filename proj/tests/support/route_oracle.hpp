#ifndef UAVSIM_TESTS_ROUTE_ORACLE_HPP
#define UAVSIM_TESTS_ROUTE_ORACLE_HPP

// Exhaustive reference for pipe route selection. Everything here is written
// from the definitions, without calling the library's selection code, so it
// can serve as an oracle for it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "uavsim/routing.hpp"
#include "uavsim/rng.hpp"

namespace uavsim::oracle {

struct PathInfo
{
  std::vector<NodeId> nodes;
  int hc = 0;
  int il = 0;
  double rlt = 0;
  double en = 0;
};

/// Every simple path from `source` to `bs` by depth-first search.
inline void
AllSimplePaths (const LinkGraph &g, NodeId at, NodeId bs, std::vector<NodeId> &stack,
                std::vector<PathInfo> &out)
{
  stack.push_back (at);
  if (at == bs)
    {
      PathInfo p;
      p.nodes = stack;
      p.hc = static_cast<int> (stack.size ()) - 1;
      p.rlt = std::numeric_limits<double>::infinity ();
      p.en = std::numeric_limits<double>::infinity ();
      for (std::size_t i = 0; i < stack.size (); ++i)
        {
          p.il += g.Il (stack[i]);
          p.en = std::min (p.en, g.En (stack[i]));
          if (i + 1 < stack.size ())
            {
              p.rlt = std::min (p.rlt, *g.Llt (stack[i], stack[i + 1]));
            }
        }
      out.push_back (std::move (p));
    }
  else
    {
      for (NodeId n : g.Neighbors (at))
        {
          if (std::find (stack.begin (), stack.end (), n) == stack.end ())
            {
              AllSimplePaths (g, n, bs, stack, out);
            }
        }
    }
  stack.pop_back ();
}

inline std::vector<PathInfo>
FeasiblePaths (const LinkGraph &g, NodeId source, NodeId bs, const SelectionParams &p)
{
  std::vector<PathInfo> all;
  std::vector<NodeId> stack;
  if (g.HasNode (source) && g.HasNode (bs))
    {
      AllSimplePaths (g, source, bs, stack, all);
    }
  std::vector<PathInfo> ok;
  for (auto &x : all)
    {
      if (x.hc >= 1 && x.rlt > p.ttlS && x.en > p.enThreshold + p.enTolerance)
        {
          ok.push_back (std::move (x));
        }
    }
  return ok;
}

/// Argmin of w1*HC/HCmin + w2*IL/(ILmin + alpha*IL) over feasible paths
/// within HCmin + slack hops; ties to fewer hops, less interference, then
/// the lexicographically smaller node list.
inline std::optional<PathInfo>
BestPath (const LinkGraph &g, NodeId source, NodeId bs, const SelectionParams &p)
{
  auto ok = FeasiblePaths (g, source, bs, p);
  if (ok.empty ())
    {
      return std::nullopt;
    }
  int hcMin = ok.front ().hc;
  for (const auto &x : ok)
    {
      hcMin = std::min (hcMin, x.hc);
    }
  std::erase_if (ok, [&] (const PathInfo &x) { return x.hc > hcMin + p.hcSlack; });
  int ilMin = ok.front ().il;
  for (const auto &x : ok)
    {
      ilMin = std::min (ilMin, x.il);
    }
  auto cost = [&] (const PathInfo &x) {
    double d = ilMin + p.alpha * x.il;
    double ilTerm = d > 0 ? x.il / d : 1.0 / (1.0 + p.alpha);
    return p.w1 * (static_cast<double> (x.hc) / hcMin) + p.w2 * ilTerm;
  };
  const PathInfo *best = &ok.front ();
  for (const auto &x : ok)
    {
      double cx = cost (x);
      double cb = cost (*best);
      if (cx < cb
          || (cx == cb
              && std::tie (x.hc, x.il, x.nodes) < std::tie (best->hc, best->il, best->nodes)))
        {
          best = &x;
        }
    }
  return *best;
}

/// Fewest hops over any path whose links outlast the TTL and whose nodes
/// all clear the energy threshold plus tolerance.
inline std::optional<int>
ShortestFeasibleHops (const LinkGraph &g, NodeId source, NodeId bs, const SelectionParams &p)
{
  auto ok = FeasiblePaths (g, source, bs, p);
  if (ok.empty ())
    {
      return std::nullopt;
    }
  int m = ok.front ().hc;
  for (const auto &x : ok)
    {
      m = std::min (m, x.hc);
    }
  return m;
}

/// Random geometric graph of `n` nodes (id 0 is the BS) with random
/// lifetimes, energies and interference counts. Roughly a quarter of the
/// links and some nodes fall below the feasibility thresholds.
inline LinkGraph
RandomGeometricGraph (int n, double side, double range, RngStream &rng)
{
  std::vector<Vec2> pos (n);
  LinkGraph g;
  for (int i = 0; i < n; ++i)
    {
      pos[i] = {rng.Uniform (0, side), rng.Uniform (0, side)};
      double en = rng.Uniform () < 0.1 ? rng.Uniform (5, 10.02) : rng.Uniform (10.5, 100);
      g.AddNode (i, en, static_cast<int> (rng.Below (6)));
    }
  for (int i = 0; i < n; ++i)
    {
      for (int j = i + 1; j < n; ++j)
        {
          if (Distance (pos[i], pos[j]) <= range)
            {
              double llt = rng.Uniform () < 0.25 ? rng.Uniform (0, 3) : rng.Uniform (3.01, 200);
              g.AddLink (i, j, llt);
            }
        }
    }
  return g;
}

} // namespace uavsim::oracle

#endif
