#include "uavsim/pheromone_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uavsim {

PheromoneField::PheromoneField (const AreaMap &map)
    : m_map (map),
      m_values (map.CellCount (), 0.0),
      m_scratch (map.CellCount (), 0.0),
      m_maskCount (map.CellCount (), 0)
{
}

int
PheromoneField::Index (CellIndex c) const
{
  if (!m_map.InBounds (c))
    {
      std::ostringstream os;
      os << "pheromone cell (" << c.col << "," << c.row << ") out of bounds";
      throw std::out_of_range (os.str ());
    }
  return m_map.Flat (c);
}

void
PheromoneField::Deposit (CellIndex c, double magnitude)
{
  if (!(magnitude > 0))
    {
      throw std::invalid_argument ("Deposit: magnitude must be positive");
    }
  m_values[Index (c)] += magnitude;
}

void
PheromoneField::Step (double lambdaEvap, double psiDiff)
{
  if (lambdaEvap < 0 || lambdaEvap >= 1 || psiDiff < 0 || psiDiff >= 1)
    {
      throw std::invalid_argument ("PheromoneField::Step: rates must lie in [0, 1)");
    }
  const int cols = m_map.Cols ();
  const int rows = m_map.Rows ();
  const double keep = 1.0 - lambdaEvap;
  for (double &v : m_values)
    {
      v *= keep;
    }
  if (psiDiff == 0.0)
    {
      return;
    }
  std::fill (m_scratch.begin (), m_scratch.end (), 0.0);
  for (int r = 0; r < rows; ++r)
    {
      for (int c = 0; c < cols; ++c)
        {
          int i = r * cols + c;
          double v = m_values[i];
          if (v == 0.0)
            {
              continue;
            }
          int deg = (c > 0) + (c < cols - 1) + (r > 0) + (r < rows - 1);
          if (deg == 0)
            {
              m_scratch[i] += v;
              continue;
            }
          double out = psiDiff * v;
          double share = out / deg;
          m_scratch[i] += v - out;
          if (c > 0)
            m_scratch[i - 1] += share;
          if (c < cols - 1)
            m_scratch[i + 1] += share;
          if (r > 0)
            m_scratch[i - cols] += share;
          if (r < rows - 1)
            m_scratch[i + cols] += share;
        }
    }
  m_values.swap (m_scratch);
}

MaskApplyResult
PheromoneField::ApplyMask (NodeId owner, Vec2 ownerPos, Vec2 routeAxis, double lengthM, double heading,
                           double now)
{
  if (!(lengthM > 0))
    {
      throw std::invalid_argument ("ApplyMask: L must be positive");
    }
  MaskApplyResult result;
  double n = Norm (routeAxis);
  Vec2 axis;
  if (n > 1e-9)
    {
      axis = routeAxis * (1.0 / n);
    }
  else
    {
      axis = FromHeading (heading);
      result.degenerateAxis = true;
    }
  result.longAxis = Perp (axis);
  result.replaced = RemoveMask (owner);

  MaskRect rect;
  rect.center = CellOf (m_map.Clamp (ownerPos), m_map);
  rect.centerPos = m_map.CellCenter (rect.center);
  rect.longAxis = result.longAxis;
  rect.longM = 2.0 * lengthM;
  rect.shortM = lengthM;
  rect.cells = CellsInOrientedRect (rect.centerPos, rect.longM, rect.shortM, rect.longAxis, m_map);
  rect.createdAt = now;
  for (const auto &c : rect.cells)
    {
      ++m_maskCount[m_map.Flat (c)];
    }
  m_masks.emplace (owner, std::move (rect));
  return result;
}

bool
PheromoneField::RemoveMask (NodeId owner)
{
  auto it = m_masks.find (owner);
  if (it == m_masks.end ())
    {
      return false;
    }
  for (const auto &c : it->second.cells)
    {
      --m_maskCount[m_map.Flat (c)];
    }
  m_masks.erase (it);
  return true;
}

double
PheromoneField::Value (CellIndex c) const
{
  return m_values[Index (c)];
}

bool
PheromoneField::IsMasked (CellIndex c) const
{
  return m_maskCount[Index (c)] > 0;
}

double
PheromoneField::EffectiveValue (CellIndex c) const
{
  int i = Index (c);
  return m_maskCount[i] > 0 ? 0.0 : m_values[i];
}

double
PheromoneField::Total () const
{
  double s = 0;
  for (double v : m_values)
    {
      s += v;
    }
  return s;
}

double
PheromoneField::Min () const
{
  return *std::min_element (m_values.begin (), m_values.end ());
}

void
PheromoneField::WriteCsv (std::ostream &out, double now) const
{
  char buf[128];
  for (int r = 0; r < m_map.Rows (); ++r)
    {
      for (int c = 0; c < m_map.Cols (); ++c)
        {
          CellIndex cell{c, r};
          std::snprintf (buf, sizeof buf, "%.1f,%d,%d,%.6f,%.6f\n", now, c, r, Value (cell),
                         EffectiveValue (cell));
          out << buf;
        }
    }
}

LocalPheromoneMap::LocalPheromoneMap (const AreaMap &map)
    : m_map (&map), m_values (map.CellCount (), 0.0f), m_stamps (map.CellCount (), -1)
{
}

double
LocalPheromoneMap::Value (CellIndex c, long long nowTick, double lambdaEvap) const
{
  if (!m_map->InBounds (c))
    {
      return 0.0;
    }
  int i = m_map->Flat (c);
  if (m_stamps[i] < 0)
    {
      return 0.0;
    }
  long long age = nowTick - m_stamps[i];
  double v = m_values[i];
  return age <= 0 ? v : v * std::pow (1.0 - lambdaEvap, static_cast<double> (age));
}

bool
LocalPheromoneMap::Known (CellIndex c) const
{
  return m_map->InBounds (c) && m_stamps[m_map->Flat (c)] >= 0;
}

} // namespace uavsim
