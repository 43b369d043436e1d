#include "uavsim/geometry.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace uavsim {

namespace {

constexpr double kEdgeTol = 1e-9;

bool IsMultiple (double total, double step)
{
  double q = total / step;
  return std::abs (q - std::round (q)) < 1e-9;
}

int AxisCell (double v, double cell, int count)
{
  int c = static_cast<int> (std::floor (v / cell));
  if (c > 0 && c * cell == v)
    {
      --c; // shared edge goes to the lower-index cell
    }
  return std::clamp (c, 0, count - 1);
}

} // namespace

AreaMap::AreaMap (double widthM, double heightM, double cellSizeM)
    : m_width (widthM), m_height (heightM), m_cell (cellSizeM)
{
  if (!(widthM > 0 && heightM > 0 && cellSizeM > 0))
    {
      throw std::invalid_argument ("AreaMap: dimensions must be positive");
    }
  if (!IsMultiple (widthM, cellSizeM) || !IsMultiple (heightM, cellSizeM))
    {
      throw std::invalid_argument ("AreaMap: width and height must be multiples of the cell size");
    }
  m_cols = static_cast<int> (std::lround (widthM / cellSizeM));
  m_rows = static_cast<int> (std::lround (heightM / cellSizeM));
}

bool
AreaMap::Contains (Vec2 p) const
{
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= m_width && p.y <= m_height;
}

Vec2
AreaMap::CellCenter (CellIndex c) const
{
  return {(c.col + 0.5) * m_cell, (c.row + 0.5) * m_cell};
}

Vec2
AreaMap::Clamp (Vec2 p) const
{
  return {std::clamp (p.x, 0.0, m_width), std::clamp (p.y, 0.0, m_height)};
}

CellIndex
CellOf (Vec2 pos, const AreaMap &map)
{
  if (!(pos.x >= 0.0 && pos.x <= map.Width ()))
    {
      std::ostringstream os;
      os << "CellOf: x=" << pos.x << " outside [0, " << map.Width () << "]";
      throw std::out_of_range (os.str ());
    }
  if (!(pos.y >= 0.0 && pos.y <= map.Height ()))
    {
      std::ostringstream os;
      os << "CellOf: y=" << pos.y << " outside [0, " << map.Height () << "]";
      throw std::out_of_range (os.str ());
    }
  return {AxisCell (pos.x, map.CellSize (), map.Cols ()),
          AxisCell (pos.y, map.CellSize (), map.Rows ())};
}

bool
InOrientedRect (Vec2 p, Vec2 center, double longM, double shortM, Vec2 unitAxis)
{
  Vec2 d = p - center;
  double along = Dot (d, unitAxis);
  double across = Dot (d, Perp (unitAxis));
  return std::abs (along) <= longM / 2 + kEdgeTol && std::abs (across) <= shortM / 2 + kEdgeTol;
}

std::vector<CellIndex>
CellsInOrientedRect (Vec2 center, double longM, double shortM, Vec2 axis, const AreaMap &map)
{
  double n = Norm (axis);
  if (!(n > 0.0))
    {
      throw std::invalid_argument ("CellsInOrientedRect: zero-length axis");
    }
  if (!(longM > 0.0 && shortM > 0.0))
    {
      throw std::invalid_argument ("CellsInOrientedRect: extents must be positive");
    }
  Vec2 u = axis * (1.0 / n);

  // Bounding box of the rotated rectangle limits the scan.
  double hx = std::abs (u.x) * longM / 2 + std::abs (u.y) * shortM / 2;
  double hy = std::abs (u.y) * longM / 2 + std::abs (u.x) * shortM / 2;
  double cs = map.CellSize ();
  int c0 = std::max (0, static_cast<int> (std::floor ((center.x - hx) / cs)) - 1);
  int c1 = std::min (map.Cols () - 1, static_cast<int> (std::floor ((center.x + hx) / cs)) + 1);
  int r0 = std::max (0, static_cast<int> (std::floor ((center.y - hy) / cs)) - 1);
  int r1 = std::min (map.Rows () - 1, static_cast<int> (std::floor ((center.y + hy) / cs)) + 1);

  std::vector<CellIndex> out;
  for (int c = c0; c <= c1; ++c)
    {
      for (int r = r0; r <= r1; ++r)
        {
          CellIndex cell{c, r};
          if (InOrientedRect (map.CellCenter (cell), center, longM, shortM, u))
            {
              out.push_back (cell);
            }
        }
    }
  return out;
}

} // namespace uavsim
