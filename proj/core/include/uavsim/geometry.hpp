#ifndef UAVSIM_GEOMETRY_HPP
#define UAVSIM_GEOMETRY_HPP

#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <vector>

namespace uavsim {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+ (Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator- (Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator* (double s) const { return {x * s, y * s}; }
  constexpr Vec2 &operator+= (Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator== (const Vec2 &) const = default;
};

inline double Dot (Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Norm (Vec2 a) { return std::hypot (a.x, a.y); }
inline double Distance (Vec2 a, Vec2 b) { return Norm (a - b); }
inline double DistanceSq (Vec2 a, Vec2 b) { return Dot (a - b, a - b); }
// Counter-clockwise perpendicular.
inline Vec2 Perp (Vec2 a) { return {-a.y, a.x}; }
inline Vec2 FromHeading (double heading) { return {std::cos (heading), std::sin (heading)}; }

/// Grid cell address. Ordering is lexicographic on (col, row), which is the
/// tie-break order used by waypoint selection.
struct CellIndex
{
  int col = 0;
  int row = 0;

  constexpr auto operator<=> (const CellIndex &) const = default;
};

/// Rectangular mission area tiled by square cells.
class AreaMap
{
public:
  AreaMap () : AreaMap (6000.0, 6000.0, 100.0) {}
  AreaMap (double widthM, double heightM, double cellSizeM);

  double Width () const { return m_width; }
  double Height () const { return m_height; }
  double CellSize () const { return m_cell; }
  int Cols () const { return m_cols; }
  int Rows () const { return m_rows; }
  int CellCount () const { return m_cols * m_rows; }

  bool Contains (Vec2 p) const;
  bool InBounds (CellIndex c) const { return c.col >= 0 && c.row >= 0 && c.col < m_cols && c.row < m_rows; }
  Vec2 CellCenter (CellIndex c) const;
  int Flat (CellIndex c) const { return c.row * m_cols + c.col; }
  CellIndex Unflat (int flat) const { return {flat % m_cols, flat / m_cols}; }
  Vec2 Clamp (Vec2 p) const;

private:
  double m_width;
  double m_height;
  double m_cell;
  int m_cols;
  int m_rows;
};

/// Cell containing `pos`. A point on a shared cell edge belongs to the
/// lower-index cell. Throws std::out_of_range naming the bad coordinate.
CellIndex CellOf (Vec2 pos, const AreaMap &map);

/// Every in-map cell whose center lies inside the rectangle of extent
/// `longM` along `axis` and `shortM` across it, centered at `center`.
/// Result is sorted by (col, row). Throws std::invalid_argument when `axis`
/// has zero length or an extent is not positive.
std::vector<CellIndex> CellsInOrientedRect (Vec2 center, double longM, double shortM, Vec2 axis,
                                            const AreaMap &map);

/// Membership test matching CellsInOrientedRect for a single point.
bool InOrientedRect (Vec2 p, Vec2 center, double longM, double shortM, Vec2 unitAxis);

} // namespace uavsim

template <>
struct std::hash<uavsim::CellIndex>
{
  std::size_t operator() (const uavsim::CellIndex &c) const noexcept
  {
    return std::hash<long long> () ((static_cast<long long> (c.col) << 32) ^ c.row);
  }
};

#endif
