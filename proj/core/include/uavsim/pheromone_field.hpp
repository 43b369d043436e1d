#ifndef UAVSIM_PHEROMONE_FIELD_HPP
#define UAVSIM_PHEROMONE_FIELD_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "uavsim/geometry.hpp"

namespace uavsim {

/// Read access to an effective (mask-applied) pheromone map.
class PheromoneReader
{
public:
  virtual ~PheromoneReader () = default;
  virtual double Effective (CellIndex c) const = 0;
};

/// 2L x L attraction rectangle registered by one route node.
struct MaskRect
{
  CellIndex center;
  Vec2 centerPos;
  Vec2 longAxis; // unit; the 2L side
  double longM = 0;
  double shortM = 0;
  std::vector<CellIndex> cells;
  double createdAt = 0;

  bool Covers (Vec2 p) const { return InOrientedRect (p, centerPos, longM, shortM, longAxis); }
};

struct MaskApplyResult
{
  bool replaced = false;
  bool degenerateAxis = false;
  Vec2 longAxis;
};

/// Ground-truth repel pheromone grid plus the mask overlay. Masks never touch
/// the stored values; a cell covered by any mask reads as zero.
class PheromoneField : public PheromoneReader
{
public:
  explicit PheromoneField (const AreaMap &map);

  const AreaMap &Map () const { return m_map; }

  void Deposit (CellIndex c, double magnitude = 1.0);
  /// One tick: evaporate every cell by lambda, then move psi of each cell's
  /// value to its in-map 4-neighbours in equal shares.
  void Step (double lambdaEvap, double psiDiff);

  /// Registers (or replaces) `owner`'s mask centered on the cell holding
  /// `ownerPos`, with the 2L side perpendicular to `routeAxis`. A zero
  /// `routeAxis` falls back to `heading` and sets degenerateAxis.
  MaskApplyResult ApplyMask (NodeId owner, Vec2 ownerPos, Vec2 routeAxis, double lengthM, double heading,
                             double now);
  /// No-op when `owner` has no mask. Returns whether one was removed.
  bool RemoveMask (NodeId owner);
  bool HasMask (NodeId owner) const { return m_masks.count (owner) != 0; }
  const std::map<NodeId, MaskRect> &Masks () const { return m_masks; }

  double Value (CellIndex c) const;
  double EffectiveValue (CellIndex c) const;
  double Effective (CellIndex c) const override { return EffectiveValue (c); }
  bool IsMasked (CellIndex c) const;
  double Total () const;
  double Min () const;

  /// col,row,value,effective_value rows for heat maps.
  void WriteCsv (std::ostream &out, double now) const;

private:
  int Index (CellIndex c) const;

  AreaMap m_map;
  std::vector<double> m_values;
  std::vector<double> m_scratch;
  std::vector<std::uint16_t> m_maskCount;
  std::map<NodeId, MaskRect> m_masks;
};

/// One node's belief about the pheromone map, assembled from its own sensing
/// and the 5x5 patches heard in neighbours' Hellos. Stale entries decay by
/// evaporation since they were heard; never-heard cells read as zero.
class LocalPheromoneMap
{
public:
  explicit LocalPheromoneMap (const AreaMap &map);

  void Observe (CellIndex c, double value, long long tick)
  {
    if (!m_map->InBounds (c))
      {
        return;
      }
    int i = m_map->Flat (c);
    if (tick >= m_stamps[i])
      {
        m_values[i] = static_cast<float> (value);
        m_stamps[i] = static_cast<std::int32_t> (tick);
      }
  }
  double Value (CellIndex c, long long nowTick, double lambdaEvap) const;
  bool Known (CellIndex c) const;

private:
  const AreaMap *m_map;
  std::vector<float> m_values;
  std::vector<std::int32_t> m_stamps;
};

} // namespace uavsim

#endif
