#ifndef UAVSIM_HELLO_HPP
#define UAVSIM_HELLO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "uavsim/geometry.hpp"

namespace uavsim {

/// Append-only bit buffer. Fields are written LSB first.
class BitBuffer
{
public:
  void Put (std::uint32_t value, int bits);
  std::uint32_t Get (std::size_t &cursor, int bits) const;
  std::size_t Bits () const { return m_bits; }
  const std::vector<std::uint8_t> &Bytes () const { return m_bytes; }

private:
  std::vector<std::uint8_t> m_bytes;
  std::size_t m_bits = 0;
};

/// Per-neighbour link report carried by nodes adjacent to an active route.
struct LinkSummary
{
  NodeId neighbor = kNoNode;
  double lltS = 0;
  double en = 0;
  int il = 0;
  bool linkActive = false;

  bool operator== (const LinkSummary &) const = default;
};

struct HelloPacket
{
  static constexpr int kPatchSide = 5;
  static constexpr int kPatchCells = kPatchSide * kPatchSide;

  NodeId id = kNoNode;
  Vec2 pos;
  CellIndex nextWaypoint;
  std::array<double, kPatchCells> patch{}; // row-major, (-2,-2) first
  int hopsToBs = 15;
  std::optional<CellIndex> maskCell;
  double en = 0;
  int il = 0;
  std::vector<LinkSummary> summaries;
};

/// Field widths of the Hello payload, in transmission order.
namespace hello_bits {
inline constexpr int kId = 7;
inline constexpr int kLocationAxis = 9; // 10 m units, modulo 512
inline constexpr int kLocation = 2 * kLocationAxis;
inline constexpr int kCell = 12;
inline constexpr int kPatchValue = 6;
inline constexpr int kPatch = HelloPacket::kPatchCells * kPatchValue;
inline constexpr int kHops = 4;
inline constexpr int kMask = 12;
inline constexpr int kFixed = kId + kLocation + kCell + kPatch + kHops + kMask; // 203
inline constexpr int kEnergy = 8;
inline constexpr int kIl = 8;
inline constexpr int kSummary = kId + 8 + 8 + 8 + 1;
} // namespace hello_bits

inline constexpr double kLocationQuantumM = 10.0;
inline constexpr double kPheromoneQuantum = 0.25;

struct EncodedHello
{
  BitBuffer bits;
  bool saturated = false; // some field clipped to its width
};

EncodedHello EncodeHello (const HelloPacket &hello, const AreaMap &map);

/// `reference` is any point within half the 5120 m wrap distance of the
/// sender (every receiver qualifies, being within radio range).
HelloPacket DecodeHello (const BitBuffer &bits, const AreaMap &map, Vec2 reference);

/// Bits of a Hello with `summaryCount` link summaries.
std::size_t HelloSizeBits (std::size_t summaryCount);

/// Quantisation helpers, exposed so tests can state round-trip expectations.
int QuantizeAxis (double meters);
double QuantizePheromone (double value);

} // namespace uavsim

#endif
