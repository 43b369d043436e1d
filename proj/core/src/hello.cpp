#include "uavsim/hello.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim {

namespace {

constexpr std::uint32_t kNoMaskCode = (1u << hello_bits::kMask) - 1;
constexpr int kAxisWrap = 1 << hello_bits::kLocationAxis;

std::uint32_t Saturate (long long v, int bits, bool &saturated)
{
  long long hi = (1LL << bits) - 1;
  if (v < 0)
    {
      saturated = true;
      return 0;
    }
  if (v > hi)
    {
      saturated = true;
      return static_cast<std::uint32_t> (hi);
    }
  return static_cast<std::uint32_t> (v);
}

double UnwrapAxis (std::uint32_t code, double reference)
{
  double refUnits = reference / kLocationQuantumM;
  double k = std::round ((refUnits - code) / kAxisWrap);
  return (code + k * kAxisWrap) * kLocationQuantumM;
}

} // namespace

void
BitBuffer::Put (std::uint32_t value, int bits)
{
  for (int i = 0; i < bits; ++i)
    {
      if (m_bits % 8 == 0)
        {
          m_bytes.push_back (0);
        }
      if ((value >> i) & 1u)
        {
          m_bytes.back () |= static_cast<std::uint8_t> (1u << (m_bits % 8));
        }
      ++m_bits;
    }
}

std::uint32_t
BitBuffer::Get (std::size_t &cursor, int bits) const
{
  if (cursor + bits > m_bits)
    {
      throw std::out_of_range ("BitBuffer::Get past end of payload");
    }
  std::uint32_t v = 0;
  for (int i = 0; i < bits; ++i, ++cursor)
    {
      if ((m_bytes[cursor / 8] >> (cursor % 8)) & 1u)
        {
          v |= 1u << i;
        }
    }
  return v;
}

int
QuantizeAxis (double meters)
{
  return static_cast<int> (std::lround (meters / kLocationQuantumM));
}

double
QuantizePheromone (double value)
{
  long long code = std::clamp<long long> (std::llround (value / kPheromoneQuantum), 0, 63);
  return code * kPheromoneQuantum;
}

std::size_t
HelloSizeBits (std::size_t summaryCount)
{
  return hello_bits::kFixed + hello_bits::kEnergy + hello_bits::kIl + summaryCount * hello_bits::kSummary;
}

EncodedHello
EncodeHello (const HelloPacket &h, const AreaMap &map)
{
  using namespace hello_bits;
  EncodedHello out;
  bool &sat = out.saturated;
  BitBuffer &b = out.bits;

  b.Put (Saturate (h.id, kId, sat), kId);
  b.Put (static_cast<std::uint32_t> (((QuantizeAxis (h.pos.x) % kAxisWrap) + kAxisWrap) % kAxisWrap),
         kLocationAxis);
  b.Put (static_cast<std::uint32_t> (((QuantizeAxis (h.pos.y) % kAxisWrap) + kAxisWrap) % kAxisWrap),
         kLocationAxis);
  b.Put (Saturate (map.Flat (h.nextWaypoint), kCell, sat), kCell);
  for (double v : h.patch)
    {
      b.Put (Saturate (std::llround (v / kPheromoneQuantum), kPatchValue, sat), kPatchValue);
    }
  b.Put (Saturate (h.hopsToBs, kHops, sat), kHops);
  b.Put (h.maskCell ? Saturate (map.Flat (*h.maskCell), kMask, sat) : kNoMaskCode, kMask);
  b.Put (Saturate (std::llround (h.en), kEnergy, sat), kEnergy);
  b.Put (Saturate (h.il, kIl, sat), kIl);
  for (const auto &s : h.summaries)
    {
      b.Put (Saturate (s.neighbor, kId, sat), kId);
      b.Put (Saturate (std::llround (std::floor (s.lltS)), 8, sat), 8);
      b.Put (Saturate (std::llround (s.en), 8, sat), 8);
      b.Put (Saturate (s.il, 8, sat), 8);
      b.Put (s.linkActive ? 1u : 0u, 1);
    }
  return out;
}

HelloPacket
DecodeHello (const BitBuffer &bits, const AreaMap &map, Vec2 reference)
{
  using namespace hello_bits;
  if (bits.Bits () < HelloSizeBits (0) || (bits.Bits () - HelloSizeBits (0)) % kSummary != 0)
    {
      throw std::invalid_argument ("DecodeHello: malformed payload length");
    }
  HelloPacket h;
  std::size_t cur = 0;
  h.id = static_cast<NodeId> (bits.Get (cur, kId));
  std::uint32_t xc = bits.Get (cur, kLocationAxis);
  std::uint32_t yc = bits.Get (cur, kLocationAxis);
  h.pos = {UnwrapAxis (xc, reference.x), UnwrapAxis (yc, reference.y)};
  h.nextWaypoint = map.Unflat (static_cast<int> (bits.Get (cur, kCell)));
  for (double &v : h.patch)
    {
      v = bits.Get (cur, kPatchValue) * kPheromoneQuantum;
    }
  h.hopsToBs = static_cast<int> (bits.Get (cur, kHops));
  std::uint32_t mask = bits.Get (cur, kMask);
  if (mask != kNoMaskCode)
    {
      h.maskCell = map.Unflat (static_cast<int> (mask));
    }
  h.en = bits.Get (cur, kEnergy);
  h.il = static_cast<int> (bits.Get (cur, kIl));
  while (cur < bits.Bits ())
    {
      LinkSummary s;
      s.neighbor = static_cast<NodeId> (bits.Get (cur, kId));
      s.lltS = bits.Get (cur, 8);
      s.en = bits.Get (cur, 8);
      s.il = static_cast<int> (bits.Get (cur, 8));
      s.linkActive = bits.Get (cur, 1) != 0;
      h.summaries.push_back (s);
    }
  return h;
}

} // namespace uavsim
