#include "uavsim/rng.hpp"

#include <stdexcept>

namespace uavsim {

namespace {

std::uint64_t SplitMix64 (std::uint64_t &state)
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream (std::uint64_t seed, std::uint64_t streamId)
{
  std::uint64_t state = seed ^ (streamId * 0xd1b54a32d192ed03ULL);
  std::uint64_t mixed = SplitMix64 (state);
  mixed ^= SplitMix64 (state) + streamId;
  m_engine.seed (mixed);
  m_engine.discard (16);
}

double
RngStream::Uniform ()
{
  return static_cast<double> (m_engine () >> 11) * 0x1.0p-53;
}

std::uint64_t
RngStream::Below (std::uint64_t n)
{
  if (n == 0)
    {
      throw std::invalid_argument ("RngStream::Below: empty range");
    }
  // Rejection sampling keeps the draw unbiased.
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t v;
  do
    {
      v = m_engine ();
    }
  while (v >= limit);
  return v % n;
}

RngStream
SeededRng (std::uint64_t seed, RngStreamId id)
{
  return RngStream (seed, id);
}

} // namespace uavsim
