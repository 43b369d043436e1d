#ifndef UAVSIM_RNG_HPP
#define UAVSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace uavsim {

/// Stream identifiers. Each concern draws from its own stream so that adding
/// draws in one subsystem never shifts another's sequence.
enum class RngStreamId : std::uint64_t
{
  Launch = 1,
  Mobility = 2,
  Failures = 3,
  Traffic = 4,
  Test = 99,
};

/// Deterministic random stream keyed by (seed, stream id). Distribution code
/// is local so draws are identical across standard libraries.
class RngStream
{
public:
  RngStream (std::uint64_t seed, std::uint64_t streamId);
  RngStream (std::uint64_t seed, RngStreamId id) : RngStream (seed, static_cast<std::uint64_t> (id)) {}

  std::uint64_t NextU64 () { return m_engine (); }
  /// Uniform in [0, 1).
  double Uniform ();
  double Uniform (double lo, double hi) { return lo + (hi - lo) * Uniform (); }
  /// Uniform integer in [0, n).
  std::uint64_t Below (std::uint64_t n);

private:
  std::mt19937_64 m_engine;
};

RngStream SeededRng (std::uint64_t seed, RngStreamId id);

} // namespace uavsim

#endif
