#include "bgcd/rng.hpp"

#include <algorithm>
#include <bit>

namespace bgcd {

double CounterRng::uniform() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

int CounterRng::geometric() noexcept {
  return std::min(1 + std::countl_zero(next()), 64);
}

} // namespace bgcd
