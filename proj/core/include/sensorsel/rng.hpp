#ifndef SENSORSEL_RNG_HPP
#define SENSORSEL_RNG_HPP

#include <cstdint>
#include <random>

namespace sensorsel {

/// Stream tags used when deriving per-component generators from a root seed.
/// The numeric values are part of the reproducibility contract.
enum class Stream : std::uint64_t {
  random_arrays = 1,
  hybrid_random = 2,
  randomized_sketch = 3,
  membrane_coefficients = 4,
  membrane_split = 5,
  lqg_noise = 6,
  lqg_random_sensors = 7,
  dmd_noise = 8,
  synthetic_field = 9,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based derivation: the seed for (root, stream, index) does not depend
/// on how many other streams were drawn before it.
std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index) noexcept;

std::mt19937_64 make_engine(std::uint64_t root, Stream stream, std::uint64_t index);

}  // namespace sensorsel

#endif  // SENSORSEL_RNG_HPP
