#include "lipc/rng.hpp"

#include <cmath>
#include <numbers>

namespace lipc {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed) ^ splitmix(stream + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t CounterRng::splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::bits_at(std::uint64_t index) const {
  return splitmix(key_ + index * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::uniform_at(std::uint64_t index) const {
  return static_cast<double>(bits_at(index) >> 11) * 0x1.0p-53;
}

double CounterRng::normal_at(std::uint64_t index) const {
  const double u1 = uniform_at(2 * index);
  const double u2 = uniform_at(2 * index + 1);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::next_index(std::uint64_t n) {
  const unsigned __int128 product = static_cast<unsigned __int128>(next_bits()) * n;
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace lipc
