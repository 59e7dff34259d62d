#pragma once

#include <cstdint>

namespace lipc {

// Counter-based generator: draw i of stream s under seed k is
//   key  = splitmix(k) ^ splitmix(s + 0x632BE59BD9B4E019)
//   bits = splitmix(key + i * 0x9E3779B97F4A7C15)
// with splitmix the SplitMix64 finalizer (add golden gamma, then xor-shift-multiply).
// Uniforms take the top 53 bits; normals use Box-Muller on draws (2j, 2j+1), cosine branch.
// Everything is a pure function of (seed, stream, counter), so ports in other languages
// reproduce identical streams.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static std::uint64_t splitmix(std::uint64_t z);

  std::uint64_t bits_at(std::uint64_t index) const;
  double uniform_at(std::uint64_t index) const;  // in [0, 1)
  double normal_at(std::uint64_t index) const;   // uses draws 2*index, 2*index+1

  std::uint64_t next_bits() { return bits_at(counter_++); }
  double next_uniform() { return uniform_at(counter_++); }
  double next_normal() { return normal_at(normal_counter_++); }

  // Uniform integer in [0, n) by rejection-free multiply-shift (n > 0).
  std::uint64_t next_index(std::uint64_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::uint64_t normal_counter_ = 1ULL << 62;
};

}  // namespace lipc
