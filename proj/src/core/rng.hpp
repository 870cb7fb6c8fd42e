#pragma once

#include <array>
#include <cstdint>

namespace pwband {

// Philox4x64-10 block function (counter-based, stateless).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

// Deterministic stream addressed by (seed, trial, stream). Independent
// streams never share counter blocks, so trials parallelize bit-exactly.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream)
      : key_{seed, (trial << 8) | stream} {}

  std::uint64_t next_u64();
  // [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double laplace(double scale);
  double gaussian(double sigma);
  int sign() { return (next_u64() & 1) ? 1 : -1; }

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  int have_ = 0;
};

// Stream ids. Keep stable: they are part of the reproducibility contract.
inline constexpr std::uint32_t kStreamTrueFunction = 1;
inline constexpr std::uint32_t kStreamInputs = 2;
inline constexpr std::uint32_t kStreamNoise = 3;
inline constexpr std::uint32_t kStreamSpsSigns = 4;
inline constexpr std::uint32_t kStreamTrial = 5;
inline constexpr std::uint32_t kStreamDemo = 6;

}  // namespace pwband
