#include "rng.hpp"

#include <cmath>

namespace pwband {
namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi, std::uint64_t* lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  *hi = static_cast<std::uint64_t>(p >> 64);
  *lo = static_cast<std::uint64_t>(p);
}

inline std::array<std::uint64_t, 4> round_once(std::array<std::uint64_t, 4> s,
                                               const std::array<std::uint64_t, 2>& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, s[0], &hi0, &lo0);
  mulhilo(kMul1, s[2], &hi1, &lo1);
  return {hi1 ^ s[1] ^ k[0], lo1, hi0 ^ s[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    counter = round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

std::uint64_t CounterRng::next_u64() {
  if (have_ == 0) {
    buf_ = philox4x64({block_, 0, 0, 0}, key_);
    ++block_;
    have_ = 4;
  }
  return buf_[4 - have_--];
}

double CounterRng::laplace(double scale) {
  double t = uniform01() - 0.5;
  double m = 1.0 - 2.0 * std::fabs(t);
  if (m < 1e-300) m = 1e-300;
  return (t < 0 ? scale : -scale) * std::log(m);
}

double CounterRng::gaussian(double sigma) {
  double u1 = uniform01();
  double u2 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

}  // namespace pwband
