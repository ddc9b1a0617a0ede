#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  Every draw
// is a pure function of (seed, path, step, channel, index), so serial and
// parallel sweeps produce bit-identical streams and any path can be replayed
// in isolation.

#include <array>
#include <cstdint>

#include "expfun/common.hpp"

namespace expfun {

namespace philox {

inline constexpr uint32_t kM0 = 0xD2511F53u;
inline constexpr uint32_t kM1 = 0xCD9E8D57u;
inline constexpr uint32_t kW0 = 0x9E3779B9u;
inline constexpr uint32_t kW1 = 0xBB67AE85u;

using Block = std::array<uint32_t, 4>;

inline Block round10(Block c, uint32_t k0, uint32_t k1) {
  for (int r = 0; r < 10; ++r) {
    const uint64_t p0 = static_cast<uint64_t>(kM0) * c[0];
    const uint64_t p1 = static_cast<uint64_t>(kM1) * c[2];
    c = {static_cast<uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<uint32_t>(p1),
         static_cast<uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<uint32_t>(p0)};
    k0 += kW0;
    k1 += kW1;
  }
  return c;
}

}  // namespace philox

// uniform on the open interval (0,1)
inline Real u01(uint32_t x) { return (x + 0.5) * 0x1p-32; }

class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  philox::Block block(uint32_t path, uint32_t step, uint32_t channel, uint32_t index) const {
    return philox::round10({path, step, channel, index}, static_cast<uint32_t>(seed_),
                           static_cast<uint32_t>(seed_ >> 32));
  }

  // one standard normal (Box-Muller, cosine branch) from counter slot 0/1
  Real normal(uint32_t path, uint32_t step, uint32_t channel, uint32_t index = 0) const {
    const auto b = block(path, step, channel, index);
    const Real r = std::sqrt(-2.0 * std::log(u01(b[0])));
    return r * std::cos(2.0 * M_PI * u01(b[1]));
  }

  Real uniform(uint32_t path, uint32_t step, uint32_t channel, uint32_t index = 0) const {
    return u01(block(path, step, channel, index)[0]);
  }

  // Poisson by inversion of the cdf with a single uniform
  int poisson(Real lambda, uint32_t path, uint32_t step, uint32_t channel,
              uint32_t index = 0) const {
    if (lambda <= 0) return 0;
    const Real u = uniform(path, step, channel, index);
    Real p = std::exp(-lambda), cum = p;
    int k = 0;
    while (u > cum && k < 100000) {
      ++k;
      p *= lambda / k;
      cum += p;
    }
    return k;
  }

 private:
  uint64_t seed_;
};

}  // namespace expfun
