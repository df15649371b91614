#pragma once

#include <cstdint>

namespace sdg {

// Counter-based generator: every draw is a pure function of
// (seed, stream, step, channel, counter), so sampling order and thread
// schedule cannot change the output.
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t stream, uint64_t step, uint64_t channel)
        : key_(mix(mix(mix(mix(0x9e3779b97f4a7c15ULL ^ seed, stream), step), channel), seed)),
          counter_(0) {}

    uint64_t next_u64() { return mix(key_, counter_++); }

    // uniform in (0, 1)
    double next_uniform() {
        // 53-bit mantissa, offset keeps the value strictly inside the interval
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double next_gaussian();

    // Inverse-CDF search; fine for the small means used here.
    int next_poisson(double mean);

  private:
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sdg
