#pragma once

#include <cstdint>

namespace amplab {

// 64-bit counter-based generator built on the SplitMix64 finalizer
// (Steele, Lea, Flood 2014).  Output i of stream (seed, stream) is
//
//     mix64( key + (i+1) * 0x9E3779B97F4A7C15 )
//     with key = mix64( seed ^ mix64(stream) ),
//
// where mix64 is the invertible SplitMix64 finalizer.  The generator is
// therefore a pure function of (seed, stream, i): replaying any prefix is
// exact, streams with distinct ids never coincide for a fixed seed (mix64
// is a bijection), and results are identical across platforms.
//
// Gaussians are produced by the inverse-CDF transform z = Phi^{-1}(u)
// with u = (next() >> 11) * 2^-53 + 2^-54 and Phi^{-1} evaluated by
// Wichura's AS 241 rational approximation (see gauss.hpp), accurate to
// double precision.
uint64_t mix64(uint64_t z);

class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t stream);

    uint64_t next_u64();
    // Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
    double next_uniform();
    double next_gaussian();

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

// Stream ids used by the library; a trial first derives its own seed and
// then opens per-purpose streams under it.
enum class Stream : uint64_t {
    design = 1,
    signal = 2,
    noise = 3,
    decomp_aux = 4,
    monte_carlo = 5,
};

CounterRng make_stream(uint64_t seed, Stream stream);

// Documented split: trial_seed(seed, i) = seed ^ mix64(0x7261696c-tagged i).
// Distinct trial indices give distinct seeds for any base seed.
uint64_t trial_seed(uint64_t base_seed, uint64_t trial_index);

}  // namespace amplab
