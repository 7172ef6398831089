#include "amplab/prng.hpp"

#include "amplab/gauss.hpp"

namespace amplab {

namespace {
constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
constexpr uint64_t kTrialTag = 0x7261696c5f616d70ull;
}  // namespace

uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(mix64(seed ^ mix64(stream))) {}

uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGamma); }

double CounterRng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::next_gaussian() { return norm_quantile(next_uniform()); }

CounterRng make_stream(uint64_t seed, Stream stream) {
    return CounterRng(seed, static_cast<uint64_t>(stream));
}

uint64_t trial_seed(uint64_t base_seed, uint64_t trial_index) {
    return base_seed ^ mix64(kTrialTag + trial_index);
}

}  // namespace amplab
