#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amplab/amp.hpp"
#include "amplab/model.hpp"

namespace amplab {

// Experiment description parsed from a flat `key = value` text file
// (# comments, blank lines allowed; unknown keys rejected).  Grammar and
// defaults are documented in the README.
struct ExperimentConfig {
    AmpMode mode = AmpMode::sparse;
    int n = 0;
    int p = 0;
    int k = 0;
    NoiseSpec noise;
    bool noise_set = false;
    double noise_norm_target = 0.5;   // sparse default: ||eps|| concentrates here
    SignalSpec signal;
    double lambda = 0.0;              // robust knee; 0 means 1/sqrt(n)
    int t_max = 25;
    int trials = 20;
    uint64_t seed = 0;
    std::vector<int> n_sweep;         // optional; p, k scale proportionally
    bool diag_decomp = false;
    bool diag_hat = false;
    bool diag_w1 = false;
    bool diag_hfun = false;
    bool warn_sample_size = false;    // n <= 2k log(p/k) (soft check)

    NoiseSpec noise_for(int n_eff) const;
    ExperimentConfig scaled_to(int n_eff) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace amplab
