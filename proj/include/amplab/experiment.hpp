#pragma once

#include <string>
#include <vector>

#include "amplab/config.hpp"

namespace amplab {

struct TrialSummary {
    int trial = 0;
    bool failed = false;
    std::string error;

    std::vector<double> risk;        // ||theta_{t+1} - theta*||, t = 0..t_max
    std::vector<double> gamma_emp;   // t = 1..t_max
    std::vector<double> alpha_emp;
    std::vector<double> gamma_star;
    std::vector<double> alpha_star;
    std::vector<double> param;       // tau_t or b_t
    std::vector<double> xi_norm;     // when decomp enabled
    std::vector<double> zeta_norm;
    std::vector<double> w1_coord;    // when w1 enabled
    std::vector<double> gamma_gap2;  // | ||gamma_t||^2 - gamma*_t^2 |
    std::vector<double> risk_gap;    // ||F_t|| - gamma*_t
};

struct ExperimentOutput {
    int trials_ok = 0;
    int trials_failed = 0;
    std::vector<TrialSummary> trials;
};

// Runs config.trials seeded trials (concurrently up to `threads`), writes
// <out_dir>/trials.csv, <out_dir>/aggregate.json and <out_dir>/risk.svg.
// A failing trial is recorded and skipped in aggregates; the run only
// counts as failed when every trial fails.
ExperimentOutput run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir, int threads);

// n-sweep scaling study: per n, mean metrics at t_ref = min(10, t_max);
// emits <out_dir>/sweep.csv, scaling slopes into aggregate.json and an SVG.
ExperimentOutput run_sweep(const ExperimentConfig& config, const std::string& out_dir,
                           int threads);

int resolve_threads(int requested);  // 0: use AMP_LAB_THREADS, then 1

}  // namespace amplab
