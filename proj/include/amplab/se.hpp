#pragma once

#include <Eigen/Dense>
#include <vector>

#include "amplab/amp.hpp"
#include "amplab/model.hpp"

namespace amplab {

// Deterministic state-evolution sequence.  Expectations are taken over the
// Gaussian perturbation only, with the realized theta* and eps vectors held
// fixed (this differs from the population-SE convention common elsewhere:
// the predictor is tied to the instance at hand).
struct SeTrace {
    AmpMode mode = AmpMode::sparse;
    std::vector<double> alpha_star;   // index t = 1.. (entry 0 unused)
    std::vector<double> gamma_star;   // gamma*_1 = ||theta*||
    std::vector<double> inner_param;  // tau*_t or b*_t

    struct FixedPoint {
        double alpha = 0.0;
        double gamma = 0.0;
        int iterations = 0;
        bool converged = false;
        std::vector<double> contraction_ratios;  // |d gamma^2_{t+1}| / |d gamma^2_t|
    } fixed_point;
};

struct SeStepSparse {
    double alpha_t;
    double tau_star;
    double gamma_next;
};

// alpha_t = sqrt(gamma_t^2 + ||eps||^2); tau*_t minimizes the closed-form
// soft-threshold risk (same grid + golden-section scheme as select_tau,
// searched on [0, ||theta*||_inf + 20 alpha_t / sqrt(n)]); gamma_{t+1} is
// the square root of the minimal risk.
SeStepSparse se_step_sparse(const Eigen::VectorXd& theta_star, double eps_norm2,
                            double gamma_t, int n);

struct SeStepRobust {
    double b_star;
    double alpha_t;
    double gamma_next;
    double calibration_residual;
};

// b*_t solves (b/(1+b)) (1/p) sum_i P(|eps_i + gamma_t g_i| < lambda(1+b)) = 1
// by bisection (continuous in b, tolerance 1e-10), then alpha_t from the
// closed-form clipped second moment and gamma_{t+1} = sqrt(p/n) alpha_t.
SeStepRobust se_step_robust(const Eigen::VectorXd& eps, double lambda, int n, int p,
                            double gamma_t);

struct SeOptions {
    int t_max = 50;
    double fixed_point_tol = 1e-10;
    double lambda = 0.0;  // robust; 0 means 1/sqrt(n)
};

SeTrace run_se(const LinearModel& model, AmpMode mode, const SeOptions& opts = {});

// Per-iteration empirical counterparts ||F_t(beta_t)||, ||G_t(s_t)|| and
// their squared gaps against a state-evolution trace.
struct EmpiricalSe {
    std::vector<double> gamma_emp;   // ||F_t(beta_t)||
    std::vector<double> alpha_emp;   // ||G_t(s_t)||
    std::vector<double> gamma_gap2;  // | ||gamma_t||^2 - gamma*_t^2 |
    std::vector<double> alpha_gap2;
};

EmpiricalSe empirical_se(const AmpTrace& trace, const SeTrace& se);

}  // namespace amplab
