#pragma once

#include <Eigen/Dense>
#include <vector>

#include "amplab/model.hpp"

namespace amplab {

enum class AmpMode { sparse, robust };

// State after step t.  states[0] holds the initialization (theta_1, r_0).
struct AmpState {
    int t = 0;
    Eigen::VectorXd theta;    // theta_{t+1} (for t = 0: theta_1)
    Eigen::VectorXd r;        // r_t (for t = 0: r_0 = 0)
    double param = 0.0;       // tau_t (sparse) or b_t (robust)
    double g_bracket = 1.0;   // <g_t'(r_t)> under the 1/n normalization
    double onsager = 0.0;     // <f_t'(theta_t)> <g_{t-1}'(r_{t-1})>^{-1}
    bool jump_flag = false;   // robust calibration landed on a count jump
};

struct AmpTrace {
    AmpMode mode = AmpMode::sparse;
    double lambda = 0.0;                 // Huber knee (robust)
    std::vector<AmpState> states;        // t_max + 1 entries

    // Derived error quantities, index t = 1..t_max (entry 0 unused).
    std::vector<double> beta_norm;       // ||theta_t - theta*||, up to t_max+1
    std::vector<double> F_norm;          // ||F_t(beta_t)||
    std::vector<double> G_norm;          // ||G_t(s_t)||

    int t_max() const { return static_cast<int>(states.size()) - 1; }
    const Eigen::VectorXd& theta(int t) const { return states[t - 1].theta; }
    const Eigen::VectorXd& r(int t) const { return states[t].r; }
};

struct SelectB {
    double b = 0.0;
    double bracket = 0.0;      // <g'(r)> at the returned b
    bool jump = false;
    double residual = 0.0;     // |<g'(r)> - 1|
};

// Adaptive threshold of the tau-augmented residual: minimizes
// || y - X ST_tau(theta_t) + <ST'_tau(theta_t)> r_{t-1} ||_2 over
// tau in [0, ||theta_t||_inf]; ties to the smallest tau.
double select_tau(const LinearModel& model, const Eigen::VectorXd& theta_t,
                  const Eigen::VectorXd& r_prev);

// Calibrates b > 0 so that <g'(r)> = (b/(1+b)) k(b) / p is within tol of 1,
// where k(b) = #{i : |r_i| < lambda (1+b)}.  The count is a step function;
// when no b reaches the tolerance the smallest b whose one-sided limits
// straddle 1 is returned with `jump` set.
SelectB select_b(const Eigen::VectorXd& r, double lambda, int n, int p,
                 double tol = 1e-6);

struct RunOptions {
    int t_max = 25;
    double lambda = 0.0;       // robust; 0 means 1/sqrt(n)
    bool keep_history = true;  // false keeps a 2-deep window (decomp disabled)
};

AmpTrace run_amp(const LinearModel& model, AmpMode mode, const RunOptions& opts);

// Scalar-function view of a finished run: evaluates the error-form
// denoisers F_t, G_t and their pointwise derivatives for arbitrary
// arguments.  F_1 is the constant theta* (f_1 == 0) and G_0 == 0; the
// robust G_t carries the calibration constant 1/<g_t'(r_t)> pinned by the
// run so that <G_t'(s_t)> = 1 exactly.
class DenoiserSequence {
  public:
    DenoiserSequence(const LinearModel& model, const AmpTrace& trace);

    Eigen::VectorXd F(int t, const Eigen::VectorXd& beta) const;
    Eigen::VectorXd G(int t, const Eigen::VectorXd& s) const;
    Eigen::VectorXd F_deriv(int t, const Eigen::VectorXd& beta) const;
    Eigen::VectorXd G_deriv(int t, const Eigen::VectorXd& s) const;
    // 1/n-normalized means of the derivatives.
    double F_deriv_mean(int t, const Eigen::VectorXd& beta) const;
    double G_deriv_mean(int t, const Eigen::VectorXd& s) const;

    AmpMode mode() const { return mode_; }
    int n() const { return n_; }
    int p() const { return p_; }

  private:
    AmpMode mode_;
    int n_, p_;
    double lambda_;
    Eigen::VectorXd theta_star_, eps_;
    std::vector<double> param_;     // index t
    std::vector<double> scale_;     // robust: 1/<g_t'(r_t)>
};

// One step of the (F_t, G_t) error-form recursion; `params` are the
// calibrated tau_t/b_t (with robust brackets re-evaluated on its own
// iterates when calibrating fresh).
struct ErrorFormTrace {
    AmpMode mode = AmpMode::sparse;
    double lambda = 0.0;
    std::vector<Eigen::VectorXd> s;      // s_t, t >= 1 (entry 0 unused)
    std::vector<Eigen::VectorXd> beta;   // beta_t, t >= 1, up to t_max+1
    std::vector<double> param;           // per t
    std::vector<double> g_bracket;       // per t
};

// Runs the error-form recursion.  When `given_params` is provided the
// parameter sequence is taken as-is (for cross-checking against the direct
// engine); otherwise each step calibrates exactly like run_amp.
ErrorFormTrace run_error_form(const LinearModel& model, AmpMode mode,
                              const RunOptions& opts,
                              const std::vector<double>* given_params = nullptr);

}  // namespace amplab
