#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "amplab/amp.hpp"
#include "amplab/model.hpp"
#include "amplab/prng.hpp"

namespace amplab {

// Exact Gaussian decomposition of a finished AMP run:
//   s_t      = sum_k gamma_t^k phi_k + xi_t,
//   beta_t+1 = sum_k alpha_t^k psi_k + zeta_t,
// with orthonormal bases a_k, b_k grown from G_k(s_k), F_k(beta_k), the
// projected designs X_k, and auxiliary Gaussians completing phi_k, psi_k.
//
// The auxiliary draws come from a dedicated stream (aux_seed) so the same
// dataset can be re-decomposed under fresh auxiliary randomness.
// X_t products are evaluated lazily through the stored bases
// (X_t = (I - U U^T) X (I - V V^T)); an explicit X_t copy is materialized
// only while n*p stays within `materialize_budget`.
struct DecompOptions {
    uint64_t aux_seed = 0;
    long materialize_budget = 1 << 26;  // entries
};

class Decomposition {
  public:
    Decomposition(const LinearModel& model, const AmpTrace& trace,
                  const DecompOptions& opts = {});

    // Runs extend_bases / draw_phi_psi / compute_coefficients / residuals
    // for steps 1..t_stop (t_stop <= trace.t_max()).  Stops early and
    // returns the last completed step if a projected direction degenerates.
    int run(int t_stop);

    // Individual stages, exposed for tests; step() advances one t.
    void step();

    int steps_done() const { return t_; }

    const Eigen::MatrixXd& U() const { return U_; }
    const Eigen::MatrixXd& V() const { return V_; }
    const std::vector<Eigen::VectorXd>& phi() const { return phi_; }
    const std::vector<Eigen::VectorXd>& psi() const { return psi_; }
    // Coefficient vectors per step t (1-based outer index).
    const std::vector<Eigen::VectorXd>& alpha_coeffs() const { return alpha_; }
    const std::vector<Eigen::VectorXd>& gamma_coeffs() const { return gamma_; }
    const std::vector<Eigen::VectorXd>& xi() const { return xi_; }
    const std::vector<Eigen::VectorXd>& zeta() const { return zeta_; }
    // Auxiliary Gaussian draws injected at step k (g: k-1 entries, q: k).
    const std::vector<Eigen::VectorXd>& aux_g() const { return aux_g_; }
    const std::vector<Eigen::VectorXd>& aux_q() const { return aux_q_; }

    // u_t = sum_k gamma_t^k phi_k and v_{t+1} = sum_k alpha_t^k psi_k.
    Eigen::VectorXd u(int t) const;
    Eigen::VectorXd v_next(int t) const;

    const Eigen::VectorXd& s(int t) const { return s_[t]; }
    const Eigen::VectorXd& beta(int t) const { return beta_[t]; }
    Eigen::VectorXd F_of_beta(int t) const;
    Eigen::VectorXd G_of_s(int t) const;

    // Explicit projected design (only when within budget; for diagnostics).
    bool has_materialized_design() const { return materialized_; }
    const Eigen::MatrixXd& projected_design() const;

    const DenoiserSequence& denoisers() const { return den_; }
    const LinearModel& model() const { return model_; }

  private:
    Eigen::VectorXd project_out_U(const Eigen::VectorXd& v) const;
    Eigen::VectorXd project_out_V(const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply_Xt(const Eigen::VectorXd& v) const;      // X_t v
    Eigen::VectorXd apply_Xt_T(const Eigen::VectorXd& v) const;    // X_t^T v

    const LinearModel& model_;
    DenoiserSequence den_;
    int T_;
    int t_ = 0;
    Eigen::MatrixXd U_, V_;
    std::vector<Eigen::VectorXd> s_, beta_;     // iterates, 1-based
    std::vector<Eigen::VectorXd> phi_, psi_;    // 0-based (step k-1)
    std::vector<Eigen::VectorXd> alpha_, gamma_, xi_, zeta_;  // 1-based
    std::vector<Eigen::VectorXd> aux_g_, aux_q_;               // 0-based
    Eigen::MatrixXd Xt_;                        // materialized projected design
    bool materialized_ = false;
    CounterRng aux_;
};

// Auxiliary (hat) sequences giving a finer expansion of the residuals
// xi, zeta.  hat step t needs the decomposition through step t+1.
struct HatState {
    std::vector<Eigen::VectorXd> gamma_hat;  // 1-based, gamma_hat[t] in R^t
    std::vector<Eigen::VectorXd> alpha_hat;  // alpha_hat[t] in R^t
    std::vector<Eigen::VectorXd> beta_hat;   // beta_hat[t+1]
    std::vector<Eigen::VectorXd> s_hat;      // s_hat[t]
    std::vector<double> xi_hat_norm;         // ||xi_{t+1} - sum alpha_hat G_k(s_k)||
    std::vector<double> zeta_hat_norm;       // ||zeta_{t+1} - sum gamma_hat F_k(beta_k)||
};

class HatSequences {
  public:
    explicit HatSequences(const Decomposition& decomp);

    // Advances to step t (requires decomp.steps_done() >= t+1).
    void run(int t_stop);
    void step();

    int steps_done() const { return t_; }
    const HatState& state() const { return st_; }

  private:
    const Decomposition& d_;
    HatState st_;
    int t_ = 0;
};

}  // namespace amplab
