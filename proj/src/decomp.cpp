#include "amplab/decomp.hpp"

#include <cmath>

#include "amplab/errors.hpp"

namespace amplab {

Decomposition::Decomposition(const LinearModel& model, const AmpTrace& trace,
                             const DecompOptions& opts)
    : model_(model), den_(model, trace), T_(trace.t_max()),
      aux_(make_stream(opts.aux_seed, Stream::decomp_aux)) {
    s_.resize(T_ + 1);
    beta_.resize(T_ + 2);
    for (int t = 1; t <= T_; ++t) {
        if (trace.theta(t).size() == 0 || trace.r(t).size() == 0)
            throw invalid_parameter("decomp: trace was run without history");
        s_[t] = trace.r(t) - model.noise;
        beta_[t] = trace.theta(t) - model.signal;
    }
    beta_[T_ + 1] = trace.states[T_].theta - model.signal;
    beta_[1] = trace.states[0].theta - model.signal;

    U_.resize(model.n, 0);
    V_.resize(model.p, 0);
    alpha_.resize(T_ + 1);
    gamma_.resize(T_ + 1);
    xi_.resize(T_ + 1);
    zeta_.resize(T_ + 1);

    if (static_cast<long>(model.n) * model.p <= opts.materialize_budget) {
        Xt_ = model.design;
        materialized_ = true;
    }
}

Eigen::VectorXd Decomposition::project_out_U(const Eigen::VectorXd& v) const {
    if (U_.cols() == 0) return v;
    return v - U_ * (U_.transpose() * v);
}

Eigen::VectorXd Decomposition::project_out_V(const Eigen::VectorXd& v) const {
    if (V_.cols() == 0) return v;
    return v - V_ * (V_.transpose() * v);
}

Eigen::VectorXd Decomposition::apply_Xt(const Eigen::VectorXd& v) const {
    if (materialized_) return Xt_ * v;
    return project_out_U(model_.design * project_out_V(v));
}

Eigen::VectorXd Decomposition::apply_Xt_T(const Eigen::VectorXd& v) const {
    if (materialized_) return Xt_.transpose() * v;
    return project_out_V(model_.design.transpose() * project_out_U(v));
}

const Eigen::MatrixXd& Decomposition::projected_design() const {
    if (!materialized_)
        throw invalid_parameter("decomp: projected design not materialized (over budget)");
    return Xt_;
}

Eigen::VectorXd Decomposition::F_of_beta(int t) const { return den_.F(t, beta_[t]); }
Eigen::VectorXd Decomposition::G_of_s(int t) const { return den_.G(t, s_[t]); }

Eigen::VectorXd Decomposition::u(int t) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model_.n);
    for (int k = 1; k <= t; ++k) acc += gamma_[t](k - 1) * phi_[k - 1];
    return acc;
}

Eigen::VectorXd Decomposition::v_next(int t) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model_.p);
    for (int k = 1; k <= t; ++k) acc += alpha_[t](k - 1) * psi_[k - 1];
    return acc;
}

void Decomposition::step() {
    const int t = t_ + 1;
    if (t > T_) throw invalid_parameter("decomp: no more trace steps");
    const double sqrt_n = std::sqrt(static_cast<double>(model_.n));

    Eigen::VectorXd Gt = G_of_s(t);
    Eigen::VectorXd Ft = F_of_beta(t);

    // extend_bases: orthonormal directions; projecting twice keeps the basis
    // orthonormal to working precision at these step counts.
    Eigen::VectorXd ga = project_out_U(Gt);
    ga = project_out_U(ga);
    if (ga.norm() < 1e-12)
        throw degenerate_direction("decomp: G direction degenerate at t=" + std::to_string(t));
    Eigen::VectorXd a = ga / ga.norm();

    Eigen::VectorXd fb = project_out_V(Ft);
    fb = project_out_V(fb);
    if (fb.norm() < 1e-12)
        throw degenerate_direction("decomp: F direction degenerate at t=" + std::to_string(t));
    Eigen::VectorXd b = fb / fb.norm();

    // draw_phi_psi: the projected-design images plus fresh Gaussian
    // completions from the dedicated auxiliary stream.  Draw order per step:
    // t-1 values of g, then t values of q.
    Eigen::VectorXd g_draws(t - 1), q_draws(t);
    Eigen::VectorXd phi = apply_Xt(b);
    for (int i = 0; i < t - 1; ++i) {
        g_draws(i) = aux_.next_gaussian() / sqrt_n;
        phi += g_draws(i) * U_.col(i);
    }

    Eigen::VectorXd xta = apply_Xt_T(a);
    Eigen::VectorXd psi = xta - b * b.dot(xta);
    for (int i = 0; i < t - 1; ++i) {
        q_draws(i) = aux_.next_gaussian() / sqrt_n;
        psi += q_draws(i) * V_.col(i);
    }
    q_draws(t - 1) = aux_.next_gaussian() / sqrt_n;
    psi += q_draws(t - 1) * b;

    phi_.push_back(std::move(phi));
    psi_.push_back(std::move(psi));
    aux_g_.push_back(std::move(g_draws));
    aux_q_.push_back(std::move(q_draws));

    if (materialized_) {
        Xt_ -= a * (a.transpose() * Xt_);
        Xt_ -= (Xt_ * b) * b.transpose();
    }
    U_.conservativeResize(Eigen::NoChange, t);
    U_.col(t - 1) = a;
    V_.conservativeResize(Eigen::NoChange, t);
    V_.col(t - 1) = b;

    // compute_coefficients (orthonormal expansion of G_t, F_t).
    alpha_[t] = U_.transpose() * Gt;
    gamma_[t] = V_.transpose() * Ft;

    // residuals
    xi_[t] = s_[t];
    for (int k = 1; k <= t; ++k) xi_[t] -= gamma_[t](k - 1) * phi_[k - 1];
    zeta_[t] = beta_[t + 1];
    for (int k = 1; k <= t; ++k) zeta_[t] -= alpha_[t](k - 1) * psi_[k - 1];

    t_ = t;
}

int Decomposition::run(int t_stop) {
    while (t_ < std::min(t_stop, T_)) {
        try {
            step();
        } catch (const degenerate_direction&) {
            break;  // decomposition reported up to the last valid t
        }
    }
    return t_;
}

HatSequences::HatSequences(const Decomposition& decomp) : d_(decomp) {
    if (d_.steps_done() < 1) throw invalid_parameter("hat: decomposition has no steps");
    st_.gamma_hat.resize(d_.steps_done() + 1);
    st_.alpha_hat.resize(d_.steps_done() + 1);
    st_.beta_hat.resize(d_.steps_done() + 2);
    st_.s_hat.resize(d_.steps_done() + 2);
    st_.xi_hat_norm.assign(d_.steps_done() + 1, 0.0);
    st_.zeta_hat_norm.assign(d_.steps_done() + 1, 0.0);
    st_.s_hat[1] = d_.u(1);
    st_.beta_hat[1] = Eigen::VectorXd::Zero(d_.model().p);
    st_.xi_hat_norm[1] = d_.xi()[1].norm();  // alpha_hat_0 = 0
}

void HatSequences::step() {
    const int t = t_ + 1;
    if (t + 1 > d_.steps_done())
        throw invalid_parameter("hat: needs decomposition through t+1");
    const auto& den = d_.denoisers();
    const int n = d_.model().n;

    const Eigen::VectorXd& s_t = d_.s(t);
    const Eigen::VectorXd& s_hat_t = st_.s_hat[t];
    const Eigen::VectorXd u_t = d_.u(t);

    const double gamma_norm2 = d_.gamma_coeffs()[t].squaredNorm();
    if (gamma_norm2 < 1e-20) throw numeric_failure("hat: ||gamma_t||^2 degenerate", t);

    // gamma_hat_t  (eq. coefficients of zeta's expansion)
    Eigen::VectorXd gh(t);
    {
        Eigen::VectorXd Gp_hat = den.G_deriv(t, s_hat_t);
        Eigen::VectorXd Gp = den.G_deriv(t, s_t);
        Eigen::VectorXd Gdiff = den.G(t, s_t) - den.G(t, s_hat_t);
        gh(t - 1) = (Gp_hat.sum() - Gp.sum()) / n + u_t.dot(Gdiff) / gamma_norm2;
        for (int k = 1; k < t; ++k) {
            const Eigen::VectorXd Gp_k = den.G_deriv(k, d_.u(k));
            gh(k - 1) = st_.alpha_hat[t - 1](k - 1) * Gp_hat.dot(Gp_k) / n;
        }
    }
    st_.gamma_hat[t] = gh;

    // zeta_hat_t = zeta_t - sum_k gamma_hat_t^k F_k(beta_k)
    {
        Eigen::VectorXd acc = d_.zeta()[t];
        for (int k = 1; k <= t; ++k) acc -= gh(k - 1) * den.F(k, d_.beta(k));
        st_.zeta_hat_norm[t] = acc.norm();
    }

    // beta_hat_{t+1} = v_{t+1} + sum_k gamma_hat_t^k F_k(v_k)
    Eigen::VectorXd beta_hat_next = d_.v_next(t);
    for (int k = 1; k <= t; ++k) {
        const Eigen::VectorXd v_k = (k == 1) ? Eigen::VectorXd::Zero(d_.model().p)
                                             : Eigen::VectorXd(d_.v_next(k - 1));
        beta_hat_next += gh(k - 1) * den.F(k, v_k);
    }
    st_.beta_hat[t + 1] = beta_hat_next;

    // alpha_hat_t (uses F_{t+1} and the realized beta_{t+1})
    const double alpha_norm2 = d_.alpha_coeffs()[t].squaredNorm();
    if (alpha_norm2 < 1e-20) throw numeric_failure("hat: ||alpha_t||^2 degenerate", t);
    Eigen::VectorXd ah(t);
    {
        const Eigen::VectorXd& beta_next = d_.beta(t + 1);
        Eigen::VectorXd Fp_hat = den.F_deriv(t + 1, beta_hat_next);
        Eigen::VectorXd Fp = den.F_deriv(t + 1, beta_next);
        Eigen::VectorXd Fdiff = den.F(t + 1, beta_next) - den.F(t + 1, beta_hat_next);
        ah(t - 1) =
            (Fp_hat.sum() - Fp.sum()) / n + d_.v_next(t).dot(Fdiff) / alpha_norm2;
        for (int k = 1; k < t; ++k) {
            const Eigen::VectorXd Fp_k = den.F_deriv(k + 1, d_.v_next(k));
            ah(k - 1) = gh(k) * Fp_hat.dot(Fp_k) / n;
        }
    }
    st_.alpha_hat[t] = ah;

    // xi_hat_{t+1} = xi_{t+1} - sum_k alpha_hat_t^k G_k(s_k)
    {
        Eigen::VectorXd acc = d_.xi()[t + 1];
        for (int k = 1; k <= t; ++k) acc -= ah(k - 1) * den.G(k, d_.s(k));
        st_.xi_hat_norm[t + 1] = acc.norm();
    }

    // s_hat_{t+1} = u_{t+1} + sum_k alpha_hat_t^k G_k(u_k)
    Eigen::VectorXd s_hat_next = d_.u(t + 1);
    for (int k = 1; k <= t; ++k) s_hat_next += ah(k - 1) * den.G(k, d_.u(k));
    st_.s_hat[t + 1] = s_hat_next;

    t_ = t;
}

void HatSequences::run(int t_stop) {
    while (t_ < t_stop && t_ + 2 <= d_.steps_done()) step();
}

}  // namespace amplab
