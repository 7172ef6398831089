#include "amplab/se.hpp"

#include <cmath>

#include "amplab/denoise.hpp"
#include "amplab/errors.hpp"
#include "amplab/optim.hpp"

namespace amplab {

SeStepSparse se_step_sparse(const Eigen::VectorXd& theta_star, double eps_norm2,
                            double gamma_t, int n) {
    if (gamma_t < 0.0) throw invalid_parameter("se_step_sparse: gamma_t < 0");
    const double alpha_t = std::sqrt(gamma_t * gamma_t + eps_norm2);
    const double cap =
        theta_star.lpNorm<Eigen::Infinity>() + 20.0 * alpha_t / std::sqrt(double(n));
    MinimizeResult res = minimize_scalar(
        [&](double tau) { return st_risk(theta_star, alpha_t, tau, n); }, 0.0, cap);
    if (!std::isfinite(res.value)) throw numeric_failure("se_step_sparse: non-finite risk");
    return {alpha_t, res.x, std::sqrt(res.value)};
}

SeStepRobust se_step_robust(const Eigen::VectorXd& eps, double lambda, int n, int p,
                            double gamma_t) {
    if (!(gamma_t > 0.0)) throw invalid_parameter("se_step_robust: gamma_t <= 0");
    if (!(p < n)) throw invalid_parameter("se_step_robust: requires p < n");
    auto cal = [&](double b) {
        double acc = 0.0;
        const double c = lambda * (1.0 + b);
        for (Eigen::Index i = 0; i < eps.size(); ++i)
            acc += huber_active_prob(eps(i), gamma_t, c, n);
        return (b / (1.0 + b)) * acc / p - 1.0;
    };
    double lo = 0.0, hi = 1.0;
    while (cal(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
            throw calibration_failure("se_step_robust: bracket exhausted", lo, hi);
    }
    RootOptions ro;
    ro.tol = 1e-10;
    RootResult root = bisect_increasing(cal, lo, hi, ro);
    const double b = root.x;
    const double c = lambda * (1.0 + b);
    const double front = (static_cast<double>(n) * b) / (p * (1.0 + b));
    const double alpha2 = front * front * huber_moment(eps, gamma_t, c);
    const double alpha_t = std::sqrt(alpha2);
    const double gamma_next = std::sqrt(static_cast<double>(p) / n) * alpha_t;
    return {b, alpha_t, gamma_next, std::fabs(root.residual)};
}

SeTrace run_se(const LinearModel& model, AmpMode mode, const SeOptions& opts) {
    if (!(opts.fixed_point_tol > 0.0)) throw invalid_parameter("run_se: tol <= 0");
    SeTrace tr;
    tr.mode = mode;
    const double lambda =
        opts.lambda > 0.0 ? opts.lambda : 1.0 / std::sqrt(double(model.n));
    const double eps_norm2 = model.noise.squaredNorm();

    tr.alpha_star.assign(opts.t_max + 1, 0.0);
    tr.gamma_star.assign(opts.t_max + 1, 0.0);
    tr.inner_param.assign(opts.t_max + 1, 0.0);

    double gamma = model.signal.norm();
    std::vector<double> gamma2_delta;
    int t_used = opts.t_max;
    bool converged = false;
    for (int t = 1; t <= opts.t_max; ++t) {
        tr.gamma_star[t] = gamma;
        double gamma_next;
        if (mode == AmpMode::sparse) {
            SeStepSparse step = se_step_sparse(model.signal, eps_norm2, gamma, model.n);
            tr.alpha_star[t] = step.alpha_t;
            tr.inner_param[t] = step.tau_star;
            gamma_next = step.gamma_next;
        } else {
            SeStepRobust step = se_step_robust(model.noise, lambda, model.n, model.p, gamma);
            tr.alpha_star[t] = step.alpha_t;
            tr.inner_param[t] = step.b_star;
            gamma_next = step.gamma_next;
        }
        gamma2_delta.push_back(std::fabs(gamma_next * gamma_next - gamma * gamma));
        if (std::fabs(gamma_next - gamma) < opts.fixed_point_tol) {
            gamma = gamma_next;
            t_used = t;
            converged = true;
            break;
        }
        gamma = gamma_next;
    }

    tr.fixed_point.gamma = gamma;
    tr.fixed_point.alpha = tr.alpha_star[t_used];
    tr.fixed_point.iterations = t_used;
    tr.fixed_point.converged = converged;
    // Ratios are meaningful while the increments sit clearly above the
    // stopping tolerance; below that the inner solvers' argument noise
    // dominates the deltas.
    const double floor = 20.0 * opts.fixed_point_tol * std::max(gamma, 1e-6);
    for (std::size_t i = 1; i < gamma2_delta.size(); ++i) {
        if (gamma2_delta[i - 1] > floor && gamma2_delta[i] > 0.0)
            tr.fixed_point.contraction_ratios.push_back(gamma2_delta[i] /
                                                        gamma2_delta[i - 1]);
    }
    // Trim the unused tail when the run converged early.
    tr.alpha_star.resize(t_used + 1);
    tr.gamma_star.resize(t_used + 1);
    tr.inner_param.resize(t_used + 1);
    return tr;
}

EmpiricalSe empirical_se(const AmpTrace& trace, const SeTrace& se) {
    EmpiricalSe out;
    const int T = trace.t_max();
    out.gamma_emp.assign(T + 1, 0.0);
    out.alpha_emp.assign(T + 1, 0.0);
    out.gamma_gap2.assign(T + 1, 0.0);
    out.alpha_gap2.assign(T + 1, 0.0);
    const int se_T = static_cast<int>(se.gamma_star.size()) - 1;
    for (int t = 1; t <= T; ++t) {
        out.gamma_emp[t] = trace.F_norm[t];
        out.alpha_emp[t] = trace.G_norm[t];
        // Once the SE has converged, later gaps compare against the fixed point.
        const double gs = se.gamma_star[std::min(t, se_T)];
        const double as = se.alpha_star[std::min(t, se_T)];
        out.gamma_gap2[t] = std::fabs(out.gamma_emp[t] * out.gamma_emp[t] - gs * gs);
        out.alpha_gap2[t] = std::fabs(out.alpha_emp[t] * out.alpha_emp[t] - as * as);
    }
    return out;
}

}  // namespace amplab
