#include "amplab/amp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "amplab/denoise.hpp"
#include "amplab/errors.hpp"
#include "amplab/optim.hpp"

namespace amplab {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

// On each interval between consecutive magnitudes of theta_t the active set
// S(tau) is fixed, so the residual y - X ST_tau(theta) + (|S|/n) r_prev is
// affine in tau and the squared objective is an exact quadratic.  Scanning
// the segments from tau = 0 upward and minimizing each quadratic in closed
// form yields the global minimizer of this piecewise-quadratic,
// jump-discontinuous objective (a fixed evaluation grid can miss it), with
// ties resolving to the smallest tau.  Total cost is O(np).
double select_tau(const LinearModel& model, const Eigen::VectorXd& theta_t,
                  const Eigen::VectorXd& r_prev) {
    const double hi = theta_t.lpNorm<Eigen::Infinity>();
    if (hi == 0.0) return 0.0;  // constant objective; smallest tau wins
    const int n = model.n;
    const Eigen::Index p = theta_t.size();

    std::vector<Eigen::Index> asc;  // nonzero coordinates, |theta| ascending
    asc.reserve(p);
    for (Eigen::Index i = 0; i < p; ++i)
        if (theta_t(i) != 0.0) asc.push_back(i);
    std::sort(asc.begin(), asc.end(), [&](Eigen::Index a, Eigen::Index b) {
        double ma = std::fabs(theta_t(a)), mb = std::fabs(theta_t(b));
        if (ma != mb) return ma < mb;
        return a < b;
    });

    // Active sums over the current set; full at tau = 0, peeled as tau grows.
    Eigen::VectorXd A = Eigen::VectorXd::Zero(n);  // X_S theta_S
    Eigen::VectorXd B = Eigen::VectorXd::Zero(n);  // X_S sign(theta_S)
    for (Eigen::Index i : asc) {
        A += model.design.col(i) * theta_t(i);
        B += model.design.col(i) * (theta_t(i) > 0.0 ? 1.0 : -1.0);
    }

    double best_val = std::numeric_limits<double>::infinity();
    double best_tau = 0.0;
    std::size_t peeled = 0;
    double seg_lo = 0.0;
    while (true) {
        // The closing all-inactive segment is widened a hair so its
        // candidate sits strictly above the largest magnitude (same knife
        // edge as below).
        const double seg_hi = (peeled < asc.size()) ? std::fabs(theta_t(asc[peeled]))
                                                    : hi * (1.0 + 0x1.0p-39);
        if (seg_hi > seg_lo || peeled == asc.size()) {
            const std::size_t active = asc.size() - peeled;
            const double c = static_cast<double>(active) / n;
            const Eigen::VectorXd C = model.observations - A + c * r_prev;
            const double cc = C.squaredNorm();
            const double cb = C.dot(B);
            const double bb = B.squaredNorm();
            // Candidates: the left end and the interior quadratic minimum.
            // Clamped candidates are nudged strictly inside the segment:
            // tau exactly equal to a magnitude |theta_i| would leave the
            // strict-inequality active set on a knife edge, where a one-ulp
            // difference in theta (e.g. between the direct and error-form
            // engines) flips a coordinate.  The nudge changes the objective
            // by O(1e-13), far below the optimality tolerance.
            const double left =
                seg_lo == 0.0
                    ? 0.0
                    : std::min(seg_lo * (1.0 + 0x1.0p-40), 0.5 * (seg_lo + seg_hi));
            double cand[2] = {left, left};
            if (bb > 0.0) {
                double interior = -cb / bb;
                double right = seg_hi - 1e-13 * std::max(1.0, seg_hi);
                cand[1] = std::min(std::max(interior, left), std::max(right, left));
            }
            for (double tau : cand) {
                double sq = cc + 2.0 * tau * cb + tau * tau * bb;
                double val = std::sqrt(std::max(sq, 0.0));
                if (!std::isfinite(val))
                    throw numeric_failure("select_tau: non-finite objective");
                if (val < best_val) {
                    best_val = val;
                    best_tau = tau;
                }
            }
        }
        if (peeled == asc.size()) break;
        // Peel every coordinate at this magnitude (ties leave empty segments).
        const double m = std::fabs(theta_t(asc[peeled]));
        while (peeled < asc.size() && std::fabs(theta_t(asc[peeled])) == m) {
            Eigen::Index i = asc[peeled];
            A -= model.design.col(i) * theta_t(i);
            B -= model.design.col(i) * (theta_t(i) > 0.0 ? 1.0 : -1.0);
            ++peeled;
        }
        seg_lo = m;
    }
    return best_tau;
}

SelectB select_b(const Eigen::VectorXd& r, double lambda, int n, int p, double tol) {
    if (!(p < n)) throw invalid_parameter("select_b: requires p < n");
    if (!(lambda > 0.0)) throw invalid_parameter("select_b: lambda <= 0");
    std::vector<double> ab(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) ab[i] = std::fabs(r(i));
    std::sort(ab.begin(), ab.end());
    auto count_below = [&](double c) {
        return static_cast<double>(std::lower_bound(ab.begin(), ab.end(), c) - ab.begin());
    };
    auto h = [&](double b) {
        return (b / (1.0 + b)) * count_below(lambda * (1.0 + b)) / p - 1.0;
    };
    double lo = 0.0, hi = 1.0;
    while (h(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
            throw calibration_failure("select_b: bracket expansion exhausted", lo, hi);
    }
    RootOptions ro;
    ro.tol = tol;
    RootResult root = bisect_increasing(h, lo, hi, ro);
    SelectB out;
    out.b = root.x;
    out.residual = std::fabs(root.residual);
    out.bracket = 1.0 + root.residual;
    out.jump = !root.converged;
    return out;
}

namespace {

Eigen::VectorXd huber_g(const Eigen::VectorXd& r, double b, double lambda, int n, int p) {
    const double ratio = static_cast<double>(n) / p;
    Eigen::VectorXd out(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i)
        out(i) = ratio * b * huber_psi(r(i) / (1.0 + b), lambda);
    return out;
}

}  // namespace

AmpTrace run_amp(const LinearModel& model, AmpMode mode, const RunOptions& opts) {
    const int n = model.n, p = model.p;
    if (opts.t_max < 1) throw invalid_parameter("run_amp: t_max must be >= 1");
    if (mode == AmpMode::robust && !(p < n))
        throw invalid_parameter("run_amp: robust mode requires p < n");

    AmpTrace trace;
    trace.mode = mode;
    trace.lambda = (mode == AmpMode::robust)
                       ? (opts.lambda > 0.0 ? opts.lambda : 1.0 / std::sqrt(double(n)))
                       : 0.0;

    trace.states.resize(opts.t_max + 1);
    trace.states[0].t = 0;
    trace.states[0].theta = Eigen::VectorXd::Zero(p);
    trace.states[0].r = Eigen::VectorXd::Zero(n);
    trace.beta_norm.assign(opts.t_max + 2, 0.0);
    trace.F_norm.assign(opts.t_max + 1, 0.0);
    trace.G_norm.assign(opts.t_max + 1, 0.0);

    Eigen::VectorXd theta_t = trace.states[0].theta;
    Eigen::VectorXd r_prev = trace.states[0].r;
    Eigen::VectorXd g_prev;        // robust: g_{t-1}(r_{t-1})
    double scale_prev = 1.0;       // robust: 1/<g'_{t-1}(r_{t-1})>

    for (int t = 1; t <= opts.t_max; ++t) {
        AmpState st;
        st.t = t;
        trace.beta_norm[t] = (theta_t - model.signal).norm();

        if (mode == AmpMode::sparse) {
            Eigen::VectorXd est;
            double onsager = 0.0;
            if (t == 1) {
                st.param = 0.0;  // f_1 == 0
                est = Eigen::VectorXd::Zero(p);
                st.r = model.observations;
            } else {
                st.param = select_tau(model, theta_t, r_prev);
                est = soft_threshold(theta_t, st.param);
                onsager = soft_threshold_deriv_mean(theta_t, st.param, n);
                st.r = model.observations - model.design * est + onsager * r_prev;
            }
            st.onsager = onsager;
            st.g_bracket = 1.0;
            st.theta = model.design.transpose() * st.r + est;
            trace.F_norm[t] = (model.signal - est).norm();
            trace.G_norm[t] = st.r.norm();
        } else {
            if (t == 1) {
                st.r = model.observations;
            } else {
                st.r = model.observations - model.design * theta_t +
                       (static_cast<double>(p) / n) * scale_prev * g_prev;
                st.onsager = (static_cast<double>(p) / n) * scale_prev;
            }
            SelectB cal = select_b(st.r, trace.lambda, n, p);
            st.param = cal.b;
            st.g_bracket = cal.bracket;
            st.jump_flag = cal.jump;
            Eigen::VectorXd gt = huber_g(st.r, cal.b, trace.lambda, n, p);
            const double scale = 1.0 / cal.bracket;
            st.theta = scale * (model.design.transpose() * gt) + theta_t;
            trace.F_norm[t] = trace.beta_norm[t];
            trace.G_norm[t] = scale * gt.norm();
            g_prev = std::move(gt);
            scale_prev = scale;
        }

        if (!all_finite(st.r) || !all_finite(st.theta))
            throw numeric_failure("run_amp: non-finite iterate", t);

        theta_t = st.theta;
        r_prev = st.r;
        trace.states[t] = std::move(st);
        if (!opts.keep_history && t >= 3) {
            trace.states[t - 2].theta.resize(0);
            trace.states[t - 2].r.resize(0);
        }
    }
    trace.beta_norm[opts.t_max + 1] = (theta_t - model.signal).norm();
    return trace;
}

DenoiserSequence::DenoiserSequence(const LinearModel& model, const AmpTrace& trace)
    : mode_(trace.mode), n_(model.n), p_(model.p), lambda_(trace.lambda),
      theta_star_(model.signal), eps_(model.noise) {
    param_.resize(trace.states.size());
    scale_.resize(trace.states.size(), 1.0);
    for (std::size_t t = 1; t < trace.states.size(); ++t) {
        param_[t] = trace.states[t].param;
        scale_[t] = 1.0 / trace.states[t].g_bracket;
    }
}

Eigen::VectorXd DenoiserSequence::F(int t, const Eigen::VectorXd& beta) const {
    if (t == 1) return theta_star_;
    if (mode_ == AmpMode::sparse)
        return theta_star_ - soft_threshold(theta_star_ + beta, param_[t]);
    return -beta;
}

Eigen::VectorXd DenoiserSequence::G(int t, const Eigen::VectorXd& s) const {
    if (t == 0) return Eigen::VectorXd::Zero(n_);
    if (mode_ == AmpMode::sparse) return s + eps_;
    Eigen::VectorXd out(n_);
    const double b = param_[t];
    const double c = scale_[t] * (static_cast<double>(n_) / p_) * b;
    for (int i = 0; i < n_; ++i)
        out(i) = c * huber_psi((s(i) + eps_(i)) / (1.0 + b), lambda_);
    return out;
}

Eigen::VectorXd DenoiserSequence::F_deriv(int t, const Eigen::VectorXd& beta) const {
    if (t == 1) return Eigen::VectorXd::Zero(p_);
    if (mode_ == AmpMode::sparse) {
        Eigen::VectorXd out(p_);
        for (int i = 0; i < p_; ++i)
            out(i) = -soft_threshold_deriv(theta_star_(i) + beta(i), param_[t]);
        return out;
    }
    return Eigen::VectorXd::Constant(p_, -1.0);
}

Eigen::VectorXd DenoiserSequence::G_deriv(int t, const Eigen::VectorXd& s) const {
    if (t == 0) return Eigen::VectorXd::Zero(n_);
    if (mode_ == AmpMode::sparse) return Eigen::VectorXd::Ones(n_);
    const double b = param_[t];
    const double thresh = lambda_ * (1.0 + b);
    const double c = scale_[t] * (static_cast<double>(n_) / p_) * (b / (1.0 + b));
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i)
        out(i) = std::fabs(s(i) + eps_(i)) < thresh ? c : 0.0;
    return out;
}

double DenoiserSequence::F_deriv_mean(int t, const Eigen::VectorXd& beta) const {
    return F_deriv(t, beta).sum() / n_;
}

double DenoiserSequence::G_deriv_mean(int t, const Eigen::VectorXd& s) const {
    return G_deriv(t, s).sum() / n_;
}

ErrorFormTrace run_error_form(const LinearModel& model, AmpMode mode,
                              const RunOptions& opts,
                              const std::vector<double>* given_params) {
    const int n = model.n, p = model.p;
    if (opts.t_max < 1) throw invalid_parameter("run_error_form: t_max must be >= 1");
    ErrorFormTrace tr;
    tr.mode = mode;
    tr.lambda = (mode == AmpMode::robust)
                    ? (opts.lambda > 0.0 ? opts.lambda : 1.0 / std::sqrt(double(n)))
                    : 0.0;
    tr.s.resize(opts.t_max + 1);
    tr.beta.resize(opts.t_max + 2);
    tr.param.assign(opts.t_max + 1, 0.0);
    tr.g_bracket.assign(opts.t_max + 1, 1.0);

    tr.beta[1] = -model.signal;  // theta_1 = 0
    Eigen::VectorXd G_prev = Eigen::VectorXd::Zero(n);

    for (int t = 1; t <= opts.t_max; ++t) {
        Eigen::VectorXd Ft;  // F_t(beta_t)
        double F_mean;
        double tau = 0.0;
        if (mode == AmpMode::sparse) {
            if (t == 1) {
                Ft = model.signal;
                F_mean = 0.0;
            } else {
                // Calibrate on the translated iterates unless given.
                Eigen::VectorXd theta_t = tr.beta[t] + model.signal;
                Eigen::VectorXd r_prev = tr.s[t - 1] + model.noise;
                tau = given_params ? (*given_params)[t] : select_tau(model, theta_t, r_prev);
                Ft = model.signal - soft_threshold(theta_t, tau);
                F_mean = -soft_threshold_deriv_mean(theta_t, tau, n);
            }
            tr.param[t] = tau;
        } else {
            Ft = (t == 1) ? Eigen::VectorXd(model.signal) : Eigen::VectorXd(-tr.beta[t]);
            F_mean = (t == 1) ? 0.0 : -static_cast<double>(p) / n;
        }

        tr.s[t] = model.design * Ft - F_mean * G_prev;

        Eigen::VectorXd Gt;
        double G_mean;
        if (mode == AmpMode::sparse) {
            Gt = tr.s[t] + model.noise;
            G_mean = 1.0;
        } else {
            Eigen::VectorXd rt = tr.s[t] + model.noise;
            double b;
            if (given_params) {
                b = (*given_params)[t];
            } else {
                b = select_b(rt, tr.lambda, n, p).b;
            }
            tr.param[t] = b;
            const double thresh = tr.lambda * (1.0 + b);
            Eigen::Index k = 0;
            for (Eigen::Index i = 0; i < rt.size(); ++i)
                if (std::fabs(rt(i)) < thresh) ++k;
            const double bracket =
                (b / (1.0 + b)) * static_cast<double>(k) / p;  // <g_t'(r_t)>
            tr.g_bracket[t] = bracket;
            Gt = huber_g(rt, b, tr.lambda, n, p) / bracket;
            G_mean = 1.0;  // by the pinned calibration constant
        }

        tr.beta[t + 1] = model.design.transpose() * Gt - G_mean * Ft;
        if (!all_finite(tr.s[t]) || !all_finite(tr.beta[t + 1]))
            throw numeric_failure("run_error_form: non-finite iterate", t);
        G_prev = std::move(Gt);
    }
    return tr;
}

}  // namespace amplab
