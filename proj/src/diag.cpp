#include "amplab/diag.hpp"

#include <algorithm>
#include <cmath>

#include "amplab/denoise.hpp"
#include "amplab/errors.hpp"
#include "amplab/gauss.hpp"

namespace amplab {

double w1_gaussian_1d(const Eigen::VectorXd& sample, double sigma) {
    if (sample.size() < 2) throw invalid_parameter("w1_gaussian_1d: need m >= 2");
    if (!(sigma > 0.0)) throw invalid_parameter("w1_gaussian_1d: sigma <= 0");
    std::vector<double> x(sample.data(), sample.data() + sample.size());
    std::sort(x.begin(), x.end());
    const double m = static_cast<double>(x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += std::fabs(x[i] - sigma * norm_quantile((static_cast<double>(i) + 0.5) / m));
    return acc / m;
}

std::vector<double> risk_gap(const AmpTrace& trace, const SeTrace& se) {
    const int T = trace.t_max();
    const int se_T = static_cast<int>(se.gamma_star.size()) - 1;
    std::vector<double> gaps(T + 1, 0.0);
    for (int t = 1; t <= T; ++t)
        gaps[t] = trace.F_norm[t] - se.gamma_star[std::min(t, se_T)];
    return gaps;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw invalid_parameter("scaling_fit: need >= 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto [n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0))
            throw invalid_parameter("scaling_fit: non-positive data");
        double x = std::log(n), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double m = static_cast<double>(points.size());
    const double denom = m * sxx - sx * sx;
    ScalingFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    const double ss_tot = syy - sy * sy / m;
    const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / m);
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 15;
constexpr double kNodes[kGL] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[kGL] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

double gl_panel(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < kGL; ++i) acc += kWeights[i] * f(c + h * kNodes[i]);
    return acc * h;
}

double integrate_rec(const std::function<double(double)>& f, double lo, double hi,
                     double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = gl_panel(f, lo, mid), right = gl_panel(f, mid, hi);
    if (std::fabs(left + right - whole) <= tol || depth <= 0) return left + right;
    return integrate_rec(f, lo, mid, left, 0.5 * tol, depth - 1) +
           integrate_rec(f, mid, hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, int max_depth) {
    double whole = gl_panel(f, lo, hi);
    double out = integrate_rec(f, lo, hi, whole, abs_tol, max_depth);
    if (!std::isfinite(out)) throw numeric_failure("integrate: non-finite result");
    return out;
}

double gauss_expect(const std::function<double(double)>& f, double abs_tol) {
    return integrate([&](double x) { return f(x) * norm_pdf(x); }, -12.0, 12.0, abs_tol);
}

double lasso_h_cross(double theta, double omega) {
    const double a = omega - theta, ap = omega + theta;
    return norm_sf(a) + norm_sf(ap) - theta * (norm_pdf(a) - norm_pdf(ap));
}

double lasso_h_grad(double theta, double omega) {
    const double a = omega - theta, ap = omega + theta;
    return omega * (norm_sf(a) + norm_sf(ap)) - (norm_pdf(a) + norm_pdf(ap));
}

double st_gg(double omega) { return 2.0 * norm_sf(omega); }

namespace {

// Shared sup machinery for the two Figure-1 curves.  `numerator` maps the
// grad term B and theta to the fraction's numerator; the denominator is
// 2 log(1 + B / E[ST_w(|G|)]) with the sup restricted to theta for which
// the implied p/k ratio 1 + B/E[ST_w(|G|)] clears ratio_min.
HPoint lasso_sup(double omega, const LassoHOptions& opts,
                 const std::function<double(double, double)>& numerator) {
    if (!(omega > 0.0)) throw invalid_parameter("lasso H: omega <= 0");
    const double est = st_mean_abs(omega);
    HPoint out;
    double best = 0.0;
    auto consider = [&](double theta, double B, double num) {
        const double ratio = 1.0 + B / est;
        if (ratio < opts.ratio_min) return;
        const double val = std::fabs(num) / (2.0 * std::log(ratio));
        if (!out.feasible || val > best) {
            best = val;
            out.argsup = theta;
            out.feasible = true;
        }
    };
    const int steps = static_cast<int>(opts.theta_max / opts.theta_step + 0.5);
    for (int i = 0; i <= steps; ++i) {
        const double theta = i * opts.theta_step;
        consider(theta, lasso_h_grad(theta, omega), numerator(theta, omega));
    }
    // theta -> infinity: B -> omega, cross term -> 1, tail prob terms -> their limits.
    consider(std::numeric_limits<double>::infinity(), omega,
             numerator(std::numeric_limits<double>::infinity(), omega));
    out.value = out.feasible ? 1.0 - best : 1.0;
    return out;
}

}  // namespace

HPoint lasso_h2(double omega, const LassoHOptions& opts) {
    const double est = st_mean_abs(omega);
    const double cgg = st_gg(omega);
    return lasso_sup(omega, opts, [&](double theta, double w) {
        const double cross = std::isinf(theta) ? 1.0 : lasso_h_cross(theta, w);
        const double B = std::isinf(theta) ? w : lasso_h_grad(theta, w);
        return cross + (cgg / est) * B;
    });
}

HPoint lasso_h1(double omega, const LassoHOptions& opts) {
    const double est = st_mean_abs(omega);
    const double p2 = 2.0 * norm_sf(omega);
    return lasso_sup(omega, opts, [&](double theta, double w) {
        const double B = std::isinf(theta) ? w : lasso_h_grad(theta, w);
        return 1.0 + (p2 / est) * B;
    });
}

double robust_h1(double tau) {
    if (!(tau > 0.0)) throw invalid_parameter("robust_h1: tau <= 0");
    const double p_out = 2.0 * norm_sf(tau);
    const double p_in = 1.0 - p_out;
    return (1.0 - gauss_clipped_second_moment(tau) / p_in) / p_out;
}

namespace {

// E[G (eps+G) 1(|eps+G| < tau)] and E[min{(eps+G)^2, tau^2}] in closed form.
void robust_h2_terms(double eps, double tau, double* num, double* denom) {
    const double l = -tau - eps, u = tau - eps;
    const double Pl = norm_cdf(l), Pu = norm_cdf(u);
    const double pl = norm_pdf(l), pu = norm_pdf(u);
    const double inside = Pu - Pl;
    const double eg = pl - pu;                      // E[G 1(l<G<u)]
    const double eg2 = inside + l * pl - u * pu;    // E[G^2 1(l<G<u)]
    *num = eg2 + eps * eg;
    *denom = eps * eps * inside + 2.0 * eps * eg + eg2 + tau * tau * (1.0 - inside);
}

}  // namespace

HPoint robust_h2(double tau, const RobustH2Options& opts) {
    if (!(tau > 0.0)) throw invalid_parameter("robust_h2: tau <= 0");
    HPoint out;
    double best = -1.0;
    const double hi = tau + opts.eps_pad;
    const long steps = std::lround((hi - opts.eps_min) / opts.eps_step);
    for (long i = 0; i <= steps; ++i) {
        const double eps = opts.eps_min + static_cast<double>(i) * opts.eps_step;
        double num, denom;
        robust_h2_terms(eps, tau, &num, &denom);
        if (!(denom > 0.0)) continue;
        const double val = std::fabs(num) / denom;
        if (val > best) {
            best = val;
            out.argsup = eps;
        }
    }
    // Beyond the grid the window (-tau-eps, tau-eps) sits deep in the left
    // tail: |num| <= (1 + eps^2 + tau^2) pdf(eps - tau) while denom -> tau^2,
    // so the sup cannot move past tau + 10 for any tau handled here.
    out.feasible = best >= 0.0;
    out.value = 1.0 - std::max(best, 0.0);
    return out;
}

HCurve hcurve(const std::string& family, double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo)) throw invalid_parameter("hcurve: bad grid");
    HCurve c;
    c.family = family;
    const long steps = std::lround((hi - lo) / step);
    for (long i = 0; i <= steps; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        if (x <= 0.0) continue;
        HPoint pt;
        if (family == "lasso-H1")
            pt = lasso_h1(x);
        else if (family == "lasso-H2")
            pt = lasso_h2(x);
        else if (family == "robust-H1") {
            pt.value = robust_h1(x);
            pt.feasible = true;
        } else if (family == "robust-H2")
            pt = robust_h2(x);
        else
            throw invalid_parameter("hcurve: unknown family " + family);
        c.grid.push_back(x);
        c.values.push_back(pt.value);
        c.argsup.push_back(pt.argsup);
    }
    return c;
}

}  // namespace amplab
