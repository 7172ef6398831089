#include "amplab/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "amplab/errors.hpp"
#include "amplab/gauss.hpp"

namespace amplab {

double soft_threshold(double x, double tau) {
    if (tau < 0.0) throw invalid_parameter("soft_threshold: tau < 0");
    double a = std::fabs(x) - tau;
    return a > 0.0 ? (x > 0.0 ? a : -a) : 0.0;
}

double soft_threshold_deriv(double x, double tau) {
    if (tau < 0.0) throw invalid_parameter("soft_threshold: tau < 0");
    return std::fabs(x) > tau ? 1.0 : 0.0;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double tau) {
    if (tau < 0.0) throw invalid_parameter("soft_threshold: tau < 0");
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = soft_threshold(x(i), tau);
    return out;
}

double soft_threshold_deriv_mean(const Eigen::VectorXd& x, double tau, int n) {
    if (tau < 0.0) throw invalid_parameter("soft_threshold: tau < 0");
    Eigen::Index cnt = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::fabs(x(i)) > tau) ++cnt;
    return static_cast<double>(cnt) / static_cast<double>(n);
}

double huber_psi(double z, double lambda) {
    if (!(lambda > 0.0)) throw invalid_parameter("huber_psi: lambda <= 0");
    return std::min(std::max(z, -lambda), lambda);
}

double huber_Psi(double z, double b, double lambda) {
    if (!(b > 0.0)) throw invalid_parameter("huber_Psi: b <= 0");
    return b * huber_psi(z / (1.0 + b), lambda);
}

double huber_Psi_deriv(double z, double b, double lambda) {
    if (!(b > 0.0)) throw invalid_parameter("huber_Psi: b <= 0");
    if (!(lambda > 0.0)) throw invalid_parameter("huber_Psi: lambda <= 0");
    return std::fabs(z) < lambda * (1.0 + b) ? b / (1.0 + b) : 0.0;
}

namespace {

// Per-coordinate closed form of E[(m - ST_tau(m + s Z))^2], Z ~ N(0,1),
// depending on |m| only.  With a = (tau - m)/s and a' = (tau + m)/s:
//   (tau^2 + s^2)(Q(a) + Q(a')) - 2 tau s (pdf(a) + pdf(a'))
//   + s^2 (a pdf(a) + a' pdf(a')) + m^2 (Phi(a) + Phi(a') - 1).
double st_risk_coord(double m, double s, double tau) {
    const double a = (tau - m) / s;
    const double ap = (tau + m) / s;
    const double qa = norm_sf(a), qap = norm_sf(ap);
    const double pa = norm_pdf(a), pap = norm_pdf(ap);
    return (tau * tau + s * s) * (qa + qap) - 2.0 * tau * s * (pa + pap) +
           s * s * (a * pa + ap * pap) + m * m * (1.0 - qa - qap);
}

// 2 [ tau (Q(a) + Q(a')) - s (pdf(a) + pdf(a')) ], the tau-derivative of
// st_risk_coord.
double st_risk_grad_coord(double m, double s, double tau) {
    const double a = (tau - m) / s;
    const double ap = (tau + m) / s;
    return 2.0 * (tau * (norm_sf(a) + norm_sf(ap)) - s * (norm_pdf(a) + norm_pdf(ap)));
}

// Group coordinates by |value| so repeated magnitudes are evaluated once.
std::vector<std::pair<double, int>> magnitude_groups(const Eigen::VectorXd& v) {
    std::vector<double> mags(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::fabs(v(i));
    std::sort(mags.begin(), mags.end());
    std::vector<std::pair<double, int>> groups;
    for (double m : mags) {
        if (!groups.empty() && groups.back().first == m)
            ++groups.back().second;
        else
            groups.emplace_back(m, 1);
    }
    return groups;
}

}  // namespace

double st_risk(const Eigen::VectorXd& theta, double alpha, double tau, int n) {
    if (!(alpha > 0.0)) throw invalid_parameter("st_risk: alpha <= 0");
    if (tau < 0.0) throw invalid_parameter("st_risk: tau < 0");
    const double s = alpha / std::sqrt(static_cast<double>(n));
    double total = 0.0;
    for (const auto& [m, cnt] : magnitude_groups(theta))
        total += cnt * st_risk_coord(m, s, tau);
    return total;
}

double st_risk_grad_tau(const Eigen::VectorXd& theta, double alpha, double tau, int n) {
    if (!(alpha > 0.0)) throw invalid_parameter("st_risk_grad_tau: alpha <= 0");
    if (tau < 0.0) throw invalid_parameter("st_risk_grad_tau: tau < 0");
    const double s = alpha / std::sqrt(static_cast<double>(n));
    double total = 0.0;
    for (const auto& [m, cnt] : magnitude_groups(theta))
        total += cnt * st_risk_grad_coord(m, s, tau);
    return total;
}

double st_mean_abs(double omega) {
    if (omega < 0.0) throw invalid_parameter("st_mean_abs: omega < 0");
    return gauss_tail_abs_mean(omega);
}

namespace {

// E[min{(m + s Z)^2, c^2}] with Z ~ N(0,1); l = (-c - m)/s, u = (c - m)/s.
double clipped_square_coord(double m, double s, double c) {
    const double l = (-c - m) / s;
    const double u = (c - m) / s;
    const double Pl = norm_cdf(l), Qu = norm_sf(u);
    const double pl = norm_pdf(l), pu = norm_pdf(u);
    const double inside = 1.0 - Pl - Qu;
    const double eg = pl - pu;                       // E[Z 1(l<Z<u)]
    const double eg2 = inside + l * pl - u * pu;     // E[Z^2 1(l<Z<u)]
    return m * m * inside + 2.0 * m * s * eg + s * s * eg2 + c * c * (Pl + Qu);
}

}  // namespace

double huber_moment(const Eigen::VectorXd& eps, double gamma, double c) {
    if (!(gamma > 0.0)) throw invalid_parameter("huber_moment: gamma <= 0");
    if (!(c > 0.0)) throw invalid_parameter("huber_moment: c <= 0");
    const double s = gamma / std::sqrt(static_cast<double>(eps.size()));
    double total = 0.0;
    for (Eigen::Index i = 0; i < eps.size(); ++i)
        total += clipped_square_coord(eps(i), s, c);
    return total;
}

double huber_moment_gamma0(const Eigen::VectorXd& eps, double c) {
    if (!(c > 0.0)) throw invalid_parameter("huber_moment: c <= 0");
    double total = 0.0;
    for (Eigen::Index i = 0; i < eps.size(); ++i)
        total += std::min(eps(i) * eps(i), c * c);
    return total;
}

double huber_active_prob(double eps_i, double gamma, double c, int n) {
    if (!(gamma > 0.0)) throw invalid_parameter("huber_active_prob: gamma <= 0");
    if (!(c > 0.0)) throw invalid_parameter("huber_active_prob: c <= 0");
    const double s = gamma / std::sqrt(static_cast<double>(n));
    return norm_cdf((c - eps_i) / s) - norm_cdf((-c - eps_i) / s);
}

}  // namespace amplab
