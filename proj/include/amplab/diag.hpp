#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "amplab/amp.hpp"
#include "amplab/se.hpp"

namespace amplab {

// W1 distance between the empirical law of `sample` and N(0, sigma^2):
// average over the sorted sample of |x_(i) - sigma Phi^{-1}((i - 1/2)/m)|.
double w1_gaussian_1d(const Eigen::VectorXd& sample, double sigma);

// Per-t ||F_t(beta_t)|| - gamma*_t (zero at t = 1 in both modes).
std::vector<double> risk_gap(const AmpTrace& trace, const SeTrace& se);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares of log(value) on log(n).
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

// Adaptive Gauss-Legendre quadrature (15-point panels, recursive
// bisection) used as the independent evaluation route for the Gaussian
// expectations below.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-8, int max_depth = 30);

// E[f(G)] for G ~ N(0,1) over the truncated domain [-12, 12].
double gauss_expect(const std::function<double(double)>& f, double abs_tol = 1e-8);

// Inner Gaussian expectations of the sparse-model H functions (closed form):
//   h_cross(theta, w) = E[(ST_w(theta+G) - theta 1(|theta+G|>w)) G]
//   h_grad(theta, w)  = E[(w - G sign(theta+G)) 1(|theta+G|>w)]
//   st_gg(w)          = E[ST_w(G) G] = P(|G| > w)
double lasso_h_cross(double theta, double omega);
double lasso_h_grad(double theta, double omega);
double st_gg(double omega);

struct HPoint {
    double value = 0.0;
    double argsup = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;  // some theta/eps satisfied the domain restriction
};

struct LassoHOptions {
    double ratio_min = 2.3;   // sup restricted to 1 + h_grad/E[ST_w(|G|)] >= p/k
    double theta_max = 20.0;
    double theta_step = 0.01;
};

// Figure-1 curves.  The sup over theta runs on a fixed grid plus the
// theta -> infinity analytic limit, restricted to theta compatible with
// p/k >= ratio_min; when no theta qualifies the bound holds vacuously and
// the value is 1.
HPoint lasso_h1(double omega, const LassoHOptions& opts = {});
HPoint lasso_h2(double omega, const LassoHOptions& opts = {});

// Robust-model curves of Figure 2.
//   robust_h1(tau) = (1/P(|G|>tau)) (1 - E[min{G^2,tau^2}]/P(|G|<tau))
double robust_h1(double tau);

struct RobustH2Options {
    double eps_step = 0.005;
    double eps_pad = 10.0;     // grid upper end is tau + pad
    double eps_min = 0.0;      // restrict the sup to eps >= eps_min
};

// robust_h2 = 1 - sup_eps |E[G(eps+G)1(|eps+G|<tau)]| / E[(eps+G)^2 ^ tau^2];
// closed forms per eps, sup on the grid [eps_min, tau + pad].
HPoint robust_h2(double tau, const RobustH2Options& opts = {});

struct HCurve {
    std::string family;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> argsup;
};

HCurve hcurve(const std::string& family, double lo, double hi, double step);

}  // namespace amplab
