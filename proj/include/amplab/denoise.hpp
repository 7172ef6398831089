#pragma once

#include <Eigen/Dense>

namespace amplab {

// Soft threshold sign(x) (|x| - tau)_+ and its derivative.  The derivative
// convention at the kink |x| = tau is 0 (the active set uses a strict
// inequality), matching the Huber convention below.
double soft_threshold(double x, double tau);
double soft_threshold_deriv(double x, double tau);

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double tau);
// Mean of the derivative under the 1/n bracket normalization:
// (1/n) #{i : |x_i| > tau}.
double soft_threshold_deriv_mean(const Eigen::VectorXd& x, double tau, int n);

// Huber score psi(z; lambda) = clamp(z, [-lambda, lambda]), its regularized
// version Psi(z, b) = b psi(z/(1+b); lambda), and d Psi / d z.  The
// derivative is b/(1+b) on {|z| < lambda (1+b)} and 0 on the boundary.
double huber_psi(double z, double lambda);
double huber_Psi(double z, double b, double lambda);
double huber_Psi_deriv(double z, double b, double lambda);

// Exact value of E || theta - ST_tau(theta + alpha g) ||_2^2 for
// g ~ N(0, (1/n) I_p); every coordinate sees an independent N(0, alpha^2/n)
// perturbation.  Equal-magnitude coordinates are grouped before evaluating
// the closed form, so k-sparse +/-c signals cost two evaluations.
double st_risk(const Eigen::VectorXd& theta, double alpha, double tau, int n);

// d st_risk / d tau in closed form (on-support and off-support terms).
double st_risk_grad_tau(const Eigen::VectorXd& theta, double alpha, double tau, int n);

// E[ST_w(|G|)] = sqrt(2/pi) exp(-w^2/2), the direct Gaussian tail integral.
double st_mean_abs(double omega);

// Sum_i E[ min{ (eps_i + gamma g_i)^2, c^2 } ] with g_i ~ N(0, 1/n),
// n = eps.size(); equals E||psi(eps + gamma g; c)||_2^2.
double huber_moment(const Eigen::VectorXd& eps, double gamma, double c);
// Analytic gamma -> 0 limit: sum_i min{eps_i^2, c^2}.
double huber_moment_gamma0(const Eigen::VectorXd& eps, double c);

// P( |eps_i + gamma g_i| < c ) with g_i ~ N(0, 1/n).
double huber_active_prob(double eps_i, double gamma, double c, int n);

}  // namespace amplab
