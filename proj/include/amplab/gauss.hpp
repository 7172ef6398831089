#pragma once

namespace amplab {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF via Cody's rational approximation of erfc
// (W. J. Cody, Math. Comp. 23 (1969), 631-637).  Absolute error below
// 1e-15 on the real line; implemented without libm's erf/erfc so results
// are identical across platforms.
double norm_cdf(double x);

// Upper tail P(Z > x).
double norm_sf(double x);

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16).
// Relative error about 1e-15 for u in (0, 1).
double norm_quantile(double u);

// E[Z 1(Z > a)] = pdf(a), E[Z^2 1(Z > a)] = sf(a) + a pdf(a), and the
// truncated moments built from them are assembled where needed; only the
// two tail helpers used in several modules are exported here.

// E[|G| 1(|G| >= w)] = sqrt(2/pi) exp(-w^2/2) for G ~ N(0,1), w >= 0.
double gauss_tail_abs_mean(double w);

// E[(|G| - w)_+] = 2 (pdf(w) - w sf(w)) for G ~ N(0,1), w >= 0.
double gauss_excess_mean(double w);

// E[min{G^2, t^2}] for G ~ N(0,1), t >= 0.
double gauss_clipped_second_moment(double t);

}  // namespace amplab
