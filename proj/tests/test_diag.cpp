#include <doctest.h>

#include <cmath>

#include "amplab/diag.hpp"
#include "amplab/errors.hpp"
#include "amplab/gauss.hpp"
#include "amplab/model.hpp"
#include "amplab/prng.hpp"

using namespace amplab;

TEST_CASE("w1: plug-in quantile configuration scores zero") {
    const int m = 257;
    const double sigma = 1.7;
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x(i) = sigma * norm_quantile((i + 0.5) / m);
    CHECK(w1_gaussian_1d(x, sigma) <= 1e-14);
    // constant shift moves W1 by exactly |c|
    Eigen::VectorXd shifted = x.array() + 0.31;
    CHECK(w1_gaussian_1d(shifted, sigma) == doctest::Approx(0.31).epsilon(1e-12));
}

TEST_CASE("w1: gaussian samples of size 1e4 score below 0.05 sigma") {
    int ok = 0;
    const int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
        CounterRng rng(500 + s, 33);
        Eigen::VectorXd x(10000);
        for (int i = 0; i < x.size(); ++i) x(i) = 0.8 * rng.next_gaussian();
        if (w1_gaussian_1d(x, 0.8) <= 0.05 * 0.8) ++ok;
    }
    CHECK(ok >= static_cast<int>(0.95 * seeds));
}

TEST_CASE("w1: triangle inequality under translation") {
    CounterRng rng(7, 34);
    Eigen::VectorXd x(500);
    for (int i = 0; i < 500; ++i) x(i) = rng.next_gaussian();
    double base = w1_gaussian_1d(x, 1.0);
    for (double c : {0.1, -0.7, 2.0}) {
        Eigen::VectorXd y = x.array() + c;
        CHECK(w1_gaussian_1d(y, 1.0) - base <= std::fabs(c) + 1e-12);
    }
    CHECK_THROWS_AS(w1_gaussian_1d(x, 0.0), invalid_parameter);
}

TEST_CASE("risk gap starts at zero in both modes") {
    SignalSpec sig;
    for (bool robust : {false, true}) {
        int n = 120;
        NoiseSpec noise =
            robust ? robust_default_noise(0.05, n) : gaussian_noise_with_norm(0.5, n);
        LinearModel m = make_model(n, 60, 15, sig, noise, 4);
        RunOptions ro;
        ro.t_max = 6;
        AmpMode mode = robust ? AmpMode::robust : AmpMode::sparse;
        AmpTrace tr = run_amp(m, mode, ro);
        SeOptions so;
        so.t_max = 6;
        SeTrace se = run_se(m, mode, so);
        std::vector<double> gaps = risk_gap(tr, se);
        CHECK(std::fabs(gaps[1]) <= 1e-12);
        for (int t = 1; t <= 6; ++t) CHECK(std::isfinite(gaps[t]));
    }
}

TEST_CASE("scaling fit on exact and noisy power laws") {
    std::vector<std::pair<double, double>> exact;
    for (double n : {500.0, 1000.0, 2000.0, 4000.0})
        exact.emplace_back(n, 3.7 * std::pow(n, -1.0 / 3.0));
    ScalingFit f = scaling_fit(exact);
    CHECK(f.slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<std::pair<double, double>> consts = {{500, 2}, {1000, 2}, {2000, 2}};
    CHECK(scaling_fit(consts).slope == doctest::Approx(0.0).epsilon(1e-12));

    CounterRng rng(9, 35);
    std::vector<std::pair<double, double>> noisy;
    for (double n : {500.0, 1000.0, 2000.0, 4000.0, 8000.0})
        noisy.emplace_back(n, std::pow(n, -1.0 / 3.0) *
                                  (1.0 + 0.1 * rng.next_gaussian()));
    double slope = scaling_fit(noisy).slope;
    CHECK(slope <= -0.2);
    CHECK(slope >= -0.45);

    CHECK_THROWS_AS(scaling_fit({{100.0, 1.0}, {200.0, 0.0}, {300.0, 1.0}}),
                    invalid_parameter);
}

TEST_CASE("quadrature handles polynomials and gaussian moments") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(gauss_expect([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gauss_expect([](double x) { return x * x; }) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gauss_expect([](double x) { return x * x * x * x; }) ==
          doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("lasso H inner expectations: closed forms vs quadrature") {
    CHECK(st_gg(0.0) == doctest::Approx(1.0).epsilon(1e-14));  // E[G^2]
    for (double w : {0.5, 1.0, 2.0}) {
        for (double th : {0.0, 0.4, 1.3, 6.0}) {
            double cross = gauss_expect([&](double g) {
                double st = (std::fabs(th + g) > w)
                                ? ((th + g > 0 ? 1.0 : -1.0) * (std::fabs(th + g) - w))
                                : 0.0;
                double ind = std::fabs(th + g) > w ? 1.0 : 0.0;
                return (st - th * ind) * g;
            });
            CHECK(lasso_h_cross(th, w) == doctest::Approx(cross).epsilon(1e-7));
            double grad = gauss_expect([&](double g) {
                double sgn = (th + g) > 0 ? 1.0 : -1.0;
                return std::fabs(th + g) > w ? (w - g * sgn) : 0.0;
            });
            CHECK(lasso_h_grad(th, w) == doctest::Approx(grad).epsilon(1e-7));
        }
        double gg = gauss_expect([&](double g) {
            double st = (std::fabs(g) > w) ? ((g > 0 ? 1.0 : -1.0) * (std::fabs(g) - w))
                                           : 0.0;
            return st * g;
        });
        CHECK(st_gg(w) == doctest::Approx(gg).epsilon(1e-7));
    }
}

TEST_CASE("lasso H inner expectations vs a seeded Monte Carlo oracle") {
    CounterRng rng(88, static_cast<uint64_t>(Stream::monte_carlo));
    const int draws = 400000;
    const double w = 1.0, th = 0.7;
    double c_acc = 0, c_acc2 = 0, b_acc = 0, b_acc2 = 0;
    for (int d = 0; d < draws; ++d) {
        double g = rng.next_gaussian();
        double sgn = (th + g) > 0 ? 1.0 : -1.0;
        double ind = std::fabs(th + g) > w ? 1.0 : 0.0;
        double st = ind * sgn * (std::fabs(th + g) - w);
        double cv = (st - th * ind) * g;
        double bv = ind * (w - g * sgn);
        c_acc += cv;
        c_acc2 += cv * cv;
        b_acc += bv;
        b_acc2 += bv * bv;
    }
    double cm = c_acc / draws, cse = std::sqrt((c_acc2 / draws - cm * cm) / draws);
    double bm = b_acc / draws, bse = std::sqrt((b_acc2 / draws - bm * bm) / draws);
    CHECK(std::fabs(lasso_h_cross(th, w) - cm) <= 3 * cse);
    CHECK(std::fabs(lasso_h_grad(th, w) - bm) <= 3 * bse);
}

TEST_CASE("lasso H curves are positive on the figure grid at p/k = 2.3") {
    HCurve h1 = hcurve("lasso-H1", 0.01, 5.0, 0.01);
    HCurve h2 = hcurve("lasso-H2", 0.01, 5.0, 0.01);
    REQUIRE(h1.grid.size() == h2.grid.size());
    for (std::size_t i = 0; i < h1.grid.size(); ++i) {
        CHECK(h1.values[i] > 0.0);
        CHECK(h2.values[i] > 0.0);
    }
    // the sup becomes non-vacuous around omega ~ 0.8 and stays bounded
    HPoint p = lasso_h2(1.5);
    CHECK(p.feasible);
    CHECK(p.value > 0.0);
    CHECK(p.value < 1.0);
}

TEST_CASE("robust H1 closed form") {
    // tau phi(tau) > tau^2 Q(tau) (Mills) makes H1 positive
    for (double tau = 0.1; tau <= 5.0; tau += 0.1) CHECK(robust_h1(tau) > 0.0);
    // small-tau limit tends to 1
    CHECK(robust_h1(0.01) == doctest::Approx(1.0).epsilon(0.01));
    // direct identity H1 = (1 - E[min{G^2,t^2}]/P(|G|<t)) / P(|G|>t)
    for (double tau : {0.7, 1.9, 3.2}) {
        double expect = (1.0 - gauss_clipped_second_moment(tau) /
                                   (1.0 - 2.0 * norm_sf(tau))) /
                        (2.0 * norm_sf(tau));
        CHECK(robust_h1(tau) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("robust H2: paper facts") {
    // H2 >= 0.02 on (0, 3)
    HCurve c = hcurve("robust-H2", 0.01, 3.0, 0.01);
    for (double v : c.values) CHECK(v >= 0.02);
    // eps >= tau branch: H2 >= 1 - 2/tau for tau in [3, 10]
    for (double tau = 3.0; tau <= 10.0; tau += 0.5) {
        RobustH2Options opts;
        opts.eps_min = tau;
        CHECK(robust_h2(tau, opts).value >= 1.0 - 2.0 / tau);
    }
}

TEST_CASE("robust H2 inner terms vs quadrature") {
    for (auto [eps, tau] : {std::pair{0.5, 1.2}, std::pair{2.0, 0.8}}) {
        double num = gauss_expect([&](double g) {
            return std::fabs(eps + g) < tau ? g * (eps + g) : 0.0;
        });
        double den = gauss_expect([&](double g) {
            return std::min((eps + g) * (eps + g), tau * tau);
        });
        // reconstruct the sup integrand at this eps from the curve pieces
        RobustH2Options opts;
        opts.eps_min = eps;
        opts.eps_step = 1.0;
        opts.eps_pad = eps - tau;  // single grid point at eps
        // (direct check through the public surface: one-point sup)
        if (opts.eps_pad + tau >= opts.eps_min) {
            HPoint pt = robust_h2(tau, opts);
            CHECK(1.0 - pt.value == doctest::Approx(std::fabs(num) / den).epsilon(1e-7));
        }
    }
}

TEST_CASE("h-curves are deterministic") {
    HCurve a = hcurve("robust-H2", 0.05, 1.0, 0.05);
    HCurve b = hcurve("robust-H2", 0.05, 1.0, 0.05);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] == b.values[i]);
        CHECK(a.grid[i] == b.grid[i]);
    }
    CHECK_THROWS_AS(hcurve("nope", 0.1, 1.0, 0.1), invalid_parameter);
}
