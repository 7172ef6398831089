#include "amplab/optim.hpp"

#include <cmath>
#include <vector>

#include "amplab/errors.hpp"

namespace amplab {

MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo,
                               double hi, const MinimizeOptions& opts) {
    if (!(hi >= lo)) throw invalid_parameter("minimize_scalar: hi < lo");
    if (hi == lo) return {lo, f(lo)};

    const int g = opts.grid_points;
    std::vector<double> xs(g), vs(g);
    for (int j = 0; j < g; ++j) {
        xs[j] = lo + (hi - lo) * static_cast<double>(j) / (g - 1);
        vs[j] = f(xs[j]);
        if (!std::isfinite(vs[j]))
            throw numeric_failure("minimize_scalar: non-finite objective");
    }

    const double invphi = 0.6180339887498948482;
    auto golden = [&](double a, double b) {
        double c = b - invphi * (b - a);
        double d = a + invphi * (b - a);
        double fc = f(c), fd = f(d);
        while (b - a > opts.tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = f(d);
            }
            if (!std::isfinite(fc) || !std::isfinite(fd))
                throw numeric_failure("minimize_scalar: non-finite objective");
        }
        double x = 0.5 * (a + b);
        return MinimizeResult{x, f(x)};
    };

    // Refine every grid basin, not just the best one; ties resolve to the
    // smaller argument.
    MinimizeResult best{xs[0], vs[0]};
    for (int j = 0; j < g; ++j) {
        const bool local_min = (j == 0 || vs[j] <= vs[j - 1]) &&
                               (j == g - 1 || vs[j] <= vs[j + 1]);
        if (!local_min) continue;
        MinimizeResult cand =
            golden(xs[std::max(j - 1, 0)], xs[std::min(j + 1, g - 1)]);
        if (vs[j] < cand.value) cand = {xs[j], vs[j]};
        if (cand.value < best.value ||
            (cand.value == best.value && cand.x < best.x))
            best = cand;
    }
    return best;
}

RootResult bisect_increasing(const std::function<double(double)>& f, double lo,
                             double hi, const RootOptions& opts) {
    if (!(hi > lo)) throw invalid_parameter("bisect_increasing: bad bracket");
    double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0) || !(fhi >= 0.0))
        throw invalid_parameter("bisect_increasing: bracket does not straddle zero");
    for (int it = 0; it < opts.max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (std::fabs(fm) <= opts.tol) return {mid, fm, true};
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo <= opts.x_tol * std::max(1.0, std::fabs(hi))) break;
    }
    // Either converged in x (jump over zero) or ran out of iterations.
    return {hi, fhi, std::fabs(fhi) <= opts.tol};
}

}  // namespace amplab
