#include "qcs/param_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcs/quadrature.hpp"

namespace qcs {

XiEvaluation xi(cpx z1, const DilatationParams& params, const SolverConfig& cfg) {
    CornerSet corners(z1, params);
    const double x = z1.real(), y = z1.imag();
    const cpx top = z1 + I;

    auto ia = integrate_m_segment(principal_branch_state(cpx(0.0, y + 1.0), corners), top, cfg,
                                  corners, params);
    auto ic = integrate_m_segment(principal_branch_state(cpx(x + 1.0, 0.0), corners), top, cfg,
                                  corners, params);
    auto ib = integrate_m_segment(principal_branch_state(top, corners), z1, cfg, corners, params);

    XiEvaluation out;
    out.z1 = z1;
    out.Ia = ia.value;
    out.Ib = ib.value;
    out.Ic = ic.value;
    out.xi = cpx((ia.value + ib.value).real(), (ic.value + ib.value).imag());
    out.steps = ia.steps + ib.steps + ic.steps;
    if (!std::isfinite(out.xi.real()) || !std::isfinite(out.xi.imag()))
        throw NumericsError("Xi evaluation produced a non-finite value");
    return out;
}

CornerSolution solve_corner(const DilatationParams& params, const SolverConfig& cfg,
                            std::optional<double> initial_angle) {
    params.validate();
    cfg.validate();
    const double w = params.half_width, h = params.half_height;
    const double target_log_slope = std::log(w / h);
    const double tol = cfg.tol_secant * (w + h);

    struct Sample {
        double theta;
        double g;  // +-inf when Xi(e^{i theta}) is numerically on a quadrant edge
        double residual;
        XiEvaluation eval;
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto sample = [&](double theta) {
        XiEvaluation e = xi(std::polar(1.0, theta), params, cfg);
        cpx c = e.xi;
        // For huge K, Xi(e^{i theta}) hugs the imaginary axis unless theta is
        // tiny, and above the root Re Xi cancels down to rounding noise that
        // can land anywhere. Leaving the quadrant therefore means theta is too large.
        if (!(c.real() > 0.0) || !(c.imag() > 0.0)) return Sample{theta, -inf, inf, e};
        double g = std::log(c.real()) - std::log(c.imag()) - target_log_slope;
        double residual = std::abs(w / c.real() * c.imag() - h);
        return Sample{theta, g, residual, e};
    };
    auto finish = [&](const Sample& s, int iterations) {
        cpx z1 = std::polar(1.0, s.theta) * (w / s.eval.xi.real());
        return CornerSolution{CornerSet(z1, params), s.theta, s.residual, iterations, s.eval.steps};
    };

    // g decreases from +inf (theta -> 0) to -inf (theta -> pi/2).
    double lo = 0.0, hi = pi / 2;
    auto bisect = [&] { return lo > 0.0 ? std::sqrt(lo * hi) : 0.25 * hi; };
    // Default guess from the large-K asymptotics of the square:
    // Im z1 ~ 1.09 / lnK, Re z1 ~ 1.91, so theta ~ 0.57 / lnK.
    double theta = initial_angle.value_or(params.lnK > 0.0 ? std::min(pi / 4, 0.57 / params.lnK) : pi / 4);
    if (!(theta > lo && theta < hi)) theta = pi / 4;

    std::optional<Sample> prev;
    for (int iterations = 1;; ++iterations) {
        Sample cur = sample(theta);
        if (cur.residual < tol) return finish(cur, iterations);
        (cur.g > 0 ? lo : hi) = cur.theta;
        if (iterations >= cfg.max_secant_iters)
            throw SolverError("secant iteration did not converge", cur.theta, cur.residual);

        double next;
        if (!std::isfinite(cur.g)) {
            next = bisect();
        } else if (!prev) {
            next = theta * (cur.g > 0 ? 1.02 : 0.98);
        } else {
            double dg = cur.g - prev->g;
            next = dg != 0.0 ? cur.theta - cur.g * (cur.theta - prev->theta) / dg : bisect();
        }
        if (!(next > lo && next < hi)) next = bisect();
        if (next == cur.theta)
            throw SolverError("secant iteration stalled", cur.theta, cur.residual);
        if (std::isfinite(cur.g)) prev = std::move(cur);
        theta = next;
    }
}

}  // namespace qcs
