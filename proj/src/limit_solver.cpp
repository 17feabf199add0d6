#include "qcs/limit_solver.hpp"

#include <algorithm>
#include <cmath>

#include "qcs/quadrature.hpp"

namespace qcs {

namespace {

constexpr double kQuadTol = 1e-15;

// int_0^1 exp(-sigma / (1 - u^2)) du with u = 1 - e^{-v}; the integrand
// then decays double exponentially in v.
double W_unit(double sigma) {
    if (sigma == 0.0) return 1.0;
    auto g = [sigma](double v) {
        double e = std::exp(-v);
        return std::exp(-sigma / (e * (2.0 - e)) - v);
    };
    double v_max = std::min(40.0, std::log(1500.0 / sigma) + 1.0);
    return doubling_simpson(g, 0.0, std::max(v_max, 1.0), kQuadTol);
}

// x^{-1} times the part of H beyond u0: int_{atan u0}^{pi/2} (1 - exp(-sigma cos^2 v)) / cos^2 v dv.
double H_unit_from(double sigma, double u0) {
    if (sigma == 0.0) return 0.0;
    auto g = [sigma](double v) {
        double c = std::cos(v);
        double c2 = c * c;
        if (c2 < 1e-300) return sigma;
        return -std::expm1(-sigma * c2) / c2;
    };
    return doubling_simpson(g, std::atan(u0), pi / 2, kQuadTol);
}

double H_unit(double sigma) { return H_unit_from(sigma, 0.0); }

}  // namespace

double W_integral(double x, double sigma) {
    if (!(x > 0.0) || !(sigma >= 0.0)) throw DomainError("W_integral needs x > 0, sigma >= 0");
    return x * W_unit(sigma);
}

double H_integral(double x, double sigma) {
    if (!(x > 0.0) || !(sigma >= 0.0)) throw DomainError("H_integral needs x > 0, sigma >= 0");
    return x * H_unit(sigma);
}

LimitSolution solve_limit(double w, double h, double tol) {
    if (!(w > 0.0) || !(h > 0.0)) throw DomainError("solve_limit needs w, h > 0");
    const double target = h / w;
    auto g = [&](double sigma) { return H_unit(sigma) / W_unit(sigma) - target; };

    // H/W is an increasing bijection of sigma onto (0, inf).
    double lo = 0.0, hi = 1.0;
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw SolverError("no bracket for sigma", hi, g(hi));
    }
    for (int i = 0; i < 30; ++i) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    double s0 = lo, s1 = hi, g0 = g(s0), g1 = g(s1);
    for (int i = 0; i < 50 && std::abs(g1) > tol * target && g1 != g0; ++i) {
        double s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
        s0 = s1, g0 = g1;
        s1 = s2, g1 = g(s1);
    }
    double sigma = s1;
    double x = w / W_unit(sigma);
    LimitSolution sol{x, sigma, sigma * x / 2.0, pi * sigma * x / 2.0, 0.0, 0.0};
    sol.residual_W = std::abs(W_integral(x, sigma) - w);
    sol.residual_H = std::abs(H_integral(x, sigma) - h);
    return sol;
}

double residue_series(double x_inf, double sigma) {
    if (!(sigma >= 0.0)) throw DomainError("residue_series needs sigma >= 0");
    double term = 1.0, sum = 0.0;
    for (int n = 0; n < 1000; ++n) {
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        term *= (-sigma / 4.0) * 2.0 * (2.0 * n + 1.0) / ((n + 1.0) * (n + 2.0));
    }
    return x_inf * sigma / 2.0 * sum;
}

cpx eval_m_infinity(cpx z, const LimitSolution& sol) {
    const double x = sol.x_inf;
    if (z == cpx(x) || z == cpx(-x)) throw SingularPointError("m_inf is singular at +-x_inf");
    return std::exp(sol.s / (z - x) - sol.s / (z + x));
}

cpx eta_infinity(cpx z, const LimitSolution& sol) {
    const double x = sol.x_inf;
    if (z == cpx(x) || z == cpx(-x)) throw SingularPointError("eta_inf is singular at +-x_inf");
    return sol.sigma * x / 2.0 * (1.0 / ((z + x) * (z + x)) - 1.0 / ((z - x) * (z - x)));
}

double limit_chart_real(double x, const LimitSolution& sol) {
    const double xi = sol.x_inf, c = 2.0 * sol.s * xi;
    if (!(x > xi)) throw DomainError("limit_chart_real needs x > x_inf");
    // u = x / v maps [x, inf) to (0, 1]; m_inf(u) - 1 = expm1(c / (u^2 - x_inf^2)).
    auto g = [&](double v) {
        if (v == 0.0) return c / x;
        double a = c * v * v / (x * x - xi * xi * v * v);
        return std::expm1(a) * x / (v * v);
    };
    return x - doubling_simpson(g, 0.0, 1.0, kQuadTol);
}

std::vector<TraceResult> trace_limit_shape(const LimitSolution& sol, double step, double r0,
                                           long long max_steps) {
    const double xi = sol.x_inf;
    const double w = xi * W_unit(sol.sigma);
    const double h = xi * H_unit(sol.sigma);

    // Field lines of c / m_inf, parametrized by arc length; `length` is the
    // edge length in the flat chart, accumulated as |m_inf| |dz|.
    auto trace = [&](cpx z, double arg_c, double length) {
        TraceResult out;
        auto log_m = [&](cpx p) { return sol.s / (p - xi) - sol.s / (p + xi); };
        auto dir = [&](cpx p) { return std::polar(1.0, arg_c - log_m(p).imag()); };
        double travelled = 0.0;
        out.points.push_back(z);
        while (out.steps < max_steps) {
            double d = std::abs(z - xi);
            if (d < r0 || travelled > length * (1.0 + 1e-6)) {
                out.terminal = TraceTerminal::ReachedTarget;
                return out;
            }
            double hz = std::min(step, 0.02 * d);
            cpx k1 = dir(z);
            cpx k2 = dir(z + 0.5 * hz * k1);
            cpx k3 = dir(z + 0.5 * hz * k2);
            cpx k4 = dir(z + hz * k3);
            cpx next = z + hz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            travelled += std::exp(log_m(0.5 * (z + next)).real()) * hz;
            z = next;
            ++out.steps;
            out.points.push_back(z);
        }
        return out;
    };

    // Top edge: seed i t* on the imaginary axis with Im f_inf(i t*) = h, where
    // Im f_inf(it) = t + x_inf int_{t/x_inf}^inf (1 - exp(-sigma/(1+v^2))) dv is increasing.
    auto im_f = [&](double t) { return t + xi * H_unit_from(sol.sigma, t / xi); };
    double t_star = 0.0;
    if (im_f(0.0) < h) {
        double lo = 0.0, hi = h;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * h; ++i) {
            double mid = 0.5 * (lo + hi);
            (im_f(mid) < h ? lo : hi) = mid;
        }
        t_star = 0.5 * (lo + hi);
    }
    TraceResult top = trace(cpx(0.0, t_star), 0.0, w);

    // Right edge: the point right of x_inf with Re f_inf = w, traced upwards.
    double lo = xi + r0, hi = xi + 1.0;
    while (limit_chart_real(hi, sol) < w) hi = xi + 2.0 * (hi - xi);
    while (!(limit_chart_real(lo, sol) < w)) lo = xi + 0.5 * (lo - xi);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * xi; ++i) {
        double mid = 0.5 * (lo + hi);
        (limit_chart_real(mid, sol) < w ? lo : hi) = mid;
    }
    TraceResult right = trace(cpx(0.5 * (lo + hi), 0.0), pi / 2, h);

    auto mapped = [](const TraceResult& t, auto f) {
        TraceResult r = t;
        for (auto& p : r.points) p = f(p);
        return r;
    };
    auto conj = [](cpx z) { return std::conj(z); };
    auto neg = [](cpx z) { return -z; };
    auto negconj = [](cpx z) { return -std::conj(z); };
    return {top,
            right,
            mapped(right, conj),
            mapped(top, neg),
            mapped(right, negconj),
            mapped(right, neg)};
}

}  // namespace qcs
