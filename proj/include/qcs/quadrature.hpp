#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "qcs/branch.hpp"

namespace qcs {

/// One Simpson subinterval [a, b] of a path integral of m dz.
struct SimpsonPiece {
    cpx integral;
    BranchState end;
    cpx m_end;
};

/// Subinterval length b - a = d0 * dist(a, nearest corner).
double simpson_step_length(cpx a, const CornerSet& corners, const SolverConfig& cfg);

/// Simpson rule on [state.anchor, b]; m_a is m at the start (reused from the
/// previous piece).
SimpsonPiece simpson_piece(const BranchState& state, cpx m_a, cpx b, const CornerSet& corners,
                           const DilatationParams& params);

/// Closed-form integral of m dz from the cutoff point (state.anchor) straight
/// into corner i, using m ~ m0 t^beta_i along z_i + t v, t in (0, 1].
cpx corner_tail(const BranchState& cutoff, int corner, const CornerSet& corners,
                const DilatationParams& params, TailRule rule);

struct SegmentIntegral {
    cpx value;
    BranchState end;          // at b, or at the cutoff point when b is a corner
    long long steps = 0;      // Simpson subintervals (the closed-form tail not counted)
    std::optional<int> corner;  // set when b is a corner
};

/// Integral of m dz along the straight segment [a, b], following the branch.
/// When b is exactly a corner the last r0 of the way uses corner_tail.
SegmentIntegral integrate_m_segment(const BranchState& a, cpx b, const SolverConfig& cfg,
                                    const CornerSet& corners, const DilatationParams& params);

/// |I(d0) - I(d0/2)| for the same segment; the step rule has no built-in
/// error estimate, this is the diagnostic.
double richardson_difference(const BranchState& a, cpx b, const SolverConfig& cfg,
                             const CornerSet& corners, const DilatationParams& params);

/// Recursive adaptive Simpson for smooth real integrands.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
    struct Rec {
        F& f;
        double operator()(double a, double fa, double m, double fm, double b, double fb,
                          double whole, double tol, int depth) const {
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return (*this)(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
                   (*this)(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
        }
    };
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Rec rec{f};
    return rec(a, fa, m, fm, b, fb, whole, tol, max_depth);
}

/// Composite Simpson on n = 16, 32, ... panels until two successive values
/// agree to tol * max(1, |value|); returns the last value.
template <class F>
double doubling_simpson(F&& f, double a, double b, double tol, int max_panels = 1 << 20) {
    double fa = f(a), fb = f(b);
    int n = 16;
    double h = (b - a) / n;
    double even = 0.0, odd = 0.0;
    for (int k = 1; k < n; ++k) (k % 2 ? odd : even) += f(a + k * h);
    double prev = h / 3.0 * (fa + fb + 2.0 * even + 4.0 * odd);
    while (n < max_panels) {
        even += odd;
        odd = 0.0;
        n *= 2;
        h *= 0.5;
        for (int k = 1; k < n; k += 2) odd += f(a + k * h);
        double cur = h / 3.0 * (fa + fb + 2.0 * even + 4.0 * odd);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace qcs
