#pragma once

#include <vector>

#include "qcs/mapper.hpp"

namespace qcs {

/// Data of the K -> infinity limit: x_inf, sigma and the derived constants.
struct LimitSolution {
    double x_inf;
    double sigma;
    double s;              // sigma x_inf / 2
    double im_z1_log_K;    // pi sigma x_inf / 2, the limit of Im(z1) ln K
    double residual_W;
    double residual_H;
};

/// x int_0^1 exp(-sigma / (1 - u^2)) du
double W_integral(double x, double sigma);
/// x int_0^inf (1 - exp(-sigma / (1 + u^2))) du
double H_integral(double x, double sigma);

/// Solve W = w, H = h. H/W depends on sigma only, so this is a 1-D root.
LimitSolution solve_limit(double w = 1.0, double h = 1.0, double tol = 1e-14);

/// Residue of m_inf at x_inf, (x sigma / 2) sum_n (-sigma/4)^n (2n)! / (n!^2 (n+1)!).
double residue_series(double x_inf, double sigma);

/// m_inf(z) = exp(s/(z - x_inf) - s/(z + x_inf)), single valued.
cpx eval_m_infinity(cpx z, const LimitSolution& sol);
/// eta_inf(z) = (sigma x_inf / 2) (1/(z + x_inf)^2 - 1/(z - x_inf)^2)
cpx eta_infinity(cpx z, const LimitSolution& sol);

/// f_inf(x) = x + int_inf^x (m_inf - 1) along the real axis, for x > x_inf.
double limit_chart_real(double x, const LimitSolution& sol);

/// Images of the top and right edges for the limit integrand and their
/// symmetric copies: top, right, conj(right), -top, -conj(right), -right.
/// Each curve stops after its edge length in the flat chart (w, resp. h) or
/// at distance r0 from x_inf, whichever comes first.
std::vector<TraceResult> trace_limit_shape(const LimitSolution& sol, double step = 1e-4,
                                           double r0 = 1e-3, long long max_steps = 10'000'000);

}  // namespace qcs
