#pragma once

#include <optional>

#include "qcs/branch.hpp"

namespace qcs {

/// Xi(z1) assembled from three segment integrals of m_p:
///   Ia: i(y+1) -> z1 + i,   Ib: z1 + i -> z1,   Ic: x+1 -> z1 + i,
/// Xi = Re(Ia + Ib) + i Im(Ic + Ib).
/// The two starting points lie on the symmetry axes where f_p is purely
/// imaginary (resp. real), so no improper integral is needed.
struct XiEvaluation {
    cpx z1;
    cpx Ia, Ib, Ic;
    cpx xi;
    long long steps = 0;
};

XiEvaluation xi(cpx z1, const DilatationParams& params, const SolverConfig& cfg);

struct CornerSolution {
    CornerSet corners;
    double theta1;
    double residual;      // |Xi(z1) - (w + ih)| through homogeneity
    int iterations;
    long long steps;      // Simpson subintervals of the last Xi evaluation
};

/// Find z1 with Xi(z1) = w + ih: secant on theta for the slope of
/// Xi(e^{i theta}), bisection fallback, then rescale.
CornerSolution solve_corner(const DilatationParams& params, const SolverConfig& cfg,
                            std::optional<double> initial_angle = std::nullopt);

}  // namespace qcs
