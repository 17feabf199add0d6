#pragma once

#include <optional>
#include <span>

#include "qcs/types.hpp"

namespace qcs {

/// Lemma test for continuing an affine chart into corner i: the continuation
/// converges iff Re(L) - tau Im(L) -> -inf along the lift L of the path.
/// Numerically: the last value sits at least `margin` below the first and is
/// the minimum over the tail.
bool corner_limit_admissible(std::span<const cpx> lift_samples, double tau, double margin = 1.0);

struct CornerExponent {
    cpx alpha;
    /// Radial contraction factor per turn of the boundary spiral,
    /// exp((2 pi)^2 / lnK); empty when lnK = 0 (no spiral).
    std::optional<double> contraction;
    /// log of the contraction, (2 pi)^2 / lnK (finite even when the factor overflows).
    std::optional<double> log_contraction;
};

/// alpha = 1 / (1 - lnK/2i pi) on corners 1 and 3, 1 / (1 + lnK/2i pi) on 2 and 4.
/// corner_index is 1-based.
CornerExponent corner_model_exponent(double lnK, int corner_index);

}  // namespace qcs
