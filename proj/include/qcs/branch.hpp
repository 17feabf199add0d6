#pragma once

#include <array>

#include "qcs/types.hpp"

namespace qcs {

/// Images z1..z4 of the rectangle corners. Only z1 (upper right) is free;
/// the rest follow from the conjugation/negation symmetry.
class CornerSet {
public:
    CornerSet(cpx z1, const DilatationParams& params);

    /// Corner by 0-based index: 0 -> z1, 1 -> z2 = -conj(z1), 2 -> z3 = -z1, 3 -> z4 = conj(z1).
    cpx z(int i) const { return z_[i]; }
    const std::array<cpx, 4>& all() const { return z_; }
    cpx z1() const { return z_[0]; }
    double theta1() const { return std::arg(z_[0]); }

    /// +1 on corners 1 and 3, -1 on corners 2 and 4.
    static int sign(int i) { return (i % 2 == 0) ? 1 : -1; }
    /// tau_i = +-lnK/2pi
    double tau(int i) const { return sign(i) * lnK_ / (2.0 * pi); }
    /// beta_i = i tau_i, the exponent of (z - z_i) in m near z_i.
    cpx beta(int i) const { return cpx(0.0, tau(i)); }
    cpx alpha(int i) const { return 1.0 / (1.0 + beta(i)); }

    double lnK() const { return lnK_; }
    double min_separation() const;
    /// Index of the corner closest to p, and the distance.
    std::pair<int, double> nearest(cpx p) const;

private:
    std::array<cpx, 4> z_;
    double lnK_;
};

/// Continuous determinations of log(z - z_i) at `anchor`, one per corner.
/// This pins down the branch of the multivalued integrand m.
struct BranchState {
    cpx anchor;
    std::array<cpx, 4> logs;

    /// l2 + l4 - l1 - l3
    cpx log_sum() const { return logs[1] + logs[3] - logs[0] - logs[2]; }
};

/// m = exp((lnK / 2 i pi) (l2 + l4 - l1 - l3)).
cpx eval_m(const BranchState& state, const CornerSet& corners, const DilatationParams& params);

/// Principal-log state (the branch m_p). Cut: z1 + (-inf, 0] and z4 + (-inf, 0].
BranchState principal_branch_state(cpx z, const CornerSet& corners);

/// The branch of m tending to 1 at infinity, continued radially inward.
/// Requires |z| > max |z_i|.
BranchState branch_at_infinity(cpx z, const CornerSet& corners);

/// Move the anchor to `target` assuming every z - z_i sweeps less than pi
/// on the way (true for any straight segment that misses the corners).
BranchState advance(const BranchState& state, cpx target, const CornerSet& corners);

/// Continue along the straight segment [anchor, target], subdividing so that
/// each piece sweeps less than pi/2 around every corner.
BranchState continue_along_segment(const BranchState& state, cpx target, const CornerSet& corners);

/// max_i |exp(l_i) - (anchor - z_i)| / |anchor - z_i|
double branch_error(const BranchState& state, const CornerSet& corners);

double distance_to_segment(cpx p, cpx a, cpx b);

}  // namespace qcs
