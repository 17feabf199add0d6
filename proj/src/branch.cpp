#include "qcs/branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcs {

void DilatationParams::validate() const {
    if (!(lnK >= 0.0) || !std::isfinite(lnK))
        throw DomainError("lnK must be finite and non-negative");
    if (!(half_width > 0.0) || !(half_height > 0.0))
        throw DomainError("rectangle half sides must be positive");
}

void SolverConfig::validate() const {
    if (!(d0 > 0.0) || !(r0 > 0.0) || !(tol_secant > 0.0) || !(eps0 > 0.0) || !(map_step > 0.0))
        throw ConfigError("solver tolerances must be positive");
    if (max_secant_iters <= 0 || max_trace_steps <= 0)
        throw ConfigError("iteration budgets must be positive");
}

CornerSet::CornerSet(cpx z1, const DilatationParams& params) : lnK_(params.lnK) {
    if (!(z1.real() > 0.0) || !(z1.imag() > 0.0) || !std::isfinite(std::abs(z1)))
        throw DomainError("z1 must lie in the open upper right quadrant");
    z_ = {z1, -std::conj(z1), -z1, std::conj(z1)};
}

double CornerSet::min_separation() const {
    return 2.0 * std::min(z_[0].real(), z_[0].imag());
}

std::pair<int, double> CornerSet::nearest(cpx p) const {
    int best = 0;
    double dist = std::abs(p - z_[0]);
    for (int i = 1; i < 4; ++i) {
        double d = std::abs(p - z_[i]);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return {best, dist};
}

cpx eval_m(const BranchState& state, const CornerSet& corners, const DilatationParams& params) {
    for (const cpx& zi : corners.all())
        if (state.anchor == zi) throw SingularPointError("m evaluated at a corner");
    if (params.lnK == 0.0) return 1.0;
    return std::exp(params.exponent() * state.log_sum());
}

BranchState principal_branch_state(cpx z, const CornerSet& corners) {
    BranchState s{z, {}};
    for (int i = 0; i < 4; ++i) {
        cpx d = z - corners.z(i);
        if (d == cpx(0.0)) throw DomainError("point coincides with a corner");
        // Only the cuts from z1 and z4 matter: on the cuts from z2, z3 the
        // jumps of log(z - z2) and log(z - z3) cancel in m.
        if ((i == 0 || i == 3) && d.imag() == 0.0 && d.real() < 0.0)
            throw DomainError("point lies on a branch cut of m_p");
        s.logs[i] = std::log(d);
    }
    return s;
}

BranchState branch_at_infinity(cpx z, const CornerSet& corners) {
    double rmax = 0.0;
    for (const cpx& zi : corners.all()) rmax = std::max(rmax, std::abs(zi));
    if (!(std::abs(z) > rmax)) throw DomainError("branch at infinity needs |z| > max |z_i|");
    // log(z - z_i) = log z + log(1 - z_i/z); the common log z cancels in m,
    // so this is the determination continuous from infinity with m(inf) = 1.
    BranchState s{z, {}};
    cpx lz = std::log(z);
    for (int i = 0; i < 4; ++i) s.logs[i] = lz + std::log(1.0 - corners.z(i) / z);
    return s;
}

namespace {

// Snap the imaginary part to arg(d) + 2 pi k with k closest to the guess so
// that exp(l) = d holds to rounding no matter how many steps were taken.
cpx snapped_log(cpx d, double im_guess) {
    double a = std::arg(d);
    double k = std::round((im_guess - a) / (2.0 * pi));
    return {std::log(std::abs(d)), a + 2.0 * pi * k};
}

}  // namespace

BranchState advance(const BranchState& state, cpx target, const CornerSet& corners) {
    BranchState out{target, {}};
    for (int i = 0; i < 4; ++i) {
        cpx d_old = state.anchor - corners.z(i);
        cpx d_new = target - corners.z(i);
        if (d_new == cpx(0.0)) throw SingularPathError("continuation reached a corner");
        double sweep = std::arg(d_new * std::conj(d_old));
        out.logs[i] = snapped_log(d_new, state.logs[i].imag() + sweep);
    }
    return out;
}

double distance_to_segment(cpx p, cpx a, cpx b) {
    cpx ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

namespace {

BranchState continue_rec(const BranchState& state, cpx target, const CornerSet& corners, int depth) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        cpx d_old = state.anchor - corners.z(i);
        cpx d_new = target - corners.z(i);
        worst = std::max(worst, std::abs(std::arg(d_new * std::conj(d_old))));
    }
    if (worst < pi / 2 || depth > 60) return advance(state, target, corners);
    cpx mid = 0.5 * (state.anchor + target);
    return continue_rec(continue_rec(state, mid, corners, depth + 1), target, corners, depth + 1);
}

}  // namespace

BranchState continue_along_segment(const BranchState& state, cpx target, const CornerSet& corners) {
    if (target == state.anchor) return state;
    double scale = std::abs(target - state.anchor) + std::abs(state.anchor) + 1.0;
    for (const cpx& zi : corners.all())
        if (distance_to_segment(zi, state.anchor, target) <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
            throw SingularPathError("segment passes through a corner");
    return continue_rec(state, target, corners, 0);
}

double branch_error(const BranchState& state, const CornerSet& corners) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        cpx d = state.anchor - corners.z(i);
        worst = std::max(worst, std::abs(std::exp(state.logs[i]) - d) / std::abs(d));
    }
    return worst;
}

}  // namespace qcs
