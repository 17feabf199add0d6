#include "qcs/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace qcs {

double simpson_step_length(cpx a, const CornerSet& corners, const SolverConfig& cfg) {
    return cfg.d0 * corners.nearest(a).second;
}

SimpsonPiece simpson_piece(const BranchState& state, cpx m_a, cpx b, const CornerSet& corners,
                           const DilatationParams& params) {
    cpx a = state.anchor;
    BranchState mid = advance(state, 0.5 * (a + b), corners);
    BranchState end = advance(state, b, corners);
    cpx m_mid = eval_m(mid, corners, params);
    cpx m_b = eval_m(end, corners, params);
    return {(b - a) / 6.0 * (m_a + 4.0 * m_mid + m_b), end, m_b};
}

cpx corner_tail(const BranchState& cutoff, int corner, const CornerSet& corners,
                const DilatationParams& params, TailRule rule) {
    cpx v = cutoff.anchor - corners.z(corner);
    cpx m0;
    if (rule == TailRule::FrozenAtCutoff) {
        m0 = eval_m(cutoff, corners, params);
    } else {
        // Regular factor evaluated at the corner; the singular factor keeps
        // the lift of log(v) carried by the cutoff state.
        BranchState at_corner = cutoff;
        at_corner.anchor = corners.z(corner);
        for (int j = 0; j < 4; ++j) {
            if (j == corner) continue;
            cpx d_old = cutoff.anchor - corners.z(j);
            cpx d_new = corners.z(corner) - corners.z(j);
            double sweep = std::arg(d_new * std::conj(d_old));
            at_corner.logs[j] = cpx(std::log(std::abs(d_new)), cutoff.logs[j].imag() + sweep);
        }
        m0 = params.lnK == 0.0 ? cpx(1.0) : std::exp(params.exponent() * at_corner.log_sum());
    }
    return -v * m0 / (1.0 + corners.beta(corner));
}

SegmentIntegral integrate_m_segment(const BranchState& a, cpx b, const SolverConfig& cfg,
                                    const CornerSet& corners, const DilatationParams& params) {
    SegmentIntegral out{0.0, a, 0, std::nullopt};
    for (int i = 0; i < 4; ++i)
        if (b == corners.z(i)) out.corner = i;

    cpx start = a.anchor;
    cpx stop = b;
    if (out.corner) {
        cpx zc = corners.z(*out.corner);
        double dist = std::abs(start - zc);
        if (dist == 0.0) throw SingularPathError("segment starts at its target corner");
        if (dist <= cfg.r0) {
            out.value = corner_tail(a, *out.corner, corners, params, cfg.tail_rule);
            return out;
        }
        stop = zc + cfg.r0 * (start - zc) / dist;
    }
    double total = std::abs(stop - start);
    if (total == 0.0) return out;

    // Open segment must miss every corner (other than the target).
    for (int i = 0; i < 4; ++i) {
        if (out.corner && i == *out.corner) continue;
        if (distance_to_segment(corners.z(i), start, stop) == 0.0)
            throw SingularPathError("integration segment passes through a corner");
    }

    cpx dir = (stop - start) / total;
    BranchState state = a;
    cpx m = eval_m(state, corners, params);
    double s = 0.0;
    while (s < total) {
        double h = simpson_step_length(state.anchor, corners, cfg);
        // Near a corner h can fall below the resolution of s; always advance.
        double s_next = std::min(total, std::max(s + h, std::nextafter(s, total)));
        cpx pb = (s_next == total) ? stop : start + s_next * dir;
        SimpsonPiece piece = simpson_piece(state, m, pb, corners, params);
        out.value += piece.integral;
        state = piece.end;
        m = piece.m_end;
        s = s_next;
        ++out.steps;
    }
    out.end = state;
    if (out.corner) out.value += corner_tail(state, *out.corner, corners, params, cfg.tail_rule);
    return out;
}

double richardson_difference(const BranchState& a, cpx b, const SolverConfig& cfg,
                             const CornerSet& corners, const DilatationParams& params) {
    SolverConfig half = cfg;
    half.d0 = 0.5 * cfg.d0;
    cpx coarse = integrate_m_segment(a, b, cfg, corners, params).value;
    cpx fine = integrate_m_segment(a, b, half, corners, params).value;
    return std::abs(coarse - fine);
}

}  // namespace qcs
