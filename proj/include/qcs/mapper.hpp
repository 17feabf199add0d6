#pragma once

#include <optional>
#include <vector>

#include "qcs/branch.hpp"

namespace qcs {

/// Where an inverse-map path starts. From infinity the branch of m tending to
/// 1 is used (Chart 1); from 0 the branch continued down the imaginary axis,
/// with the integrand A(m dz) (Chart 2).
enum class PathOrigin { Infinity, Zero };

/// Polyline for inverse_map: origin, then `via` vertices, then the target.
/// From infinity the path comes in radially towards the first vertex.
struct MapPath {
    PathOrigin origin = PathOrigin::Infinity;
    std::vector<cpx> via;
};

/// Radially inward integral of (m - 1) from infinity to z (branch tending to
/// 1), so that phi^{-1}(z) = z + far_field_tail(z). Needs |z| beyond every corner.
cpx far_field_tail(cpx z, const CornerSet& corners, const DilatationParams& params);

/// phi^{-1}(z) by marching along the path and switching between m dz and
/// A(m dz) whenever the running image crosses the rectangle boundary.
cpx inverse_map(cpx z, const DilatationParams& params, const CornerSet& corners,
                const SolverConfig& cfg, const MapPath& path = {});

enum class Chart { Outside, Inside };

/// phi(p) by RK4 on dz/dt = gamma'(t) / m(z), along a straight path in the
/// chart from its anchor (infinity, resp. 0). For Inside, p is a point of the
/// rectangle; its Chart 2 coordinate Re p + i Im p / K is formed here.
cpx forward_map(cpx p, Chart chart, const DilatationParams& params, const CornerSet& corners,
                const SolverConfig& cfg);

enum class Edge { Top, Right };

/// Start point of an edge trace on the spiral that the image of the edge
/// winds along into z1. log_r is stored so seeds many turns deep are representable.
struct SpiralSeed {
    int corner = 0;
    cpx c0;          // xi(z1) / (1 + beta)
    double log_r;
    double theta;    // arg(c0) + theta + tau log r = pi (top) or -pi/2 (right), mod 2 pi
    Edge side;

    cpx point(const CornerSet& corners) const;
};

/// Seed at radius r = 1e-3 |z1 - z4| * exp(-turns (2 pi)^2 / lnK).
SpiralSeed spiral_seed(Edge side, const CornerSet& corners, const DilatationParams& params,
                       int turns_deeper = 0);

enum class TraceTerminal { ReachedAxis, ReachedTarget, StepLimit };

struct TraceResult {
    std::vector<cpx> points;
    TraceTerminal terminal = TraceTerminal::StepLimit;
    long long steps = 0;
};

/// Image of the right half of the top edge (from z1 to the imaginary axis) or
/// the upper half of the right edge (to the real axis). Traced from a spiral
/// seed with dz/dt = -1/m (top) or -i/m (right) until the axis is crossed.
TraceResult trace_boundary(Edge side, const DilatationParams& params, const CornerSet& corners,
                           const SolverConfig& cfg, std::optional<SpiralSeed> seed = std::nullopt);

/// The eight symmetric copies of the two traced half-edges that make up the
/// whole image of the rectangle boundary. Each copy starts at its corner,
/// which closes the gap left by the spiral seed.
std::vector<std::vector<cpx>> full_boundary(const TraceResult& top, const TraceResult& right,
                                            const CornerSet& corners);

}  // namespace qcs
