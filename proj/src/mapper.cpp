#include "qcs/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "qcs/quadrature.hpp"

namespace qcs {

namespace {

double max_corner_modulus(const CornerSet& corners) {
    return std::abs(corners.z1());  // all four share the modulus
}

// Radius past which the far field is evaluated directly.
double far_radius(const CornerSet& corners) { return 2.0 * max_corner_modulus(corners) + 1.0; }

bool in_open_rect(cpx p, const DilatationParams& params) {
    return std::abs(p.real()) < params.half_width && std::abs(p.imag()) < params.half_height;
}

// A(x + iy) = x + iKy
cpx stretch(cpx v, double K) { return {v.real(), K * v.imag()}; }

// Running value of phi^{-1} along a path together with the chart it is
// currently expressed in. Inside the rectangle the increment is A(c m dz),
// outside c m dz; crossing a lateral side rescales c by K^{-+1}, crossing the
// top or bottom leaves it alone.
struct Marcher {
    const DilatationParams& params;
    const CornerSet& corners;
    const SolverConfig& cfg;
    BranchState state;
    cpx m;
    cpx P;
    bool inside;
    double log_c = 0.0;

    cpx increment(cpx integral) const {
        cpx v = std::exp(log_c) * integral;
        return inside ? stretch(v, std::exp(params.lnK)) : v;
    }

    // Sides violated by p: bit 0 lateral (|Re| >= w), bit 1 top/bottom.
    int violated(cpx p) const {
        return (std::abs(p.real()) >= params.half_width ? 1 : 0) |
               (std::abs(p.imag()) >= params.half_height ? 2 : 0);
    }

    // `outer` is the image just outside the rectangle on either side of the crossing.
    void switch_chart(cpx outer) {
        int side = violated(outer);
        if (side == 3) throw PerturbPathError("running image crossed at a rectangle corner");
        if (side == 1) log_c += inside ? params.lnK : -params.lnK;
        inside = !inside;
    }

    void march_to(cpx b) {
        for (;;) {
            cpx a = state.anchor;
            double remaining = std::abs(b - a);
            if (remaining == 0.0) return;
            // Floor at rounding scale so a target within ulps of a corner is reached.
            double h = std::max(simpson_step_length(a, corners, cfg),
                                8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), 1.0));
            cpx end = h >= remaining ? b : a + (b - a) * (h / remaining);

            SimpsonPiece piece = simpson_piece(state, m, end, corners, params);
            cpx next = P + increment(piece.integral);
            if (in_open_rect(next, params) != inside) {
                // Locate the crossing on this piece.
                double lo = 0.0, hi = 1.0;
                cpx P_lo = P;
                const double len = std::abs(end - a);
                while ((hi - lo) * len > 1e-12 && hi - lo > 1e-15) {
                    double mid = 0.5 * (lo + hi);
                    SimpsonPiece part = simpson_piece(state, m, a + (end - a) * mid, corners, params);
                    cpx P_mid = P + increment(part.integral);
                    if (in_open_rect(P_mid, params) != inside)
                        hi = mid;
                    else
                        lo = mid, P_lo = P_mid;
                }
                if (hi < 1.0) piece = simpson_piece(state, m, a + (end - a) * hi, corners, params);
                next = P + increment(piece.integral);
                switch_chart(inside ? next : P_lo);
            }
            state = piece.end;
            m = piece.m_end;
            P = next;
            if (piece.end.anchor == b) return;
        }
    }

    // Straight into corner i: march to the r0 cutoff, then the closed form.
    void march_into_corner(int i) {
        cpx zc = corners.z(i);
        cpx from = state.anchor;
        double dist = std::abs(from - zc);
        if (dist > cfg.r0) march_to(zc + cfg.r0 * (from - zc) / dist);
        P += increment(corner_tail(state, i, corners, params, cfg.tail_rule));
    }
};

std::optional<int> corner_index(cpx z, const CornerSet& corners) {
    for (int i = 0; i < 4; ++i)
        if (z == corners.z(i)) return i;
    return std::nullopt;
}

BranchState branch_at_zero(const CornerSet& corners) {
    cpx top = cpx(0.0, far_radius(corners));
    return continue_along_segment(branch_at_infinity(top, corners), 0.0, corners);
}

// RK4 on dz/dt = delta / m(z), t in [0, 1], following the branch of m.
cpx integrate_inverse_ode(cpx z, BranchState state, cpx delta, const DilatationParams& params,
                          const CornerSet& corners, const SolverConfig& cfg) {
    if (delta == 0.0) return z;
    auto field = [&](const BranchState& s) { return delta / eval_m(s, corners, params); };
    double t = 0.0;
    while (t < 1.0) {
        double dist = corners.nearest(z).second;
        if (dist < cfg.r0) throw NearSingularError("forward map path came too close to a corner");
        double step_z = std::min(cfg.map_step, 0.05 * dist);
        cpx k1 = field(state);
        double dt = std::min(1.0 - t, step_z / std::abs(k1));
        cpx k2 = field(advance(state, z + 0.5 * dt * k1, corners));
        cpx k3 = field(advance(state, z + 0.5 * dt * k2, corners));
        cpx k4 = field(advance(state, z + dt * k3, corners));
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        state = advance(state, z, corners);
        t = (1.0 - t <= dt) ? 1.0 : t + dt;
    }
    return z;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * pi); }

// log(1 + x) and exp(x) - 1 without cancellation for small |x|.
cpx log1p_c(cpx x) {
    double a = x.real(), b = x.imag();
    return {0.5 * std::log1p(a * (2.0 + a) + b * b), std::atan2(b, 1.0 + a)};
}

cpx expm1_c(cpx x) {
    double s = std::sin(0.5 * x.imag());
    return {std::expm1(x.real()) * std::cos(x.imag()) - 2.0 * s * s,
            std::exp(x.real()) * std::sin(x.imag())};
}

}  // namespace

cpx far_field_tail(cpx z, const CornerSet& corners, const DilatationParams& params) {
    double R = std::abs(z);
    if (!(R > 1.05 * max_corner_modulus(corners)))
        throw DomainError("far-field expansion needs |z| beyond the corners");
    if (params.lnK == 0.0) return 0.0;
    cpx u = z / R;
    auto f = [&](double t) -> cpx {
        if (t == 0.0) return 0.0;
        // log z cancels in l2 + l4 - l1 - l3 on the branch tending to 1.
        cpx q = t / u;
        cpx S = log1p_c(-corners.z(1) * q) + log1p_c(-corners.z(3) * q) -
                log1p_c(-corners.z(0) * q) - log1p_c(-corners.z(2) * q);
        return expm1_c(params.exponent() * S) / (t * t);
    };
    using boost::math::quadrature::gauss;
    return -u * gauss<double, 30>::integrate(f, 0.0, 1.0 / R);
}

cpx inverse_map(cpx z, const DilatationParams& params, const CornerSet& corners,
                const SolverConfig& cfg, const MapPath& path) {
    if (params.lnK == 0.0 && path.origin == PathOrigin::Infinity) return z;

    std::vector<cpx> vertices = path.via;
    vertices.push_back(z);
    for (size_t k = 0; k + 1 < vertices.size(); ++k)
        if (corner_index(vertices[k], corners))
            throw SingularPathError("path vertex at a corner");

    Marcher mk{params, corners, cfg, {}, 0.0, 0.0, false};
    if (path.origin == PathOrigin::Infinity) {
        cpx first = vertices.front();
        cpx dir = first == 0.0 ? I : first / std::abs(first);
        cpx start = far_radius(corners) * dir;
        mk.state = branch_at_infinity(start, corners);
        mk.P = start + far_field_tail(start, corners, params);
        mk.inside = false;
    } else {
        mk.state = branch_at_zero(corners);
        mk.P = 0.0;
        mk.inside = true;
    }
    mk.m = eval_m(mk.state, corners, params);

    for (size_t k = 0; k < vertices.size(); ++k) {
        cpx a = mk.state.anchor, b = vertices[k];
        auto ci = corner_index(b, corners);
        for (int i = 0; i < 4; ++i) {
            if (ci && i == *ci) continue;
            if (distance_to_segment(corners.z(i), a, b) == 0.0)
                throw SingularPathError("inverse map path passes through a corner");
        }
        if (ci)
            mk.march_into_corner(*ci);
        else
            mk.march_to(b);
    }
    return mk.P;
}

cpx forward_map(cpx p, Chart chart, const DilatationParams& params, const CornerSet& corners,
                const SolverConfig& cfg) {
    if (params.lnK == 0.0) return p;
    // Rectangle corners go to the corner images; the ODE would end on a singularity.
    const double w = params.half_width, h = params.half_height;
    const std::array<cpx, 4> rect{cpx(w, h), cpx(-w, h), cpx(-w, -h), cpx(w, -h)};
    for (int i = 0; i < 4; ++i)
        if (p == rect[i]) return corners.z(i);
    if (chart == Chart::Inside) {
        if (std::abs(p.real()) > params.half_width || std::abs(p.imag()) > params.half_height)
            throw DomainError("Inside chart needs a point of the rectangle");
        cpx q(p.real(), p.imag() * std::exp(-params.lnK));
        return integrate_inverse_ode(0.0, branch_at_zero(corners), q, params, corners, cfg);
    }

    if (in_open_rect(p, params)) throw DomainError("Outside chart needs a point off the rectangle");
    double R = std::max(std::abs(p), 3.0 * max_corner_modulus(corners) + 2.0);
    cpx far = R * (p / std::abs(p));

    // phi(far) by Newton on z + tail(z) = far.
    cpx z = far;
    for (int it = 0;; ++it) {
        cpx F = z + far_field_tail(z, corners, params) - far;
        cpx step = F / eval_m(branch_at_infinity(z, corners), corners, params);
        z -= step;
        if (std::abs(step) < 1e-14 * R) break;
        if (it == 50) throw SolverError("far-field Newton did not converge", std::abs(z), std::abs(F));
    }
    return integrate_inverse_ode(z, branch_at_infinity(z, corners), p - far, params, corners, cfg);
}

cpx SpiralSeed::point(const CornerSet& corners) const {
    return corners.z(corner) + std::exp(cpx(log_r, theta));
}

SpiralSeed spiral_seed(Edge side, const CornerSet& corners, const DilatationParams& params,
                       int turns_deeper) {
    const cpx z1 = corners.z1();
    double log_r = std::log(1e-3 * std::abs(z1 - corners.z(3)));
    if (params.lnK > 0.0) log_r -= turns_deeper * (2.0 * pi) * (2.0 * pi) / params.lnK;

    cpx s = std::log(z1 - corners.z(1)) + std::log(z1 - corners.z(3)) - std::log(z1 - corners.z(2));
    cpx xi1 = params.lnK == 0.0 ? cpx(1.0) : std::exp(params.exponent() * s);
    cpx c0 = xi1 / (1.0 + corners.beta(0));
    double target = side == Edge::Top ? pi : -pi / 2;
    double theta = wrap_angle(target - std::arg(c0) - corners.tau(0) * log_r);
    return {0, c0, log_r, theta, side};
}

TraceResult trace_boundary(Edge side, const DilatationParams& params, const CornerSet& corners,
                           const SolverConfig& cfg, std::optional<SpiralSeed> seed) {
    if (!seed) seed = spiral_seed(side, corners, params);
    const cpx z1 = corners.z1();
    const double a = params.lnK / (2.0 * pi);
    const double arg_v = side == Edge::Top ? pi : -pi / 2;

    TraceResult out;
    std::array<cpx, 3> d, L;
    for (int j = 1; j < 4; ++j) {
        d[j - 1] = z1 - corners.z(j);
        L[j - 1] = std::log(d[j - 1]);
    }
    auto logs_at = [&](cpx omega) {
        cpx e = std::exp(omega);
        std::array<cpx, 4> l;
        l[0] = omega;
        for (int j = 1; j < 4; ++j) l[j] = L[j - 1] + log1p_c(e / d[j - 1]);
        return l;
    };
    auto re_sum = [](const std::array<cpx, 4>& l) {
        return (l[1] + l[3] - l[0] - l[2]).real();
    };

    // Phase 1: omega = log(z - z1). The spiral is nearly a straight line here,
    // and seeds many turns deep stay representable.
    const double log_switch = std::log(0.05 * corners.min_separation());
    auto omega_dir = [&](cpx omega) {
        return std::polar(1.0, arg_v + a * re_sum(logs_at(omega)) - omega.imag());
    };
    cpx omega(seed->log_r, seed->theta);
    const double log_record = std::log(1e-12 * std::abs(z1));
    while (omega.real() < log_switch) {
        if (out.steps >= cfg.max_trace_steps) return out;
        // |dz| = |z - z1| h_omega, kept below eps0 like phase 2.
        const double h_omega = std::min(0.02, cfg.eps0 * std::exp(-omega.real()));
        cpx k1 = omega_dir(omega);
        cpx k2 = omega_dir(omega + 0.5 * h_omega * k1);
        cpx k3 = omega_dir(omega + 0.5 * h_omega * k2);
        cpx k4 = omega_dir(omega + h_omega * k3);
        omega += h_omega / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ++out.steps;
        if (omega.real() > log_record) out.points.push_back(z1 + std::exp(omega));
    }

    // Phase 2: plain z with |dz| = eps0, shortened near the corners.
    BranchState state{z1 + std::exp(omega), logs_at(omega)};
    auto dir = [&](const BranchState& s) {
        return std::polar(1.0, arg_v + a * s.log_sum().real());
    };
    auto coord = [side](cpx z) { return side == Edge::Top ? z.real() : z.imag(); };
    auto rk4 = [&](const BranchState& s, double h) {
        cpx z = s.anchor;
        cpx k1 = dir(s);
        cpx k2 = dir(advance(s, z + 0.5 * h * k1, corners));
        cpx k3 = dir(advance(s, z + 0.5 * h * k2, corners));
        cpx k4 = dir(advance(s, z + h * k3, corners));
        return advance(s, z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), corners);
    };
    out.points.push_back(state.anchor);
    while (out.steps < cfg.max_trace_steps) {
        double h = std::min(cfg.eps0, 0.02 * corners.nearest(state.anchor).second);
        BranchState next = rk4(state, h);
        ++out.steps;
        if (coord(next.anchor) <= 0.0) {
            // Secant on the step length for the axis crossing.
            double h0 = 0.0, f0 = coord(state.anchor), h1 = h, f1 = coord(next.anchor);
            for (int it = 0; it < 8 && f1 != f0 && std::abs(f1) > 1e-15; ++it) {
                double h2 = h1 - f1 * (h1 - h0) / (f1 - f0);
                h0 = h1, f0 = f1;
                h1 = h2;
                next = rk4(state, h1);
                f1 = coord(next.anchor);
            }
            out.points.push_back(next.anchor);
            out.terminal = TraceTerminal::ReachedAxis;
            return out;
        }
        state = next;
        out.points.push_back(state.anchor);
    }
    return out;
}

std::vector<std::vector<cpx>> full_boundary(const TraceResult& top, const TraceResult& right,
                                            const CornerSet& corners) {
    std::vector<std::vector<cpx>> out;
    auto map = [&](std::vector<cpx> src, auto f) {
        src.insert(src.begin(), corners.z1());
        std::vector<cpx> v(src.size());
        std::transform(src.begin(), src.end(), v.begin(), f);
        out.push_back(std::move(v));
    };
    for (const auto* t : {&top.points, &right.points}) {
        map(*t, [](cpx z) { return z; });
        map(*t, [](cpx z) { return -std::conj(z); });
        map(*t, [](cpx z) { return std::conj(z); });
        map(*t, [](cpx z) { return -z; });
    }
    return out;
}

}  // namespace qcs
