#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "qcs/mapper.hpp"
#include "qcs/param_solver.hpp"

using namespace qcs;

namespace {

struct Setup {
    DilatationParams params;
    SolverConfig cfg;
    CornerSet corners;
};

Setup solved(double lnK) {
    SolverConfig cfg;
    auto p = DilatationParams::square(lnK);
    return {p, cfg, solve_corner(p, cfg).corners};
}

const Setup& k2() {
    static const Setup s = solved(std::log(2.0));
    return s;
}

double distance_to_polyline(cpx p, const std::vector<cpx>& line) {
    double best = std::abs(p - line.front());
    for (std::size_t k = 1; k < line.size(); ++k) best = std::min(best, distance_to_segment(p, line[k - 1], line[k]));
    return best;
}

cpx m_direct(cpx z, const CornerSet& c, const DilatationParams& p) {
    cpx s = std::log(z - c.z(1)) + std::log(z - c.z(3)) - std::log(z - c.z(0)) - std::log(z - c.z(2));
    return std::exp(p.exponent() * s);
}

}  // namespace

TEST_CASE("K = 1: both maps are the identity") {
    auto s = solved(0.0);
    for (cpx z : {cpx(0.3, 0.2), cpx(3, -1), cpx(0.0)}) {
        CHECK(inverse_map(z, s.params, s.corners, s.cfg) == z);
        CHECK(forward_map(z, Chart::Outside, s.params, s.corners, s.cfg) == z);
    }
}

TEST_CASE("inverse map of the corner image along its ray is the rectangle corner") {
    auto& s = k2();
    cpx v = inverse_map(s.corners.z1(), s.params, s.corners, s.cfg);
    CHECK(std::abs(v - cpx(1, 1)) < 1e-9);
    cpx v3 = inverse_map(s.corners.z(2), s.params, s.corners, s.cfg);
    CHECK(std::abs(v3 - cpx(-1, -1)) < 1e-9);
}

TEST_CASE("inverse map at 4 against a trapezoid integral from infinity") {
    auto& s = k2();
    // int_4^inf (m - 1) du with u = 4 / t.
    const int N = 200000;
    cpx sum = 0.0;
    for (int k = 1; k <= N; ++k) {
        double t = double(k) / N;
        cpx f = (m_direct(4.0 / t, s.corners, s.params) - 1.0) * (4.0 / (t * t));
        sum += (k == N ? 0.5 : 1.0) * f;
    }
    // The t -> 0 end contributes f(0) / 2 where f(0) = lim 4 (m - 1) / t^2.
    double t0 = 1e-4;
    cpx f0 = (m_direct(4.0 / t0, s.corners, s.params) - 1.0) * (4.0 / (t0 * t0));
    sum += 0.5 * f0;
    cpx reference = 4.0 - sum / double(N);
    CHECK(std::abs(inverse_map(4.0, s.params, s.corners, s.cfg) - reference) < 1e-8);
}

TEST_CASE("phi(0) = 0 both ways") {
    auto& s = k2();
    CHECK(std::abs(inverse_map(0.0, s.params, s.corners, s.cfg)) < 1e-9);
    CHECK(forward_map(0.0, Chart::Inside, s.params, s.corners, s.cfg) == cpx(0.0));
}

TEST_CASE("inverse map is path independent within a homotopy class") {
    auto& s = k2();
    for (cpx z : {cpx(0.3, 0.5), cpx(0.2, 0.1), cpx(2.0, 1.5)}) {
        cpx radial = inverse_map(z, s.params, s.corners, s.cfg);
        cpx via = inverse_map(z, s.params, s.corners, s.cfg, MapPath{PathOrigin::Infinity, {cpx(0, 3), cpx(0.6, 2.5)}});
        cpx from_zero = inverse_map(z, s.params, s.corners, s.cfg, MapPath{PathOrigin::Zero, {}});
        CHECK(std::abs(radial - via) < 1e-8);
        CHECK(std::abs(radial - from_zero) < 1e-8);
    }
}

TEST_CASE("round trip forward(inverse(z)) on |z| = 3 and inside the image") {
    auto& s = k2();
    for (int k = 0; k < 10; ++k) {
        cpx z = std::polar(3.0, 2 * pi * (k + 0.25) / 10);
        cpx p = inverse_map(z, s.params, s.corners, s.cfg);
        CHECK(std::abs(forward_map(p, Chart::Outside, s.params, s.corners, s.cfg) - z) < 1e-6);
    }
    for (int k = 0; k < 10; ++k) {
        cpx p = std::polar(0.3 + 0.06 * k, 2 * pi * (k + 0.5) / 10);
        cpx z = forward_map(p, Chart::Inside, s.params, s.corners, s.cfg);
        cpx back = inverse_map(z, s.params, s.corners, s.cfg, MapPath{PathOrigin::Zero, {}});
        CHECK(std::abs(back - p) < 1e-6);
    }
}

TEST_CASE("forward map symmetry") {
    auto& s = k2();
    for (cpx p : {cpx(0.5, 0.3), cpx(2.0, 0.5), cpx(-0.2, 1.5)}) {
        Chart ch = (std::abs(p.real()) < 1 && std::abs(p.imag()) < 1) ? Chart::Inside : Chart::Outside;
        cpx a = forward_map(p, ch, s.params, s.corners, s.cfg);
        CHECK(std::abs(forward_map(-p, ch, s.params, s.corners, s.cfg) + a) < 1e-8);
        CHECK(std::abs(forward_map(std::conj(p), ch, s.params, s.corners, s.cfg) - std::conj(a)) < 1e-8);
    }
}

TEST_CASE("forward map sends rectangle corners to the corner images") {
    auto& s = k2();
    CHECK(forward_map(cpx(1, 1), Chart::Outside, s.params, s.corners, s.cfg) == s.corners.z1());
    CHECK(forward_map(cpx(-1, 1), Chart::Inside, s.params, s.corners, s.cfg) == s.corners.z(1));
}

TEST_CASE("chart domain errors and singular paths") {
    auto& s = k2();
    CHECK_THROWS_AS(forward_map(cpx(0.5, 0.5), Chart::Outside, s.params, s.corners, s.cfg), DomainError);
    CHECK_THROWS_AS(forward_map(cpx(2, 0.5), Chart::Inside, s.params, s.corners, s.cfg), DomainError);
    CHECK_THROWS_AS(inverse_map(0.1, s.params, s.corners, s.cfg, MapPath{PathOrigin::Infinity, {s.corners.z1()}}),
                    SingularPathError);
    CHECK_THROWS_AS(far_field_tail(0.5, s.corners, s.params), DomainError);
    SolverConfig wide = s.cfg;
    wide.r0 = 0.2;
    CHECK_THROWS_AS(forward_map(cpx(1.0, 0.95), Chart::Inside, s.params, s.corners, wide), NearSingularError);
}

TEST_CASE("far-field tail decays like 1/|z|") {
    auto& s = k2();
    double a = std::abs(far_field_tail(cpx(10, 3), s.corners, s.params));
    double b = std::abs(far_field_tail(cpx(100, 30), s.corners, s.params));
    CHECK(a / b == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("spiral seed satisfies its congruence") {
    auto& s = k2();
    for (Edge e : {Edge::Top, Edge::Right})
        for (int turns : {0, 1, 3}) {
            SpiralSeed seed = spiral_seed(e, s.corners, s.params, turns);
            double lhs = std::arg(seed.c0) + seed.theta + s.corners.tau(0) * seed.log_r;
            double target = e == Edge::Top ? pi : -pi / 2;
            CHECK(std::abs(std::remainder(lhs - target, 2 * pi)) < 1e-12);
        }
    SpiralSeed a = spiral_seed(Edge::Top, s.corners, s.params, 0);
    SpiralSeed b = spiral_seed(Edge::Top, s.corners, s.params, 1);
    CHECK(a.log_r - b.log_r == doctest::Approx(4 * pi * pi / s.params.lnK));
}

TEST_CASE("K = 1 top edge trace is the segment [i, 1 + i]") {
    auto s = solved(0.0);
    s.cfg.eps0 = 1e-3;
    auto t = trace_boundary(Edge::Top, s.params, s.corners, s.cfg);
    REQUIRE(t.terminal == TraceTerminal::ReachedAxis);
    for (cpx z : t.points) CHECK(std::abs(z.imag() - 1.0) < 1e-12);
    CHECK(std::abs(t.points.back()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("K = 2 traces: axis endpoints, step bound, hull, agreement with the forward map") {
    auto s = k2();
    s.cfg.eps0 = 1e-4;
    for (Edge e : {Edge::Top, Edge::Right}) {
        auto t = trace_boundary(e, s.params, s.corners, s.cfg);
        REQUIRE(t.terminal == TraceTerminal::ReachedAxis);
        cpx end = t.points.back();
        CHECK(std::abs(e == Edge::Top ? end.real() : end.imag()) < 1e-12);
        for (std::size_t k = 1; k < t.points.size(); ++k) {
            CHECK(std::abs(t.points[k] - t.points[k - 1]) <= 3 * s.cfg.eps0);
            CHECK(std::abs(t.points[k]) < 2 * std::sqrt(2.0));
        }
        // One turn deeper moves the endpoint by less than 10 eps0.
        auto deeper = trace_boundary(e, s.params, s.corners, s.cfg, spiral_seed(e, s.corners, s.params, 1));
        CHECK(std::abs(deeper.points.back() - end) < 10 * s.cfg.eps0);
        // The curve as a set: images of edge points lie on it.
        for (double u : {0.2, 0.5, 0.9}) {
            cpx p = e == Edge::Top ? cpx(u, 1.0) : cpx(1.0, u);
            cpx img = forward_map(p, Chart::Outside, s.params, s.corners, s.cfg);
            CHECK(distance_to_polyline(img, t.points) < 1e-6);
        }
        // Axis endpoints are the images of i and 1.
        cpx axis = e == Edge::Top ? cpx(0, 1) : cpx(1, 0);
        CHECK(std::abs(forward_map(axis, Chart::Outside, s.params, s.corners, s.cfg) - end) < 1e-6);
    }
}

TEST_CASE("trace step limit is reported") {
    auto s = k2();
    s.cfg.max_trace_steps = 50;
    auto t = trace_boundary(Edge::Top, s.params, s.corners, s.cfg);
    CHECK(t.terminal == TraceTerminal::StepLimit);
    CHECK(t.steps == 50);
}

TEST_CASE("full boundary: eight symmetric copies closed at the corners") {
    auto s = k2();
    s.cfg.eps0 = 1e-3;
    auto top = trace_boundary(Edge::Top, s.params, s.corners, s.cfg);
    auto right = trace_boundary(Edge::Right, s.params, s.corners, s.cfg);
    auto all = full_boundary(top, right, s.corners);
    REQUIRE(all.size() == 8);
    CHECK(all[0].front() == s.corners.z1());
    for (std::size_t k = 0; k < all[0].size(); ++k) {
        CHECK(all[1][k] == -std::conj(all[0][k]));
        CHECK(all[2][k] == std::conj(all[0][k]));
        CHECK(all[3][k] == -all[0][k]);
    }
}
