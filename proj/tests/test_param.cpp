#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "qcs/param_solver.hpp"

using namespace qcs;

namespace {

const cpx kZ1K2(1.24807511157, 0.767644410560);
const cpx kZ1K50(1.91325407086, 0.00947285966959);
const double kLn10 = std::log(10.0);

}  // namespace

TEST_CASE("xi is the identity for K = 1") {
    auto p = DilatationParams::square(0.0);
    SolverConfig cfg;
    for (cpx z : {cpx(1, 1), cpx(0.3, 2.0), cpx(2.5, 0.1)}) CHECK(std::abs(xi(z, p, cfg).xi - z) < 1e-13);
}

TEST_CASE("xi at the tabulated K = 2 corner is 1 + i") {
    auto e = xi(kZ1K2, DilatationParams::square(std::log(2.0)), SolverConfig{});
    CHECK(std::abs(e.xi.real() - 1.0) < 1e-9);
    CHECK(std::abs(e.xi.imag() - 1.0) < 1e-9);
    CHECK(e.steps > 0);
    CHECK(e.xi == cpx((e.Ia + e.Ib).real(), (e.Ic + e.Ib).imag()));
}

TEST_CASE("xi is homogeneous of degree one") {
    SolverConfig cfg;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0.05, pi / 2 - 0.05), rad(0.5, 2.5);
    for (double lnK : {std::log(2.0), std::log(100.0)}) {
        auto p = DilatationParams::square(lnK);
        for (int k = 0; k < 10; ++k) {
            cpx z = std::polar(rad(rng), ang(rng));
            cpx base = xi(z, p, cfg).xi;
            for (double lambda : {0.5, 2.0}) {
                cpx scaled = xi(lambda * z, p, cfg).xi;
                CHECK(std::abs(scaled - lambda * base) < 1e-8 * std::abs(lambda * base));
            }
        }
    }
}

TEST_CASE("xi rejects points off the open quadrant") {
    auto p = DilatationParams::square(1.0);
    CHECK_THROWS_AS(xi(cpx(1.0, 0.0), p, SolverConfig{}), DomainError);
    CHECK_THROWS_AS(xi(cpx(0.0, 1.0), p, SolverConfig{}), DomainError);
}

TEST_CASE("solve_corner: K = 1 gives the rectangle corner") {
    SolverConfig cfg;
    auto s = solve_corner(DilatationParams::square(0.0), cfg);
    CHECK(std::abs(s.corners.z1() - cpx(1, 1)) < 1e-14);
    auto r = solve_corner(DilatationParams{0.0, 2.0, 1.0}, cfg);
    CHECK(std::abs(r.corners.z1() - cpx(2, 1)) < 1e-13);
}

TEST_CASE("solve_corner: K = 2") {
    SolverConfig cfg;
    auto s = solve_corner(DilatationParams::square(std::log(2.0)), cfg);
    CHECK(std::abs(s.corners.z1().real() - kZ1K2.real()) < 1e-9);
    CHECK(std::abs(s.corners.z1().imag() - kZ1K2.imag()) < 1e-9);
    CHECK(s.iterations <= 20);
    CHECK(s.steps == 2167);
}

TEST_CASE("solve_corner: K = 10 and K = 1e50") {
    SolverConfig cfg;
    auto s10 = solve_corner(DilatationParams::square(std::log(10.0)), cfg);
    CHECK(std::abs(s10.corners.z1() - cpx(1.6483, 0.4276)) < 1e-4);
    auto s50 = solve_corner(DilatationParams::square(50 * kLn10), cfg);
    CHECK(std::abs(s50.corners.z1().real() - kZ1K50.real()) < 1e-9);
    CHECK(std::abs(s50.corners.z1().imag() - kZ1K50.imag()) < 1e-9);
    // Same through the rounded logK the command line accepts.
    auto lk = solve_corner(DilatationParams::square(115.1292546497), cfg);
    CHECK(std::abs(lk.corners.z1() - s50.corners.z1()) < 1e-9);
}

TEST_CASE("solution consistency: xi(z1) = w + ih") {
    SolverConfig cfg;
    for (auto p : {DilatationParams::square(1.0), DilatationParams{2.0, 1.0, 0.5}, DilatationParams{5.0, 0.7, 1.3}}) {
        auto s = solve_corner(p, cfg);
        cpx x = xi(s.corners.z1(), p, cfg).xi;
        CHECK(std::abs(x - p.target()) < 1e-10 * (p.half_width + p.half_height));
    }
}

TEST_CASE("rectangle scaling: doubling w and h doubles z1") {
    SolverConfig cfg;
    auto a = solve_corner(DilatationParams{2.0, 1.0, 0.5}, cfg);
    auto b = solve_corner(DilatationParams{2.0, 2.0, 1.0}, cfg);
    CHECK(std::abs(b.corners.z1() - 2.0 * a.corners.z1()) < 1e-9);
}

TEST_CASE("sweep over K: monotone trends and bounds") {
    SolverConfig cfg;
    std::vector<double> logs10{std::log10(2.0), 1, 2, 4, 6, 9, 12, 20, 50};
    cpx prev;
    std::optional<double> guess;
    for (std::size_t k = 0; k < logs10.size(); ++k) {
        double lnK = logs10[k] * kLn10;
        auto s = solve_corner(DilatationParams::square(lnK), cfg, guess);
        guess = s.theta1;  // chained warm start
        cpx z = s.corners.z1();
        CHECK(std::abs(z) <= 2 * std::sqrt(2.0));
        CHECK(z.real() * z.imag() * lnK < 4.0);
        if (k > 0) {
            CHECK(z.imag() < prev.imag());
            CHECK(z.real() > prev.real());
        }
        prev = z;
    }
}

TEST_CASE("warm start does not change the answer") {
    SolverConfig cfg;
    auto p = DilatationParams::square(6 * kLn10);
    auto cold = solve_corner(p, cfg);
    auto warm = solve_corner(p, cfg, cold.theta1 * 1.1);
    CHECK(std::abs(cold.corners.z1() - warm.corners.z1()) < 1e-11);
}

TEST_CASE("coarse tabulated rows and step counts") {
    struct Row {
        double lnK, d0, r0;
        cpx z1;
        long long steps;
    };
    // Rows with d0 = 0.2 for several K; values are truncated to 4 decimals.
    for (Row r : {Row{std::log(2.0), 0.2, 0.01, cpx(1.2480, 0.7676), 38},
                  Row{std::log(10.0), 0.2, 0.01, cpx(1.6483, 0.4276), 37},
                  Row{50 * kLn10, 0.2, 2e-4, cpx(1.9132, 0.00947), 53}}) {
        SolverConfig cfg;
        cfg.d0 = r.d0;
        cfg.r0 = r.r0;
        auto s = solve_corner(DilatationParams::square(r.lnK), cfg);
        CHECK(std::abs(s.corners.z1().real() - r.z1.real()) < 1e-4);
        CHECK(std::abs(s.corners.z1().imag() - r.z1.imag()) < 1e-4);
        CHECK(s.steps == r.steps);
    }
}

TEST_CASE("efficiency: K = 2 at r0 = 1e-5") {
    SolverConfig cfg;
    cfg.r0 = 1e-5;
    auto s = solve_corner(DilatationParams::square(std::log(2.0)), cfg);
    CHECK(s.steps < 10000);
    CHECK(s.steps == doctest::Approx(1480).epsilon(0.01));
}

TEST_CASE("secant failure carries the last iterate") {
    SolverConfig cfg;
    cfg.max_secant_iters = 1;
    try {
        solve_corner(DilatationParams::square(std::log(2.0)), cfg);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.last_iterate > 0);
        CHECK(e.last_iterate < pi / 2);
        CHECK(e.residual > 0);
    }
}

TEST_CASE("invalid configuration") {
    SolverConfig cfg;
    cfg.d0 = -1;
    CHECK_THROWS_AS(solve_corner(DilatationParams::square(1.0), cfg), ConfigError);
    CHECK_THROWS(solve_corner(DilatationParams{1.0, -1.0, 1.0}, SolverConfig{}));
}
