#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stalight/numerics.hpp"

using namespace stalight;
using Catch::Approx;

TEST_CASE("integrate_xi on constants") {
    Grid g(64);
    carray ones(64, 1.0);

    SECTION("from the left gives xi") {
        carray out = integrate_xi(ones, true, g);
        for (int i = 0; i < g.n_xi; ++i) REQUIRE(out[i].real() == Approx(g.xi(i)).margin(1e-14));
    }
    SECTION("from the right gives xi - 1") {
        carray out = integrate_xi(ones, false, g);
        for (int i = 0; i < g.n_xi; ++i) REQUIRE(out[i].real() == Approx(g.xi(i) - 1.0).margin(1e-14));
    }
}

TEST_CASE("integrate_xi of a full sine period vanishes at the far end") {
    Grid g(512);
    carray f(512);
    for (int i = 0; i < 512; ++i) f[i] = std::sin(2.0 * M_PI * g.xi(i));
    carray out = integrate_xi(f, true, g);
    REQUIRE(std::abs(out.back()) <= 1e-6);
}

TEST_CASE("integrate_xi is linear and the two base points agree") {
    Grid g(97);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    carray f(97), h(97);
    for (int i = 0; i < 97; ++i) {
        f[i] = complexd(u(rng), u(rng));
        h[i] = complexd(u(rng), u(rng));
    }
    const complexd a(0.7, -0.3), b(-1.2, 0.4);

    carray combo(97);
    for (int i = 0; i < 97; ++i) combo[i] = a * f[i] + b * h[i];
    carray left = integrate_xi(combo, true, g);
    carray lf = integrate_xi(f, true, g);
    carray lh = integrate_xi(h, true, g);
    for (int i = 0; i < 97; ++i) REQUIRE(std::abs(left[i] - (a * lf[i] + b * lh[i])) < 1e-13);

    carray right = integrate_xi(combo, false, g);
    REQUIRE(std::abs(left.back() - (-right.front())) < 1e-13);
}

TEST_CASE("envelope moments of a Gaussian") {
    Grid g(513);
    const double c = 0.4, s = 0.05;
    carray f(513);
    for (int i = 0; i < 513; ++i) {
        const double u2 = (g.xi(i) - c) / s;
        f[i] = std::exp(-0.5 * u2 * u2);
    }
    const EnvelopeMoments m = envelope_moments(f, g);
    REQUIRE(m.centroid == Approx(c).margin(1e-6));
    // amplitude-profile variance convention: width_sq equals sigma^2
    REQUIRE(m.width_sq == Approx(s * s).epsilon(1e-3));
}

TEST_CASE("2x2 matrix exponential") {
    SECTION("diagonal") {
        Mat2 m{complexd(-2.0, 1.0), 0.0, 0.0, complexd(0.5, -3.0)};
        Mat2 e = expm(m);
        REQUIRE(std::abs(e.a - std::exp(m.a)) < 1e-12);
        REQUIRE(std::abs(e.d - std::exp(m.d)) < 1e-12);
        REQUIRE(std::abs(e.b) < 1e-14);
    }
    SECTION("nilpotent") {
        // [[0, x], [0, 0]] -> I + m
        Mat2 m{0.0, complexd(3.0, -2.0), 0.0, 0.0};
        Mat2 e = expm(m);
        REQUIRE(std::abs(e.a - 1.0) < 1e-13);
        REQUIRE(std::abs(e.b - m.b) < 1e-13);
    }
    SECTION("rotation block has unit determinant") {
        Mat2 m{0.0, 2.5, -2.5, 0.0};
        Mat2 e = expm(m);
        const complexd det = e.a * e.d - e.b * e.c;
        REQUIRE(std::abs(det - 1.0) < 1e-12);
        REQUIRE(std::abs(e.a - std::cos(2.5)) < 1e-12);
        REQUIRE(std::abs(e.b - std::sin(2.5)) < 1e-12);
    }
    SECTION("det(expm) = exp(tr)") {
        // checked on a moderate matrix: for stiff ones the explicit
        // determinant cancels catastrophically, which is exactly why the
        // solver uses exp(tr) instead of computing it
        Mat2 m{complexd(-2.0, 3.0), complexd(1.5, 1.0), complexd(-0.8, 0.5), complexd(2.2, -2.0)};
        Mat2 e = expm(m);
        const complexd det = e.a * e.d - e.b * e.c;
        REQUIRE(std::abs(det / std::exp(m.trace()) - 1.0) < 1e-12);
    }
    SECTION("squaring consistency: expm(m)^2 = expm(2m)") {
        Mat2 m{complexd(-8.0, 30.0), complexd(14.0, 1.0), complexd(-3.0, 0.5), complexd(7.0, -20.0)};
        Mat2 a = expm(m);
        Mat2 sq = a * a;
        Mat2 b = expm(m.scaled(2.0));
        REQUIRE(std::abs(sq.a - b.a) <= 1e-10 * b.max_abs());
        REQUIRE(std::abs(sq.b - b.b) <= 1e-10 * b.max_abs());
        REQUIRE(std::abs(sq.c - b.c) <= 1e-10 * b.max_abs());
        REQUIRE(std::abs(sq.d - b.d) <= 1e-10 * b.max_abs());
    }
}

TEST_CASE("fitted decay rate recovers a known exponential") {
    darray t, y;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        y.push_back(3.0 * std::exp(-0.37 * 0.1 * i));
    }
    REQUIRE(fitted_decay_rate(t, y) == Approx(0.37).epsilon(1e-10));
}
