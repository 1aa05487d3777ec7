#include <catch2/catch_amalgamated.hpp>

#include "stalight/mbe.hpp"
#include "stalight/raman.hpp"

using namespace stalight;
using Catch::Approx;

namespace {
carray gauss(const Grid& g, double c, double s) {
    carray v(static_cast<size_t>(g.n_xi));
    for (int i = 0; i < g.n_xi; ++i) {
        const double u = (g.xi(i) - c) / s;
        v[static_cast<size_t>(i)] = std::exp(-0.5 * u * u);
    }
    return v;
}
} // namespace

TEST_CASE("decompose splits mean and zero-mean parts") {
    Grid g(257);
    SECTION("pure sine has no uniform part") {
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = std::sin(2.0 * M_PI * g.xi(i));
        const auto dec = decompose(s, g);
        REQUIRE(std::abs(dec.uniform) < 1e-12);
        REQUIRE(rel_l2_diff(dec.stationary, s, g) < 1e-12);
    }
    SECTION("constant is all uniform") {
        carray s(static_cast<size_t>(g.n_xi), complexd(0.3, -0.7));
        const auto dec = decompose(s, g);
        REQUIRE(std::abs(dec.uniform - complexd(0.3, -0.7)) < 1e-14);
        REQUIRE(l2_norm(dec.stationary, g) < 1e-13);
    }
    SECTION("linear ramp") {
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = g.xi(i);
        const auto dec = decompose(s, g);
        REQUIRE(dec.uniform.real() == Approx(0.5).margin(1e-12));
        for (int i = 0; i < g.n_xi; ++i) REQUIRE(std::abs(dec.stationary[i] - (g.xi(i) - 0.5)) < 1e-12);
    }
    SECTION("reconstruction is exact") {
        carray s = gauss(g, 0.3, 0.1);
        const auto dec = decompose(s, g);
        for (int i = 0; i < g.n_xi; ++i) REQUIRE(std::abs(dec.stationary[i] + dec.uniform - s[i]) < 1e-14);
    }
}

TEST_CASE("probe fields from the spinwave integrals") {
    Grid g(257);
    RamanParams p{complexd(0.5, 0.0), 50.0, 0.0};

    SECTION("constant spinwave gives linear probes") {
        const complexd s0(1.0, 0.5);
        carray s(static_cast<size_t>(g.n_xi), s0);
        auto [ep, em] = probe_fields_from_spinwave(s, 100.0, p, g);
        const complexd pref = complexd(0.0, std::sqrt(100.0)) * (p.omega / p.delta);
        for (int i = 0; i < g.n_xi; ++i) {
            REQUIRE(std::abs(ep[i] - pref * s0 * g.xi(i)) < 1e-12);
            REQUIRE(std::abs(em[i] - pref * s0 * (1.0 - g.xi(i))) < 1e-12);
        }
    }
    SECTION("zero-mean spinwave emits nothing at the edges") {
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = std::sin(2.0 * M_PI * g.xi(i));
        auto [ep, em] = probe_fields_from_spinwave(s, 100.0, p, g);
        REQUIRE(std::abs(ep.back()) < 1e-12);
        REQUIRE(std::abs(em.front()) < 1e-12);
    }
    SECTION("opposite-phase Gaussian pair traps a standing field between the lobes") {
        carray ga = gauss(g, 0.3, 0.05), gb = gauss(g, 0.7, 0.05);
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = ga[i] - gb[i];
        auto [ep, em] = probe_fields_from_spinwave(s, 100.0, p, g);
        const int mid = g.n_xi / 2;
        REQUIRE(std::abs(ep[mid]) > 20.0 * std::abs(ep.back()));
        REQUIRE(std::abs(em[mid]) > 20.0 * std::abs(em.front()));
        REQUIRE(std::abs(ep[mid]) > 0.0);
        // outside the lobes the field is ~0
        REQUIRE(std::abs(ep[g.n_xi / 16]) < 0.05 * std::abs(ep[mid]));
    }
    SECTION("Delta = 0 is rejected") {
        RamanParams bad{1.0, 0.0, 0.0};
        carray s(static_cast<size_t>(g.n_xi), 1.0);
        REQUIRE_THROWS_AS(probe_fields_from_spinwave(s, 100.0, bad, g), domain_error);
    }
}

TEST_CASE("closed-form evolution") {
    Grid g(257);
    SECTION("uniform spinwave decays at d Gamma Omega^2 / Delta^2") {
        RamanParams p{1.0, 50.0, 0.0};
        carray s(static_cast<size_t>(g.n_xi), 1.0);
        carray st = evolve_raman_analytic(s, 100.0, kGamma, p, 25.0);
        const double expected = std::exp(-0.04 * 25.0);
        for (int i = 0; i < g.n_xi; ++i) REQUIRE(std::abs(st[i] - expected) < 1e-9);
    }
    SECTION("zero-mean spinwave is invariant when gamma = 0") {
        RamanParams p{1.0, 50.0, 0.0};
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = std::sin(4.0 * M_PI * g.xi(i));
        carray st = evolve_raman_analytic(s, 100.0, kGamma, p, 1000.0);
        REQUIRE(rel_l2_diff(st, s, g) < 1e-9);
    }
    SECTION("Omega = 0 leaves only the gamma decay") {
        RamanParams p{0.0, 50.0, 0.125};
        carray s = gauss(g, 0.4, 0.1);
        carray st = evolve_raman_analytic(s, 100.0, kGamma, p, 8.0);
        for (int i = 0; i < g.n_xi; ++i) REQUIRE(std::abs(st[i] - s[i] * std::exp(-1.0)) < 1e-12);
    }
}

TEST_CASE("numeric integrator against the closed form") {
    Grid g(257);
    RamanParams p{1.0, 50.0, 0.0};
    const double d = 100.0;

    SECTION("uniform decay matches to 1e-3") {
        carray s(static_cast<size_t>(g.n_xi), 1.0);
        const double t = 40.0;
        carray num = evolve_raman_numeric(s, d, kGamma, p, t);
        carray ana = evolve_raman_analytic(s, d, kGamma, p, t);
        REQUIRE(rel_l2_diff(num, ana, g) < 1e-3);
    }
    SECTION("stationary subspace is numerically invariant") {
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = std::sin(2.0 * M_PI * g.xi(i));
        carray num = evolve_raman_numeric(s, d, kGamma, p, 100.0);
        REQUIRE(rel_l2_diff(num, s, g) < 1e-3);
    }
    SECTION("symmetric pair relaxes to zero mean while emitting transients") {
        carray ga = gauss(g, 0.3, 0.06), gb = gauss(g, 0.7, 0.06);
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = ga[i] + gb[i];
        const double u0 = std::abs(decompose(s, g).uniform);

        double peak_edge_flux = 0.0, final_edge_flux = 0.0;
        auto observer = [&](double t, const carray& sv) {
            auto [ep, em] = probe_fields_from_spinwave(sv, d, p, g);
            const double f = std::norm(ep.back()) + std::norm(em.front());
            peak_edge_flux = std::max(peak_edge_flux, f);
            if (t > 99.0) final_edge_flux = std::max(final_edge_flux, f);
        };
        carray sf = evolve_raman_numeric(s, d, kGamma, p, 100.0, 0.0, observer);
        REQUIRE(std::abs(decompose(sf, g).uniform) < 0.02 * u0);
        REQUIRE(final_edge_flux < 1e-3 * peak_edge_flux); // transients died out
        REQUIRE(peak_edge_flux > 0.0);
    }
    SECTION("antisymmetric pair only decays globally") {
        carray ga = gauss(g, 0.3, 0.06), gb = gauss(g, 0.7, 0.06);
        carray s(static_cast<size_t>(g.n_xi));
        for (int i = 0; i < g.n_xi; ++i) s[i] = ga[i] - gb[i];
        carray sf = evolve_raman_numeric(s, d, kGamma, p, 50.0);
        REQUIRE(rel_l2_diff(sf, s, g) < 1e-3);
    }
}

TEST_CASE("fitted decay of the uniform component over two decades") {
    Grid g(257);
    RamanParams p{1.0, 50.0, 0.01};
    const double d = 100.0;
    carray s(static_cast<size_t>(g.n_xi), 1.0);
    darray ts, us;
    auto observer = [&](double t, const carray& sv) {
        const double u = std::abs(decompose(sv, g).uniform);
        if (u > 1e-2) { // two decades from u(0) = 1
            ts.push_back(t);
            us.push_back(u);
        }
    };
    evolve_raman_numeric(s, d, kGamma, p, 120.0, 0.0, observer);
    const double rate = fitted_decay_rate(ts, us);
    REQUIRE(rate == Approx(p.sl_rate(d) + p.gamma).epsilon(0.02));
}

TEST_CASE("global phase covariance") {
    Grid g(129);
    RamanParams p{1.0, 50.0, 0.0};
    carray s = gauss(g, 0.4, 0.1);
    const complexd phase = std::polar(1.0, 1.234);
    carray s_rot(s.size());
    for (size_t i = 0; i < s.size(); ++i) s_rot[i] = s[i] * phase;
    carray a = evolve_raman_numeric(s, 100.0, kGamma, p, 10.0);
    carray b = evolve_raman_numeric(s_rot, 100.0, kGamma, p, 10.0);
    for (size_t i = 0; i < s.size(); ++i) REQUIRE(std::abs(b[i] - a[i] * phase) < 1e-12);
}

TEST_CASE("frame consistency with the full model") {
    // evolve the same physical state in mbe (lab frame) and in the raman
    // module (rotated frame); after mapping, fields agree to 5%.
    Grid g(257);
    const double d = 100.0, delta = 50.0;
    RamanParams p{0.4, delta, 0.0};

    carray ga = gauss(g, 0.3, 0.06), gb = gauss(g, 0.7, 0.06);
    carray s0(static_cast<size_t>(g.n_xi));
    for (int i = 0; i < g.n_xi; ++i) s0[i] = ga[i] + gb[i]; // radiating configuration

    EnsembleConfig cfg{d, 0.0, 0.0, 0.0};
    ControlSchedule ctrl;
    ctrl.omega_plus = PiecewiseSchedule::constant(p.omega);
    ctrl.omega_minus = PiecewiseSchedule::constant(p.omega);
    ctrl.delta_plus = delta;
    ctrl.delta_minus = -delta;
    SimulationGrid sim{257, 0.001, 20.0};
    FieldState init = FieldState::zero(g);
    for (int i = 0; i < g.n_xi; ++i) init.s[i] = s0[i] * std::polar(1.0, d * kGamma * g.xi(i) / delta);

    Trajectory traj = run(cfg, sim, ctrl, BoundaryDrive::none(), init, 1 << 20);
    const FieldState mapped = raman_frame_from_mbe(traj.final_state, d, delta);

    carray s_raman = evolve_raman_numeric(s0, d, kGamma, p, 20.0);
    auto [ep, em] = probe_fields_from_spinwave(s_raman, d, p, g);
    REQUIRE(rel_l2_diff(mapped.s, s_raman, g) < 0.05);
    REQUIRE(rel_l2_diff(mapped.e_plus, ep, g) < 0.05);
    REQUIRE(rel_l2_diff(mapped.e_minus, em, g) < 0.05);
}

TEST_CASE("raman parameter validation") {
    RamanParams ok{1.0, 50.0, 0.0};
    REQUIRE_FALSE(ok.validate().has_value());
    RamanParams marginal{1.0, 15.0, 0.0};
    REQUIRE(marginal.validate().has_value()); // warns
    RamanParams bad{1.0, 5.0, 0.0};
    REQUIRE_THROWS_AS(bad.validate(), domain_error);
}
