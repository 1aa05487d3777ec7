#include <catch2/catch_amalgamated.hpp>

#include "stalight/hoc.hpp"
#include "stalight/mbe.hpp"

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

ControlSchedule balanced(double om, double delta = 0.0) {
    ControlSchedule ctrl;
    ctrl.omega_plus = PiecewiseSchedule::constant(om);
    ctrl.omega_minus = PiecewiseSchedule::constant(om);
    ctrl.delta_plus = delta;
    ctrl.delta_minus = delta;
    return ctrl;
}

} // namespace

TEST_CASE("ladder with cross couplings disabled reduces to the secular system") {
    // n_max = 0 carries only sigma_12^(0) and sigma_13^(+-1); the hoc sign
    // convention -(Gamma - i Delta) maps onto the mbe one with
    // Delta_+ = Delta_- = -Delta.
    Grid g(129);
    EnsembleConfig cfg{50.0, 0.0, 0.0, 0.0};
    const double delta = 2.0;
    SimulationGrid sim{129, 0.01, 5.0};
    const carray s0 = gauss(g, 0.5, 0.1);

    HOCTrajectory hoc = run_hoc(cfg, sim, balanced(1.0, delta), HOCDecayModel{0.0, 2}, BoundaryDrive::none(),
                                HOCState::from_spinwave(s0, 0), 1 << 20);

    ControlSchedule mbe_ctrl = balanced(1.0);
    mbe_ctrl.delta_plus = -delta;
    mbe_ctrl.delta_minus = -delta;
    FieldState init = FieldState::zero(g);
    init.s = s0;
    Trajectory sec = run(cfg, sim, mbe_ctrl, BoundaryDrive::none(), init, 1 << 20);

    REQUIRE(rel_l2_diff(hoc.final_state.order0(), sec.final_state.s, g) < 1e-10);
    REQUIRE(rel_l2_diff(hoc.final_state.p.at(1), sec.final_state.p_plus, g) < 1e-10);
}

TEST_CASE("hot-atom limit recovers the secular hold") {
    Grid g(129);
    EnsembleConfig cfg{50.0, 0.0, 0.0, 0.0};
    SimulationGrid sim{129, 0.02, 8.0};
    const carray s0 = gauss(g, 0.2, 0.06);

    HOCTrajectory hot = run_hoc(cfg, sim, balanced(1.0), HOCDecayModel{1000.0, 2}, BoundaryDrive::none(),
                                HOCState::from_spinwave(s0, 3), 1 << 20);
    FieldState init = FieldState::zero(g);
    init.s = s0;
    Trajectory sec = run(cfg, sim, balanced(1.0), BoundaryDrive::none(), init, 1 << 20);

    const double leak_sec = sec.bookkeeping.back().flux_out;
    REQUIRE(hot.leaked == Approx(leak_sec).epsilon(0.05));
    REQUIRE(rel_l2_diff(hot.final_state.order0(), sec.final_state.s, g) < 0.05);
}

TEST_CASE("stationary atoms leak much more than the secular reference") {
    Grid g(129);
    EnsembleConfig cfg{50.0, 0.0, 0.0, 0.0};
    SimulationGrid sim{129, 0.02, 8.0};
    const carray s0 = gauss(g, 0.2, 0.06);

    HOCTrajectory cold = run_hoc(cfg, sim, balanced(1.0), HOCDecayModel{0.0, 2}, BoundaryDrive::none(),
                                 HOCState::from_spinwave(s0, 4), 1 << 20);
    FieldState init = FieldState::zero(g);
    init.s = s0;
    Trajectory sec = run(cfg, sim, balanced(1.0), BoundaryDrive::none(), init, 1 << 20);
    REQUIRE(cold.leaked >= 2.0 * sec.bookkeeping.back().flux_out);
}

TEST_CASE("truncation certificate") {
    Grid g(129);
    EnsembleConfig cfg{50.0, 0.0, 0.0, 0.0};
    SimulationGrid sim{129, 0.02, 8.0};
    const carray s0 = gauss(g, 0.2, 0.06);

    auto run_at = [&](int n_max, double gm) {
        return run_hoc(cfg, sim, balanced(1.0), HOCDecayModel{gm, 2}, BoundaryDrive::none(),
                       HOCState::from_spinwave(s0, n_max), 1 << 20);
    };

    SECTION("identical runs have zero difference") {
        HOCTrajectory a = run_at(2, 0.0);
        HOCTrajectory b = run_at(2, 0.0);
        REQUIRE(truncation_check(a.final_state, b.final_state) == 0.0);
    }
    SECTION("huge motional decay converges at any order") {
        HOCTrajectory a = run_at(1, 1000.0);
        HOCTrajectory b = run_at(2, 1000.0);
        REQUIRE(truncation_check(a.final_state, b.final_state) < 1e-8);
    }
    SECTION("stationary atoms converge by n_max = 3 on the hold preset") {
        HOCTrajectory a = run_at(3, 0.0);
        HOCTrajectory b = run_at(4, 0.0);
        REQUIRE(truncation_check(a.final_state, b.final_state) < 0.05);
    }
    SECTION("difference shrinks with order") {
        const HOCTrajectory r2 = run_at(2, 0.0);
        const HOCTrajectory r3 = run_at(3, 0.0);
        const HOCTrajectory r4 = run_at(4, 0.0);
        const HOCTrajectory r5 = run_at(5, 0.0);
        const double d23 = truncation_check(r2.final_state, r3.final_state);
        const double d34 = truncation_check(r3.final_state, r4.final_state);
        const double d45 = truncation_check(r4.final_state, r5.final_state);
        REQUIRE(d34 < d23);
        REQUIRE(d45 < d34);
    }
    SECTION("mismatched grids are rejected") {
        HOCTrajectory a = run_at(2, 0.0);
        HOCState other = HOCState::zero(Grid(65), 2);
        REQUIRE_THROWS_AS(truncation_check(a.final_state, other), shape_error);
    }
}

TEST_CASE("hermitian mirror symmetry of the +-2n orders") {
    // real controls and a real symmetric initial spinwave: s_(-q)(xi) is the
    // conjugate mirror of s_(+q)(xi)
    Grid g(129);
    EnsembleConfig cfg{40.0, 0.0, 0.0, 0.0};
    SimulationGrid sim{129, 0.02, 4.0};
    const carray s0 = gauss(g, 0.5, 0.08);
    HOCTrajectory traj = run_hoc(cfg, sim, balanced(1.0), HOCDecayModel{0.1, 2}, BoundaryDrive::none(),
                                 HOCState::from_spinwave(s0, 3), 1 << 20);
    for (int q = 2; q <= 6; q += 2) {
        const carray& plus = traj.final_state.s.at(q);
        const carray& minus = traj.final_state.s.at(-q);
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < g.n_xi; ++i) {
            worst = std::max(worst, std::abs(plus[i] - std::conj(minus[g.n_xi - 1 - i])));
            scale = std::max(scale, std::abs(plus[i]));
        }
        REQUIRE(worst <= 1e-6 * std::max(scale, 1e-30) + 1e-12);
    }
}

TEST_CASE("leakage is non-increasing in the motional decay") {
    Grid g(129);
    EnsembleConfig cfg{50.0, 0.0, 0.0, 0.0};
    SimulationGrid sim{129, 0.02, 8.0};
    const carray s0 = gauss(g, 0.2, 0.06);
    double prev = 1e300;
    for (double gm : {0.0, 0.3, 1.0, 10.0, 1000.0}) {
        HOCTrajectory traj = run_hoc(cfg, sim, balanced(1.0), HOCDecayModel{gm, 2}, BoundaryDrive::none(),
                                     HOCState::from_spinwave(s0, 3), 1 << 20);
        REQUIRE(traj.leaked <= prev * (1.0 + 1e-9));
        prev = traj.leaked;
    }
}

TEST_CASE("non-degenerate controls are rejected with guidance") {
    Grid g(64);
    EnsembleConfig cfg{50.0, 0.0, 0.0, 0.0};
    ControlSchedule ctrl = balanced(1.0);
    ctrl.delta_minus = 5.0;
    REQUIRE_THROWS_MATCHES(step_hoc(HOCState::zero(g, 2), cfg, ctrl, HOCDecayModel{}, BoundaryDrive::none(), 0.0, 0.01),
                           unsupported_error,
                           Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("mbe")));
}

TEST_CASE("decay model validation and rates") {
    REQUIRE_THROWS_AS((HOCDecayModel{-1.0, 2}.validate()), range_error);
    REQUIRE_THROWS_AS((HOCDecayModel{1.0, 3}.validate()), range_error);
    const HOCDecayModel m{0.5, 2};
    REQUIRE(m.spinwave_rate(0, 0.1) == Approx(0.1));
    REQUIRE(m.spinwave_rate(2, 0.1) == Approx(0.1 + 0.5));
    REQUIRE(m.spinwave_rate(-4, 0.1) == Approx(0.1 + 0.5 * 4.0));
    REQUIRE(m.excited_rate(1) == Approx(kGamma));  // ordinary P+- keep the bare linewidth
    REQUIRE(m.excited_rate(-3) == Approx(kGamma + 0.5 * 4.0));
}
