#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pilotwave/crank_nicolson.hpp"
#include "pilotwave/history.hpp"
#include "pilotwave/packets.hpp"
#include "pilotwave/split_operator.hpp"

using namespace pilotwave;

namespace {

AxisSpec axis(double lo, double hi, int n, const char* label = "x") {
    return AxisSpec{label, lo, hi, n};
}

}  // namespace

TEST_CASE("plane wave is an exact eigenstate of the free split step") {
    auto ax = axis(-16.0, 16.0, 128);
    auto f = make_plane_wave(ax, 1.5);
    const double k = snapped_wavenumber(ax, 1.5);
    const double dt = 1e-3;
    auto h = HamiltonianSpec::free_particle(1);
    auto g = step_split_operator(f, h, dt);
    const cplx phase = std::polar(1.0, -0.5 * k * k * dt);
    for (std::size_t i = 0; i < f.amp.size(); ++i)
        CHECK(std::abs(g.amp[i] - phase * f.amp[i]) < 1e-9);
}

TEST_CASE("free Gaussian reproduces the analytic spreading law to 0.1%") {
    auto ax = axis(-40.0, 40.0, 1024);
    const double w = 2.0;
    auto f = make_packet(ax, {PacketKind::gaussian, 0.0, w, 0.0});
    auto h = HamiltonianSpec::free_particle(1);
    const double dt = 2e-4;  // guard: k_nyq^2/2 * dt ~ 0.32
    SplitOperatorStepper stepper(f.spec, h, dt);
    const int steps = 10000;  // t = 2
    for (int s = 0; s < steps; ++s) f = stepper.step(f);
    const double t = steps * dt;
    CHECK(oracles::measured_sigma(f) ==
          doctest::Approx(oracles::gaussian_sigma(w, 1.0, t)).epsilon(1e-3));
    // Full complex profile agrees with the closed form, not just the width.
    auto ref = oracles::free_gaussian(ax, w, 0.0, 0.0, 1.0, t);
    CHECK(oracles::l2_distance(f, ref) < 1e-6);
}

TEST_CASE("harmonic ground state is stationary over one period") {
    const double omega = 1.0, m = 1.0;
    auto ax = axis(-12.0, 12.0, 256);
    // Ground state: amplitude width 1/sqrt(m*omega).
    auto f = make_packet(ax, {PacketKind::gaussian, 0.0, 1.0 / std::sqrt(m * omega), 0.0});
    HamiltonianSpec h;
    h.masses = {m};
    h.potential.form = PotentialSpec::Form::harmonic;
    h.potential.omegas = {omega};
    const double dt = 1e-3;
    SplitOperatorStepper stepper(f.spec, h, dt);
    auto psi = f;
    const int steps = static_cast<int>(std::round(2.0 * std::numbers::pi / dt));
    for (int s = 0; s < steps; ++s) psi = stepper.step(psi);
    CHECK(oracles::fidelity(f, psi) >= 1.0 - 1e-6);
}

TEST_CASE("unitarity and linearity of the split step") {
    auto ax = axis(-20.0, 20.0, 256);
    auto f = make_packet(ax, {PacketKind::gaussian, -3.0, 1.0, 2.0});
    auto g = make_packet(ax, {PacketKind::gaussian, 4.0, 1.5, -1.0});
    HamiltonianSpec h;
    h.masses = {1.0};
    h.potential.form = PotentialSpec::Form::harmonic;
    h.potential.omegas = {0.7};
    SplitOperatorStepper stepper(f.spec, h, 5e-4);

    auto psi = f;
    for (int s = 0; s < 1000; ++s) {
        psi = stepper.step(psi);
        CHECK(std::abs(std::sqrt(norm_squared(psi)) - 1.0) < 1e-10 * (s + 2));
    }

    const cplx c1(0.6, 0.2), c2(-0.3, 0.7);
    auto combo = superpose(c1, f, c2, g, false);
    auto lhs = stepper.step(combo);
    auto f1 = stepper.step(f);
    auto g1 = stepper.step(g);
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.amp.size(); ++i)
        err = std::max(err, std::abs(lhs.amp[i] - (c1 * f1.amp[i] + c2 * g1.amp[i])));
    CHECK(err < 1e-10);
}

TEST_CASE("energy is conserved to 1e-6 relative over 1e4 steps") {
    auto ax = axis(-12.0, 12.0, 256);
    HamiltonianSpec h;
    h.masses = {1.0};
    h.potential.form = PotentialSpec::Form::harmonic;
    h.potential.omegas = {1.0};
    // Coherent state: displaced ground state.
    auto f = make_packet(ax, {PacketKind::gaussian, 2.0, 1.0, 0.0});
    SplitOperatorStepper stepper(f.spec, h, 5e-4);
    const double e0 = energy_expectation(f, h);
    for (int s = 0; s < 10000; ++s) f = stepper.step(f);
    const double e1 = energy_expectation(f, h);
    CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-6);
}

TEST_CASE("stability guard rejects oversized steps") {
    auto ax = axis(-10.0, 10.0, 512);
    auto f = make_packet(ax, {PacketKind::gaussian, 0.0, 1.0, 0.0});
    auto h = HamiltonianSpec::free_particle(1);
    // Nyquist phase would exceed pi/4.
    CHECK_THROWS_AS(step_split_operator(f, h, 0.1), StepSizeError);
    CHECK_NOTHROW(step_split_operator(f, h, 1e-4));
}

TEST_CASE("split-operator dt halving shows second order against coherent oracle") {
    const double omega = 1.0, a0 = 2.0;
    auto ax = axis(-12.0, 12.0, 256);
    HamiltonianSpec h;
    h.masses = {1.0};
    h.potential.form = PotentialSpec::Form::harmonic;
    h.potential.omegas = {omega};
    auto psi0 = make_packet(ax, {PacketKind::gaussian, a0, 1.0, 0.0});
    const double T = 1.0;

    auto err_at = [&](double dt) {
        auto psi = psi0;
        SplitOperatorStepper st(psi.spec, h, dt);
        const int n = static_cast<int>(std::round(T / dt));
        for (int s = 0; s < n; ++s) psi = st.step(psi);
        // Coherent state: rigidly transported ground-state packet with a
        // position-dependent phase; compare densities to stay phase-free.
        const double xc = oracles::coherent_center(a0, omega, T);
        auto ref = make_packet(ax, {PacketKind::gaussian, xc, 1.0, 0.0});
        double err = 0.0;
        for (std::size_t i = 0; i < psi.amp.size(); ++i)
            err += std::pow(std::norm(psi.amp[i]) - std::norm(ref.amp[i]), 2);
        return std::sqrt(err * psi.spec.cell_volume());
    };

    const double e1 = err_at(5e-4);
    const double e2 = err_at(2.5e-4);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Crank-Nicolson is unitary and matches split-operator on smooth states") {
    auto ax = axis(-20.0, 20.0, 512);
    const double w = 5.6568542494923806;  // position std 4
    auto f = make_packet(ax, {PacketKind::gaussian, 0.0, w, 0.0});
    auto h = HamiltonianSpec::free_particle(1);
    const double dt = 5e-4;
    CrankNicolsonStepper cn(f.spec, h, dt);
    SplitOperatorStepper so(f.spec, h, dt);

    auto a = f, b = f;
    for (int s = 0; s < 1000; ++s) {
        a = cn.step(a);
        CHECK(std::abs(std::sqrt(norm_squared(a)) - 1.0) < 1e-10 * (s + 2));
    }
    for (int s = 0; s < 1000; ++s) b = so.step(b);
    CHECK(oracles::l2_distance(a, b) < 1e-4);
}

TEST_CASE("Crank-Nicolson constant field and dimension guard") {
    auto ax = axis(-8.0, 8.0, 64);
    GridSpec g;
    g.axes = {ax};
    std::vector<cplx> amp(64, cplx(0.25, 0.0));
    auto f = normalized(GridField(g, std::move(amp)));
    auto h = HamiltonianSpec::free_particle(1);
    auto out = step_crank_nicolson(f, h, 0.01);
    for (std::size_t i = 0; i < f.amp.size(); ++i)
        CHECK(std::abs(out.amp[i] - f.amp[i]) < 1e-12);

    // 3D is rejected.
    GridSpec g3;
    g3.axes = {axis(-4, 4, 16, "x"), axis(-4, 4, 16, "y"), axis(-4, 4, 16, "z")};
    auto f3 = GridField::zeros(g3);
    f3.amp[0] = 1.0;
    auto h3 = HamiltonianSpec::free_particle(3);
    CHECK_THROWS_AS(step_crank_nicolson(f3, h3, 0.01), ConfigurationError);
}

TEST_CASE("Crank-Nicolson handles separable 2D potentials") {
    GridSpec g;
    g.axes = {axis(-10.0, 10.0, 128, "x"), axis(-10.0, 10.0, 128, "y")};
    HamiltonianSpec h;
    h.masses = {1.0, 1.0};
    h.potential.form = PotentialSpec::Form::harmonic;
    h.potential.omegas = {0.7, 1.1};

    // Coherent state displaced along both axes.
    auto fx = make_packet(g.axes[0], {PacketKind::gaussian, 1.5, 1.0 / std::sqrt(0.7), 0.0});
    auto fy = make_packet(g.axes[1], {PacketKind::gaussian, -1.0, 1.0 / std::sqrt(1.1), 0.0});
    auto f = tensor_product(fx, fy);

    const double dt = 2e-3, T = 1.0;
    CrankNicolsonStepper cn(g, h, dt);
    auto psi = f;
    for (int s = 0; s < static_cast<int>(T / dt); ++s) {
        psi = cn.step(std::move(psi));
        REQUIRE(std::abs(std::sqrt(norm_squared(psi)) - 1.0) < 1e-10 * (s + 2));
    }

    // Density center follows the classical oscillation on each axis.
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < psi.amp.size(); ++i) {
        const auto idx = g.unflatten(i);
        const double w = std::norm(psi.amp[i]);
        cx += w * g.axes[0].center(idx[0]);
        cy += w * g.axes[1].center(idx[1]);
    }
    const double dv = g.cell_volume();
    cx *= dv;
    cy *= dv;
    CHECK(cx == doctest::Approx(1.5 * std::cos(0.7 * T)).epsilon(0.01));
    CHECK(cy == doctest::Approx(-1.0 * std::cos(1.1 * T)).epsilon(0.01));

    // Non-separable potential on 2D is rejected.
    HamiltonianSpec tab;
    tab.masses = {1.0, 1.0};
    tab.potential.form = PotentialSpec::Form::tabulated;
    tab.potential.table.assign(g.size(), 0.0);
    CHECK_THROWS_AS(CrankNicolsonStepper(g, tab, dt), ConfigurationError);
}

TEST_CASE("overlapping coupling windows are rejected") {
    GridSpec g;
    g.axes = {axis(-8.0, 8.0, 32, "x"), axis(-8.0, 8.0, 32, "y")};
    HamiltonianSpec h = HamiltonianSpec::free_particle(2);
    CouplingSchedule c;
    c.system_axis = 0;
    c.pointer_axis = 1;
    c.strength = 1.0;
    c.t0 = 0.0;
    c.t1 = 0.2;
    c.form = CouplingSchedule::Form::linear;
    auto c2 = c;
    c2.t0 = 0.1;
    c2.t1 = 0.3;
    h.couplings = {c, c2};
    CHECK_THROWS_AS(h.validate(g), ConfigurationError);

    h.couplings = {c};
    CHECK_NOTHROW(h.validate(g));
}

TEST_CASE("evolve rejects malformed schedules") {
    auto f = make_packet(axis(-10.0, 10.0, 64), {PacketKind::gaussian, 0.0, 1.0, 0.0});
    auto h = HamiltonianSpec::free_particle(1);
    // Span not an integer multiple of dt.
    CHECK_THROWS_AS(evolve(f, h, 0.0105, {1e-3, 1, Engine::split_operator}),
                    ConfigurationError);

    // Coupling window outside the run interval.
    auto joint = tensor_product(f, make_packet(axis(-8.0, 8.0, 32, "y"),
                                               {PacketKind::gaussian, 0.0, 1.0, 0.0}));
    auto h2 = HamiltonianSpec::free_particle(2);
    CouplingSchedule c;
    c.system_axis = 0;
    c.pointer_axis = 1;
    c.strength = 1.0;
    c.t0 = 0.5;
    c.t1 = 0.6;
    c.form = CouplingSchedule::Form::linear;
    h2.couplings = {c};
    CHECK_THROWS_AS(evolve(joint, h2, 0.1, {1e-3, 1, Engine::split_operator}),
                    ConfigurationError);
}

TEST_CASE("Crank-Nicolson dt halving converges at second order") {
    // Moving packet so the temporal Cayley error dominates the fixed
    // spatial discretization error.
    auto ax = axis(-40.0, 40.0, 4096);
    const double w = 5.6568542494923806, k = 2.0;
    auto psi0 = make_packet(ax, {PacketKind::gaussian, -10.0, w, k});
    auto h = HamiltonianSpec::free_particle(1);
    const double T = 2.0;

    auto err_at = [&](double dt) {
        auto psi = psi0;
        CrankNicolsonStepper st(psi.spec, h, dt);
        const int n = static_cast<int>(std::round(T / dt));
        for (int s = 0; s < n; ++s) psi = st.step(psi);
        auto ref = oracles::free_gaussian(ax, w, -10.0, k, 1.0, T);
        return oracles::l2_distance(psi, ref);
    };

    const double e1 = err_at(0.2);
    const double e2 = err_at(0.1);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("absorbing layer reflects <1e-4 of a quarter-Nyquist packet") {
    for (int n : {256, 512}) {
        CAPTURE(n);
        auto ax = axis(-20.0, 20.0, n);
        GridSpec g;
        g.axes = {ax};
        g.boundary = Boundary::absorbing_layer;
        const double k = 0.25 * std::numbers::pi / ax.spacing();
        auto f = normalized(GridField(
            g, make_packet(ax, {PacketKind::gaussian, 0.0, 2.0, k}).amp));
        auto h = HamiltonianSpec::free_particle(1);
        const double knyq = std::numbers::pi / ax.spacing();
        const double dt = 0.7 / (0.5 * knyq * knyq);
        SplitOperatorStepper stepper(g, h, dt);
        const int steps = static_cast<int>(22.0 / (k * dt));
        for (int s = 0; s < steps; ++s) f = stepper.step(f);  // deep in the layer

        // Reflected mass shows up as negative-momentum content; the incident
        // packet sits 7 momentum widths above zero, so its own tail is nil.
        FftPlan plan(ax.points);
        auto hat = f.amp;
        plan.transform(hat.data(), false);
        double neg = 0.0;
        for (int j = ax.points / 2 + 1; j < ax.points; ++j) neg += std::norm(hat[j]);
        neg *= f.spec.cell_volume() / ax.points;
        CHECK(neg < 1e-4);
    }
}

TEST_CASE("measurement coupling: displacement, identity, and branch masses") {
    // Joint grid: system x, pointer y.
    auto xax = axis(-16.0, 16.0, 128, "x");
    auto yax = axis(-24.0, 24.0, 256, "y");
    const double pw = 1.0;   // pointer width
    const double sep = 6.0;  // displacement, 6 pointer widths

    auto phi1 = make_packet(xax, {PacketKind::gaussian, -5.0, 1.0, 0.0});
    auto phi2 = make_packet(xax, {PacketKind::gaussian, 5.0, 1.0, 0.0});
    auto ready = make_packet(yax, {PacketKind::gaussian, 0.0, pw, 0.0});

    CouplingSchedule c;
    c.system_axis = 0;
    c.pointer_axis = 1;
    c.strength = sep;
    c.t0 = 0.0;
    c.t1 = 1.0;
    c.form = CouplingSchedule::Form::projection_pair;
    c.region_plus = RegionSpec{"S2", {{0, Interval{0.0, 16.0}}}};
    c.region_minus = RegionSpec{"S1", {{0, Interval{-16.0, 0.0}}}};

    RegionSpec L{"L", {{1, Interval{-24.0, 0.0}}}};
    RegionSpec R{"R", {{1, Interval{0.0, 24.0}}}};

    SUBCASE("pure phi1 input lands entirely in L") {
        auto joint = tensor_product(phi1, ready);
        auto out = apply_measurement_coupling(joint, c);
        CHECK(norm_squared(out) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(region_probability(out, L) >= 1.0 - 1e-6);
    }

    SUBCASE("zero transfer leaves the field unchanged") {
        auto joint = tensor_product(phi1, ready);
        auto c0 = c;
        c0.strength = 0.0;
        auto out = apply_measurement_coupling(joint, c0);
        double maxdiff = 0.0;
        for (std::size_t i = 0; i < out.amp.size(); ++i)
            maxdiff = std::max(maxdiff, std::abs(out.amp[i] - joint.amp[i]));
        CHECK(maxdiff < 1e-12);
    }

    SUBCASE("superposition splits with weights |c1|^2 / |c2|^2") {
        const double p1 = 0.3;
        auto sys = superpose(std::sqrt(p1), phi1, std::sqrt(1.0 - p1), phi2);
        auto joint = tensor_product(sys, ready);
        auto out = apply_measurement_coupling(joint, c);
        const double pl = region_probability(out, L);
        const double pr = region_probability(out, R);
        CHECK(pl == doctest::Approx(p1).epsilon(1e-6));
        CHECK(pr == doctest::Approx(1.0 - p1).epsilon(1e-6));
        // Branch overlap: displaced ready states 12 widths apart.
        auto b1 = tensor_product(phi1, make_packet(yax, {PacketKind::gaussian, -sep, pw, 0.0}));
        auto b2 = tensor_product(phi2, make_packet(yax, {PacketKind::gaussian, +sep, pw, 0.0}));
        CHECK(std::abs(inner_product(b1, b2)) <= 1e-8);
    }

    SUBCASE("projection regions must partition the system axis") {
        auto bad = c;
        bad.region_minus = RegionSpec{"S1", {{0, Interval{-16.0, -1.0}}}};
        auto joint = tensor_product(phi1, ready);
        CHECK_THROWS_AS(apply_measurement_coupling(joint, bad), ConfigurationError);
    }
}

TEST_CASE("linear coupling displaces the pointer by g*tau*x") {
    auto xax = axis(-8.0, 8.0, 64, "x");
    auto yax = axis(-16.0, 16.0, 128, "y");
    // System sharply localized at x0: pointer should translate by g*tau*x0.
    const double x0 = 2.0;
    auto sys = make_packet(xax, {PacketKind::gaussian, x0, 0.3, 0.0});
    auto ready = make_packet(yax, {PacketKind::gaussian, 0.0, 1.0, 0.0});
    auto joint = tensor_product(sys, ready);

    CouplingSchedule c;
    c.system_axis = 0;
    c.pointer_axis = 1;
    c.strength = 1.5;
    c.t0 = 0.0;
    c.t1 = 1.0;
    c.form = CouplingSchedule::Form::linear;
    auto out = apply_measurement_coupling(joint, c);

    auto marg = marginal_density(out, 1);
    double mean = 0.0, mass = 0.0;
    for (int j = 0; j < yax.points; ++j) {
        mean += marg[j] * yax.center(j);
        mass += marg[j];
    }
    mean /= mass;
    CHECK(mean == doctest::Approx(1.5 * x0).epsilon(1e-2));
}

TEST_CASE("tabulated potential reproduces its analytic counterpart") {
    auto ax = axis(-12.0, 12.0, 256);
    HamiltonianSpec harmonic;
    harmonic.masses = {1.0};
    harmonic.potential.form = PotentialSpec::Form::harmonic;
    harmonic.potential.omegas = {0.8};

    GridSpec g;
    g.axes = {ax};
    HamiltonianSpec tab;
    tab.masses = {1.0};
    tab.potential.form = PotentialSpec::Form::tabulated;
    tab.potential.table = harmonic.potential.evaluate(g, tab.masses);

    auto f = make_packet(ax, {PacketKind::gaussian, 1.0, 1.2, 0.0});
    auto a = step_split_operator(f, harmonic, 5e-4);
    auto b = step_split_operator(f, tab, 5e-4);
    for (std::size_t i = 0; i < a.amp.size(); ++i)
        CHECK(std::abs(a.amp[i] - b.amp[i]) < 1e-14);

    auto bad = tab;
    bad.potential.table.resize(10);
    CHECK_THROWS_AS(step_split_operator(f, bad, 5e-4), ConfigurationError);
}

TEST_CASE("double-slit barrier potential is finite with open slits") {
    GridSpec g;
    g.axes = {axis(-10.0, 10.0, 64, "x"), axis(-10.0, 10.0, 64, "y")};
    PotentialSpec p;
    p.form = PotentialSpec::Form::double_slit_barrier;
    p.barrier_axis = 0;
    p.slit_half_separation = 3.0;
    p.slit_width = 1.0;
    std::vector<double> masses{1.0, 1.0};
    auto v = p.evaluate(g, masses);
    // Wall is tall on-axis away from slits, open inside a slit.
    const auto at = [&](double x, double y) {
        std::array<int, kMaxDims> idx{};
        idx[0] = static_cast<int>((x - g.axes[0].min) / g.axes[0].spacing());
        idx[1] = static_cast<int>((y - g.axes[1].min) / g.axes[1].spacing());
        return v[g.flat(idx)];
    };
    CHECK(at(0.0, 0.0) > 10.0);
    CHECK(at(0.0, 3.0) == 0.0);
    CHECK(at(0.0, -3.0) == 0.0);
    for (double val : v) CHECK(std::isfinite(val));
}
