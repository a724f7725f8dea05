// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run with no arguments for all criteria or with --criterion N for one.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "pilotwave/crank_nicolson.hpp"
#include "pilotwave/report.hpp"
#include "pilotwave/runner.hpp"

using namespace pilotwave;

namespace {

struct Criterion {
    int id;
    const char* summary;
    std::function<bool(std::string&)> run;
};

bool expect(bool ok, std::string& detail, const std::string& msg) {
    if (!ok) detail += (detail.empty() ? "" : "; ") + msg;
    return ok;
}

std::string g(double v) { return fmt_double(v); }

// --- 1. Born rule ----------------------------------------------------------

bool criterion_born(std::string& detail) {
    bool ok = true;
    const std::size_t n = 10000;
    for (double p1 : {0.0, 0.25, 0.3, 0.5, 0.75, 1.0}) {
        MeasurementScenario s;  // 512 x 512 grid
        s.c1 = cplx(std::sqrt(p1), 0.0);
        s.c2 = cplx(std::sqrt(1.0 - p1), 0.0);
        auto res = run_stage1(s, {n, 20260101});
        const double quad_err = std::abs(res.left.total - p1);
        ok &= expect(quad_err <= 1e-5 + res.left.cross_bound, detail,
                     "quadrature off at |c1|^2=" + g(p1) + " err=" + g(quad_err));
        const double sigma = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(n));
        const double emp_err = std::abs(res.empirical_left.rate - p1);
        ok &= expect(emp_err <= std::max(3.0 * sigma, 1e-12), detail,
                     "empirical off at |c1|^2=" + g(p1) + " err=" + g(emp_err));
    }
    return ok;
}

// --- 2. Camera consistency --------------------------------------------------

bool criterion_camera(std::string& detail) {
    bool ok = true;
    const std::size_t n = 10000;
    {
        MeasurementScenario s;
        s.c1 = s.c2 = cplx(std::numbers::sqrt2 / 2.0, 0.0);
        auto res = run_stage2_camera(s, {n, 20260202});
        const double off =
            res.cells[0][1].quadrature + res.cells[1][0].quadrature;
        ok &= expect(off < 1e-6, detail, "offdiag quadrature " + g(off));
        ok &= expect(res.off_diagonal_rate.count == 0, detail,
                     "offdiag count " + std::to_string(res.off_diagonal_rate.count));
    }
    {
        MeasurementScenario s;
        s.c1 = s.c2 = cplx(std::numbers::sqrt2 / 2.0, 0.0);
        s.camera_ready.kind = PacketKind::cauchy;
        s.localization_tol = 0.2;
        auto res = run_stage2_camera(s, {n, 20260203});
        const double off =
            res.cells[0][1].quadrature + res.cells[1][0].quadrature;
        ok &= expect(off > 1e-4, detail, "tails produced no offdiag mass");
        ok &= expect(res.off_diagonal_rate.lo <= off &&
                         off <= res.off_diagonal_rate.hi,
                     detail,
                     "tails rate " + g(res.off_diagonal_rate.rate) +
                         " not Wilson-consistent with quadrature " + g(off));
    }
    return ok;
}

// --- 3. Conditional guidance ------------------------------------------------

bool criterion_conditional_velocity(std::string& detail) {
    AxisSpec yax{"y", -12.0, 12.0, 256};
    AxisSpec zax{"z", -12.0, 12.0, 256};
    const double kz = 1.2;
    auto phi_l = make_packet(yax, {PacketKind::gaussian, -6.0, 1.0, 0.0});
    auto phi_r = make_packet(yax, {PacketKind::gaussian, +6.0, 1.0, 0.0});
    auto psi_l = make_packet(zax, {PacketKind::gaussian, -1.0, 1.0, -kz});
    auto psi_r = make_packet(zax, {PacketKind::gaussian, +1.0, 1.0, +kz});
    auto field = superpose(cplx(std::numbers::sqrt2 / 2.0, 0.0),
                           tensor_product(phi_l, psi_l),
                           cplx(std::numbers::sqrt2 / 2.0, 0.0),
                           tensor_product(phi_r, psi_r), true);
    bool ok = true;
    int probes = 0;
    double worst = 0.0;
    for (double y : {-7.0, -6.0, -5.0, -4.5}) {
        for (int i = 0; i < 25; ++i) {
            const double z = -2.0 + 4.0 * i / 24.0;
            const double full = conditional_z_velocity(field, y, z);
            const double solo = velocity_field(psi_l, {z}, {1.0})[0];
            worst = std::max(worst, std::abs(full - solo) / std::abs(solo));
            ++probes;
        }
    }
    ok &= expect(probes >= 100, detail, "fewer than 100 probes");
    ok &= expect(worst <= 1e-4, detail, "relative mismatch " + g(worst));
    return ok;
}

// --- 4. Collapse / repeated measurement -------------------------------------

bool criterion_repeat(std::string& detail) {
    bool ok = true;
    MeasurementScenario s;
    s.c1 = cplx(std::sqrt(0.3), 0.0);
    s.c2 = cplx(std::sqrt(0.7), 0.0);
    auto res = run_stage1(s, {1000, 20260404});
    auto rep = repeat_measurement(s, res, 20260405);
    ok &= expect(rep.agreement == 1.0, detail, "agreement " + g(rep.agreement));
    ok &= expect(rep.quadrature_disagreement < 1e-6, detail,
                 "quadrature disagreement " + g(rep.quadrature_disagreement));

    const auto& field = res.history.final_field();
    for (double y : {-6.5, -5.5, -4.5}) {
        auto cond = conditional_wavefunction(field, {{1, y}});
        const double f = oracles::fidelity(cond.field, res.phi1_t);
        ok &= expect(f >= 1.0 - 1e-4, detail, "fidelity(L) " + g(f));
    }
    for (double y : {4.5, 5.5, 6.5}) {
        auto cond = conditional_wavefunction(field, {{1, y}});
        const double f = oracles::fidelity(cond.field, res.phi2_t);
        ok &= expect(f >= 1.0 - 1e-4, detail, "fidelity(R) " + g(f));
    }
    return ok;
}

// --- 5. Equivariance ---------------------------------------------------------

bool criterion_equivariance(std::string& detail) {
    bool ok = true;
    for (const char* preset : {"free-gaussian", "double-slit"}) {
        ScenarioSpec spec = parse_scenario(preset);
        spec.trajectories = 10000;
        spec.seed = 20260505;
        auto outcome = run_scenario(spec);
        int eq_checks = 0;
        for (const auto& c : outcome.report.checks) {
            if (c.name.rfind("equivariance_tv_t", 0) != 0) continue;
            ++eq_checks;
            ok &= expect(c.pass, detail,
                         std::string(preset) + " " + c.name + " tv=" + g(c.value) +
                             " limit=" + g(c.threshold));
        }
        ok &= expect(eq_checks == 5, detail,
                     std::string(preset) + " expected 5 sample times");
    }
    return ok;
}

// --- 6. No crossing -----------------------------------------------------------

bool criterion_no_crossing(std::string& detail) {
    bool ok = true;
    {
        DoubleSlitParams p;
        auto res = run_double_slit(p, {10000, 20260606});
        ok &= expect(res.axis_crossings == 0, detail,
                     "slit axis crossings " + std::to_string(res.axis_crossings));
        ok &= expect(res.order.violations == 0, detail,
                     "slit order violations " +
                         std::to_string(res.order.violations));
    }
    {
        PacketExchangeParams p;
        auto res = run_packet_exchange(p, {10000, 20260607});
        ok &= expect(res.plane_crossings == 0, detail,
                     "exchange plane crossings " +
                         std::to_string(res.plane_crossings));
        ok &= expect(res.attribution_mismatch == 1.0, detail,
                     "attribution mismatch " + g(res.attribution_mismatch));
    }
    return ok;
}

// --- 7. Absolute uncertainty ---------------------------------------------------

bool criterion_absolute_uncertainty(std::string& detail) {
    bool ok = true;
    AbsoluteUncertaintyParams p;
    auto res = run_absolute_uncertainty(p, {10000, 20260707});
    ok &= expect(res.counted_bins >= 5, detail,
                 "only " + std::to_string(res.counted_bins) + " bins counted");
    for (const auto& b : res.bins) {
        if (!b.counted) continue;
        ok &= expect(b.samples >= 300, detail, "bin below 300 samples");
        ok &= expect(b.tv < 0.05, detail,
                     "bin [" + g(b.lo) + "," + g(b.hi) + ") tv=" + g(b.tv));
    }

    // Zero-coupling control: the record carries no position information.
    auto control_p = p;
    control_p.transfer = 0.0;
    control_p.record_bins = 6;
    auto control = run_absolute_uncertainty(control_p, {10000, 20260708});
    for (const auto& b : control.bins)
        if (b.counted)
            ok &= expect(b.tv < 0.05, detail, "control bin tv=" + g(b.tv));

    // Resolution scaling: halving the pointer width halves the collapsed width.
    auto half_p = p;
    half_p.pointer_width = 0.5 * p.pointer_width;
    auto half = run_absolute_uncertainty(half_p, {64, 20260709});
    auto full = run_absolute_uncertainty(p, {64, 20260710});
    const double ratio = half.conditional_width / full.conditional_width;
    ok &= expect(std::abs(ratio - 0.5) <= 0.05, detail,
                 "width scaling ratio " + g(ratio));
    return ok;
}

// --- 8. Numerics oracles --------------------------------------------------------

bool criterion_numerics(std::string& detail) {
    bool ok = true;

    // Gaussian width law to 0.1%.
    {
        AxisSpec ax{"x", -40.0, 40.0, 1024};
        const double w = 2.0, T = 2.0;
        auto f = make_packet(ax, {PacketKind::gaussian, 0.0, w, 0.0});
        auto h = HamiltonianSpec::free_particle(1);
        SplitOperatorStepper st(f.spec, h, 2e-4);
        for (int s = 0; s < 10000; ++s) f = st.step(std::move(f));
        const double rel =
            std::abs(oracles::measured_sigma(f) / oracles::gaussian_sigma(w, 1.0, T) -
                     1.0);
        ok &= expect(rel < 1e-3, detail, "width law error " + g(rel));
    }

    // Bohmian trajectory scaling x(t) = x0 sigma(t)/sigma0 to 0.5%.
    {
        AxisSpec ax{"x", -40.0, 40.0, 1024};
        const double w = 2.0, T = 2.0;
        auto f = make_packet(ax, {PacketKind::gaussian, 0.0, w, 0.0});
        auto h = HamiltonianSpec::free_particle(1);
        auto hist = evolve(std::move(f), h, T, {2e-4, 50, Engine::split_operator});
        const double factor =
            oracles::gaussian_sigma(w, 1.0, T) / oracles::gaussian_sigma(w, 1.0, 0.0);
        for (double x0 : {-2.0, -0.7, 1.2, 2.4}) {
            auto traj = integrate_trajectory(hist, {x0}, {{1.0}});
            const double rel = std::abs(traj.x.back()[0] / (x0 * factor) - 1.0);
            ok &= expect(rel < 5e-3, detail,
                         "trajectory scaling error " + g(rel) + " at x0=" + g(x0));
        }
    }

    // Plane-wave velocity exact to 1e-8.
    {
        AxisSpec ax{"x", -16.0, 16.0, 256};
        auto f = make_plane_wave(ax, 2.0);
        const double k = snapped_wavenumber(ax, 2.0);
        for (double x : {-9.0, 0.3, 6.1}) {
            const double v = velocity_field(f, {x}, {1.0})[0];
            ok &= expect(std::abs(v - k) <= 1e-8 * std::abs(k), detail,
                         "plane wave velocity error " + g(std::abs(v - k)));
        }
    }

    // Unitarity drift < 1e-10 per step, both steppers.
    {
        AxisSpec ax{"x", -20.0, 20.0, 512};
        auto f0 = make_packet(ax, {PacketKind::gaussian, 1.0, 1.5, 0.8});
        HamiltonianSpec h;
        h.masses = {1.0};
        h.potential.form = PotentialSpec::Form::harmonic;
        h.potential.omegas = {0.5};
        SplitOperatorStepper so(f0.spec, h, 5e-4);
        CrankNicolsonStepper cn(f0.spec, h, 5e-4);
        auto a = f0, b = f0;
        double worst = 0.0;
        for (int s = 1; s <= 1000; ++s) {
            a = so.step(std::move(a));
            b = cn.step(std::move(b));
            worst = std::max(worst,
                             std::abs(std::sqrt(norm_squared(a)) - 1.0) / s);
            worst = std::max(worst,
                             std::abs(std::sqrt(norm_squared(b)) - 1.0) / s);
        }
        ok &= expect(worst < 1e-10, detail, "unitarity drift " + g(worst));
    }

    // Split-operator vs Crank-Nicolson L2 divergence < 1e-4 over 1000 steps.
    {
        AxisSpec ax{"x", -20.0, 20.0, 512};
        const double w = 5.6568542494923806;
        auto f = make_packet(ax, {PacketKind::gaussian, 0.0, w, 0.0});
        auto h = HamiltonianSpec::free_particle(1);
        SplitOperatorStepper so(f.spec, h, 5e-4);
        CrankNicolsonStepper cn(f.spec, h, 5e-4);
        auto a = f, b = f;
        for (int s = 0; s < 1000; ++s) {
            a = so.step(std::move(a));
            b = cn.step(std::move(b));
        }
        const double d = oracles::l2_distance(a, b);
        ok &= expect(d < 1e-4, detail, "integrator divergence " + g(d));
    }

    // dt halving: error ratio 4 +- 20% for both steppers.
    {
        AxisSpec ax{"x", -12.0, 12.0, 256};
        HamiltonianSpec h;
        h.masses = {1.0};
        h.potential.form = PotentialSpec::Form::harmonic;
        h.potential.omegas = {1.0};
        auto psi0 = make_packet(ax, {PacketKind::gaussian, 2.0, 1.0, 0.0});
        auto err_at = [&](double dt) {
            auto psi = psi0;
            SplitOperatorStepper st(psi.spec, h, dt);
            const int nsteps = static_cast<int>(std::round(1.0 / dt));
            for (int s = 0; s < nsteps; ++s) psi = st.step(std::move(psi));
            auto ref = make_packet(
                ax, {PacketKind::gaussian, oracles::coherent_center(2.0, 1.0, 1.0),
                     1.0, 0.0});
            double e = 0.0;
            for (std::size_t i = 0; i < psi.amp.size(); ++i)
                e += std::pow(std::norm(psi.amp[i]) - std::norm(ref.amp[i]), 2);
            return std::sqrt(e * psi.spec.cell_volume());
        };
        const double ratio = err_at(5e-4) / err_at(2.5e-4);
        ok &= expect(std::abs(ratio - 4.0) <= 0.8, detail,
                     "split-operator halving ratio " + g(ratio));
    }
    {
        AxisSpec ax{"x", -40.0, 40.0, 4096};
        const double w = 5.6568542494923806, k = 2.0;
        auto psi0 = make_packet(ax, {PacketKind::gaussian, -10.0, w, k});
        auto h = HamiltonianSpec::free_particle(1);
        auto err_at = [&](double dt) {
            auto psi = psi0;
            CrankNicolsonStepper st(psi.spec, h, dt);
            const int nsteps = static_cast<int>(std::round(2.0 / dt));
            for (int s = 0; s < nsteps; ++s) psi = st.step(std::move(psi));
            return oracles::l2_distance(psi,
                                        oracles::free_gaussian(ax, w, -10.0, k, 1.0, 2.0));
        };
        const double ratio = err_at(0.2) / err_at(0.1);
        ok &= expect(std::abs(ratio - 4.0) <= 0.8, detail,
                     "Crank-Nicolson halving ratio " + g(ratio));
    }
    return ok;
}

// --- 9. Determinism ---------------------------------------------------------------

bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    bool ok = true;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const char* preset : {"packet-exchange", "pointer-readout"}) {
        std::string tables[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir =
                fs::temp_directory_path() /
                ("pw_accept_det_" + std::to_string(rep));
            fs::remove_all(dir);
            RunConfig cfg;
            cfg.scenario_source = preset;
            cfg.trajectories = 400;
            cfg.seed = 20260909;
            cfg.out_dir = dir.string();
            cfg.threads = (rep == 0) ? 1 : 4;  // thread count must not matter
            run(cfg);
            tables[rep] = slurp(dir / "trajectories.tsv") +
                          slurp(dir / (std::string("histogram_") +
                                       (std::strcmp(preset, "pointer-readout") == 0
                                            ? "pointer"
                                            : "screen") +
                                       ".tsv"));
            fs::remove_all(dir);
        }
        ok &= expect(!tables[0].empty() && tables[0] == tables[1], detail,
                     std::string(preset) + " tables differ across thread counts");
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "Born rule: pointer statistics match |c1|^2 across the sweep",
         criterion_born},
        {2, "camera consistency: no off-diagonal (pointer, record) mass",
         criterion_camera},
        {3, "conditional guidance: z-velocity follows the occupied packet",
         criterion_conditional_velocity},
        {4, "collapse: repeated measurement agreement and conditional fidelity",
         criterion_repeat},
        {5, "equivariance: ensembles track |psi_t|^2 at all sample times",
         criterion_equivariance},
        {6, "no crossing: slit sides and exchange plane are never crossed",
         criterion_no_crossing},
        {7, "absolute uncertainty: records expose exactly |phi_cond|^2",
         criterion_absolute_uncertainty},
        {8, "numerics oracles: width law, scaling, unitarity, convergence",
         criterion_numerics},
        {9, "determinism: byte-identical tables for identical config and seed",
         criterion_determinism},
    };

    int only = 0;
    for (int i = 1; i + 1 <= argc - 1; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);

    bool all_ok = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d: %s - %s%s%s\n", c.id, ok ? "PASS" : "FAIL",
                    c.summary, detail.empty() ? "" : " :: ", detail.c_str());
        std::fflush(stdout);
        all_ok &= ok;
    }
    return all_ok ? 0 : 1;
}
