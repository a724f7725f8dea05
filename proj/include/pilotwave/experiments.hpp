#pragma once

#include <string>
#include <vector>

#include "pilotwave/ensemble.hpp"
#include "pilotwave/measurement.hpp"

namespace pilotwave {

// ---------------------------------------------------------------------------
// Double slit, modeled from the slit plane onward: two Gaussian modes at the
// slit exits spread, overlap, and interfere on the way to the screen; one
// transverse coordinate.
// ---------------------------------------------------------------------------

struct DoubleSlitParams {
    double slit_half_separation = 3.5;
    double packet_width = 0.7;  // amplitude width of each slit mode
    double screen_time = 12.0;
    double extent = 40.0;
    int points = 1024;
    double dt = 8e-4;
    int snapshot_stride = 25;
    bool single_slit = false;  // control run without superposition
};

struct DoubleSlitResult {
    FieldHistory history;
    TrajectoryEnsemble ensemble;

    Histogram1D screen;                  // empirical arrival histogram
    std::vector<double> screen_expected; // |psi_T|^2 bin masses (normalized)

    std::size_t axis_crossings = 0;      // trajectories ever changing side
    std::size_t side_mismatches = 0;     // final side != initial side
    NoCrossingReport order;
    double mirror_pvalue = 1.0;          // symmetry of the empirical histogram
    int significant_minima = 0;          // interference dips in the expected bins
    double min_depth_over_noise = 0.0;   // depth of the weakest flagged dip
};

namespace detail {

// Counts interior local minima of a count profile that fall at least
// `factor` standard deviations (Poisson noise of the smaller flanking peak)
// below both flanking maxima. Returns the smallest depth/noise ratio among
// the counted dips.
inline int significant_minima(const std::vector<double>& v, double factor,
                              double* weakest = nullptr) {
    int count = 0;
    double weakest_ratio = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;
        double left = v[i], right = v[i];
        for (std::size_t j = i; j-- > 0 && v[j] >= left;) left = std::max(left, v[j]);
        for (std::size_t j = i + 1; j < n && v[j] >= right; ++j)
            right = std::max(right, v[j]);
        const double flank = std::min(left, right);
        const double depth = flank - v[i];
        const double noise = std::sqrt(std::max(flank, 1.0));
        if (depth >= factor * noise) {
            ++count;
            const double ratio = depth / noise;
            weakest_ratio = (count == 1) ? ratio : std::min(weakest_ratio, ratio);
        }
    }
    if (weakest) *weakest = weakest_ratio;
    return count;
}

}  // namespace detail

inline DoubleSlitResult run_double_slit(const DoubleSlitParams& p,
                                        const EnsembleSpec& ens,
                                        unsigned threads = 0) {
    if (!(p.slit_half_separation > 0.0) || !(p.packet_width > 0.0))
        throw PresetViolationError("double slit needs positive separation and width");
    AxisSpec ax{"x", -p.extent, p.extent, p.points};
    auto up = make_packet(ax, {PacketKind::gaussian, +p.slit_half_separation,
                               p.packet_width, 0.0});
    auto down = make_packet(ax, {PacketKind::gaussian, -p.slit_half_separation,
                                 p.packet_width, 0.0});
    GridField psi0 = p.single_slit
                         ? up
                         : superpose(cplx(std::numbers::sqrt2 / 2.0, 0.0), up,
                                     cplx(std::numbers::sqrt2 / 2.0, 0.0), down, true);

    DoubleSlitResult out;
    auto h = HamiltonianSpec::free_particle(1);
    out.history = evolve(std::move(psi0), h, p.screen_time,
                         {p.dt, p.snapshot_stride, Engine::split_operator});

    auto starts = sample_initial(out.history.field_at(0.0), ens);
    out.ensemble = integrate_ensemble(out.history, starts, {{1.0}}, threads);

    // Screen histogram on cell-aligned bins.
    const auto bins = uniform_bins(out.history.grid(),
                                   ens.histogram_bins > 0 ? ens.histogram_bins : 64);
    out.screen = Histogram1D(-p.extent, p.extent, bins.bins[0]);
    for (const auto& m : out.ensemble.members) out.screen.add(m.x.back()[0]);
    out.screen_expected =
        detail::field_bin_masses(out.history.final_field(), bins);

    // Per-trajectory side bookkeeping and axis crossings.
    for (const auto& m : out.ensemble.members) {
        const bool init_up = m.x.front()[0] > 0.0;
        bool crossed = false;
        for (const auto& q : m.x)
            if ((q[0] > 0.0) != init_up) crossed = true;
        if (crossed) ++out.axis_crossings;
        if ((m.x.back()[0] > 0.0) != init_up) ++out.side_mismatches;
    }
    out.order = check_no_crossing(out.ensemble, 0, ax.spacing());

    // Mirror symmetry of the empirical histogram (chi-square on bin pairs).
    {
        const auto& c = out.screen.counts;
        double chi2 = 0.0;
        int dof = 0;
        for (std::size_t b = 0; b < c.size() / 2; ++b) {
            const double a = c[b], d = c[c.size() - 1 - b];
            if (a + d < 5.0) continue;
            chi2 += (a - d) * (a - d) / (a + d);
            ++dof;
        }
        out.mirror_pvalue = (dof > 0) ? detail::gamma_q(dof / 2.0, chi2 / 2.0) : 1.0;
    }

    // Interference dips in the expected (quadrature) screen profile, scored
    // against the bin counting noise of this ensemble size.
    {
        std::vector<double> expected_counts(out.screen_expected.size());
        double mass = 0.0;
        for (double q : out.screen_expected) mass += q;
        for (std::size_t b = 0; b < expected_counts.size(); ++b)
            expected_counts[b] =
                out.screen_expected[b] / mass * static_cast<double>(ens.count);
        out.significant_minima = detail::significant_minima(
            expected_counts, 10.0, &out.min_depth_over_noise);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Packet exchange: two identical counter-propagating packets meet at the
// symmetry plane. The naive which-packet attribution says they pass through;
// the trajectories bounce instead. A transverse offset turns interference
// off and makes the attribution correct again.
// ---------------------------------------------------------------------------

struct PacketExchangeParams {
    double packet_offset = 6.0;  // initial centers at -/+ offset
    double packet_width = 1.5;
    double momentum = 2.0;  // toward each other
    double t_final = 6.0;
    double extent = 30.0;
    int points = 1024;
    double dt = 4e-4;
    // The exchange region is stiff (sweeping interference nodes); the
    // trajectory step must stay small there.
    int snapshot_stride = 5;

    double transverse_offset = 0.0;  // > 0: 2D pass-by variant
    double transverse_extent = 8.0;
    int transverse_points = 64;
};

struct PacketExchangeResult {
    TrajectoryEnsemble ensemble;
    std::size_t plane_crossings = 0;   // trajectories ever crossing x = 0
    double attribution_mismatch = 0.0; // fraction ending on their initial side
    NoCrossingReport order;            // 1D runs only
    double initial_overlap = 0.0;
};

inline PacketExchangeResult run_packet_exchange(const PacketExchangeParams& p,
                                                const EnsembleSpec& ens,
                                                unsigned threads = 0) {
    AxisSpec ax{"x", -p.extent, p.extent, p.points};
    const bool planar = p.transverse_offset > 0.0;

    auto left = make_packet(ax, {PacketKind::gaussian, -p.packet_offset,
                                 p.packet_width, +p.momentum});
    auto right = make_packet(ax, {PacketKind::gaussian, +p.packet_offset,
                                  p.packet_width, -p.momentum});

    GridField psi0;
    std::vector<double> masses;
    if (!planar) {
        psi0 = superpose(cplx(std::numbers::sqrt2 / 2.0, 0.0), left,
                         cplx(std::numbers::sqrt2 / 2.0, 0.0), right, true);
        masses = {1.0};
    } else {
        AxisSpec ay{"y", -p.transverse_extent, p.transverse_extent,
                    p.transverse_points};
        auto lo = make_packet(ay, {PacketKind::gaussian, -p.transverse_offset,
                                   p.packet_width, 0.0});
        auto hi = make_packet(ay, {PacketKind::gaussian, +p.transverse_offset,
                                   p.packet_width, 0.0});
        psi0 = superpose(cplx(std::numbers::sqrt2 / 2.0, 0.0), tensor_product(left, lo),
                         cplx(std::numbers::sqrt2 / 2.0, 0.0), tensor_product(right, hi),
                         true);
        masses = {1.0, 1.0};
    }

    PacketExchangeResult out;
    {
        // The preset requires cleanly separated packets at t = 0.
        const cplx olap = planar ? cplx{} : inner_product(left, right);
        out.initial_overlap = std::abs(olap);
        if (out.initial_overlap > 1e-6)
            throw PresetViolationError("packets overlap at t = 0");
    }

    auto h = HamiltonianSpec::free_particle(psi0.spec.dims());
    auto hist = evolve(std::move(psi0), h, p.t_final,
                       {p.dt, p.snapshot_stride, Engine::split_operator});
    auto starts = sample_initial(hist.field_at(0.0), ens);
    out.ensemble = integrate_ensemble(hist, starts, IntegrateOptions{masses}, threads);

    std::size_t stayed = 0;
    for (const auto& m : out.ensemble.members) {
        const bool init_left = m.x.front()[0] < 0.0;
        bool crossed = false;
        for (const auto& q : m.x)
            if ((q[0] < 0.0) != init_left) crossed = true;
        if (crossed) ++out.plane_crossings;
        if ((m.x.back()[0] < 0.0) == init_left) ++stayed;
    }
    // A trajectory that stays on its side contradicts its packet, which
    // traversed the plane.
    out.attribution_mismatch =
        static_cast<double>(stayed) / static_cast<double>(out.ensemble.size());
    if (!planar) out.order = check_no_crossing(out.ensemble, 0, ax.spacing());
    return out;
}

// ---------------------------------------------------------------------------
// Absolute uncertainty: a linear pointer coupling records the system
// coordinate with resolution set by the pointer width. Conditioned on the
// record, the particle distribution must match the collapsed conditional
// density; nothing sharper can be extracted.
// ---------------------------------------------------------------------------

struct AbsoluteUncertaintyParams {
    double system_width = 2.0;    // amplitude width of the measured packet
    double pointer_width = 0.25;  // resolution knob
    double transfer = 1.0;        // g * (t1 - t0): record approx transfer * x
    double extent_x = 16.0;
    double extent_y = 16.0;
    int points = 512;
    double dt = 2e-4;
    int snapshot_stride = 10;
    // Free flights stay short so the collapsed conditionals do not spread
    // between the readout and the comparison.
    double window_t0 = 0.002, window_t1 = 0.022;
    double t_final = 0.024;
    int record_bins = 12;          // conditioning bins on the record axis
    std::size_t min_bin_samples = 300;
    int x_bins = 32;
};

struct RecordBinReport {
    double lo = 0.0, hi = 0.0;
    std::size_t samples = 0;
    double tv = 0.0;        // empirical X | record vs conditional density
    bool counted = false;   // enough samples to score
};

struct AbsoluteUncertaintyResult {
    FieldHistory history;
    TrajectoryEnsemble ensemble;
    std::vector<RecordBinReport> bins;
    double max_tv = 0.0;           // over counted bins
    std::size_t counted_bins = 0;
    double conditional_width = 0.0;  // posterior |phi_cond| std at a central record
};

inline AbsoluteUncertaintyResult run_absolute_uncertainty(
    const AbsoluteUncertaintyParams& p, const EnsembleSpec& ens,
    unsigned threads = 0) {
    AxisSpec xax{"x", -p.extent_x, p.extent_x, p.points};
    AxisSpec yax{"y", -p.extent_y, p.extent_y, p.points};
    auto sys = make_packet(xax, {PacketKind::gaussian, 0.0, p.system_width, 0.0});
    auto ready = make_packet(yax, {PacketKind::gaussian, 0.0, p.pointer_width, 0.0});
    auto joint = tensor_product(sys, ready);

    HamiltonianSpec h = HamiltonianSpec::free_particle(2);
    CouplingSchedule c;
    c.system_axis = 0;
    c.pointer_axis = 1;
    c.form = CouplingSchedule::Form::linear;
    c.t0 = p.window_t0;
    c.t1 = p.window_t1;
    c.strength = p.transfer / c.window();
    h.couplings = {c};

    AbsoluteUncertaintyResult out;
    out.history = evolve(std::move(joint), h, p.t_final,
                         {p.dt, p.snapshot_stride, Engine::split_operator});
    auto starts = sample_initial(out.history.field_at(0.0), ens);
    out.ensemble = integrate_ensemble(out.history, starts, {{1.0, 1.0}}, threads);

    const auto& field = out.history.final_field();
    const auto& g = field.spec;
    const int nx = g.axes[0].points, ny = g.axes[1].points;
    const int xb = BinGrid::snap(p.x_bins, nx);
    const int cells_per_xbin = nx / xb;

    // Record-axis bins span the populated band of the record. Bin edges are
    // snapped to grid cell boundaries so the empirical partition and the
    // quadrature partition are identical.
    std::vector<double> ys(out.ensemble.size());
    for (std::size_t i = 0; i < ys.size(); ++i)
        ys[i] = out.ensemble.members[i].x.back()[1];
    auto ysorted = ys;
    std::sort(ysorted.begin(), ysorted.end());
    const double ylo_raw = ysorted[static_cast<std::size_t>(0.005 * (ys.size() - 1))];
    const double yhi_raw = ysorted[static_cast<std::size_t>(0.995 * (ys.size() - 1))];
    const double dy = g.axes[1].spacing();
    const int cell_lo = std::clamp(
        static_cast<int>(std::floor((ylo_raw - g.axes[1].min) / dy)), 0, ny - 1);
    const int cells_per_ybin = std::max(
        1, static_cast<int>(std::round((yhi_raw - ylo_raw) / (p.record_bins * dy))));

    const int ti = static_cast<int>(out.ensemble.times.size()) - 1;
    for (int b = 0; b < p.record_bins; ++b) {
        RecordBinReport rep;
        const int first_cell = cell_lo + b * cells_per_ybin;
        const int last_cell = std::min(first_cell + cells_per_ybin, ny);
        if (first_cell >= ny) break;
        rep.lo = g.axes[1].min + first_cell * dy;
        rep.hi = g.axes[1].min + last_cell * dy;

        // Empirical X histogram of trajectories whose record fell in the bin.
        std::vector<double> emp(xb, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < out.ensemble.size(); ++i) {
            const int ycell = static_cast<int>((ys[i] - g.axes[1].min) / dy);
            if (ycell < first_cell || ycell >= last_cell) continue;
            const double x = out.ensemble.members[i].x[ti][0];
            int cell = static_cast<int>((x - g.axes[0].min) / g.axes[0].spacing());
            cell = std::clamp(cell, 0, nx - 1);
            emp[cell / cells_per_xbin] += 1.0;
            ++count;
        }
        rep.samples = count;

        if (count >= p.min_bin_samples) {
            // Quadrature conditional: |psi(x, y)|^2 mass over the record bin.
            std::vector<double> cond(xb, 0.0);
            for (int iy = first_cell; iy < last_cell; ++iy) {
                for (int ix = 0; ix < nx; ++ix)
                    cond[ix / cells_per_xbin] +=
                        std::norm(field.amp[g.flat({ix, iy})]);
            }
            double es = 0.0, cs = 0.0;
            for (int q = 0; q < xb; ++q) {
                es += emp[q];
                cs += cond[q];
            }
            for (int q = 0; q < xb; ++q) {
                emp[q] /= es;
                cond[q] /= cs;
            }
            rep.tv = tv_distance(emp, cond);
            rep.counted = true;
            ++out.counted_bins;
            out.max_tv = std::max(out.max_tv, rep.tv);
        }
        out.bins.push_back(rep);
    }

    // Width of the collapsed conditional at a central record value.
    auto cond = conditional_wavefunction(field, {{1, 0.5 * (ylo_raw + yhi_raw)}});
    const auto& cg = cond.field.spec.axes[0];
    std::vector<double> dens(cg.points);
    for (int i = 0; i < cg.points; ++i) dens[i] = std::norm(cond.field.amp[i]);
    out.conditional_width =
        density_stddev(dens, [&](int i) { return cg.center(i); });
    return out;
}

}  // namespace pilotwave
