#pragma once

#include <optional>
#include <vector>

#include "pilotwave/branch_field.hpp"
#include "pilotwave/ensemble.hpp"
#include "pilotwave/packets.hpp"

namespace pilotwave {

// Two-outcome pointer measurement, optionally followed by a camera stage
// that records the pointer. Axis x carries the system, y the pointer, z the
// camera. The system states phi1/phi2 are disjointly supported Gaussians on
// opposite sides of `system_boundary`; outcome 1 displaces the pointer into
// L (negative y), outcome 2 into R.
struct MeasurementScenario {
    AxisSpec x_axis{"x", -16.0, 16.0, 512};
    AxisSpec y_axis{"y", -12.0, 12.0, 512};
    AxisSpec z_axis{"z", -12.0, 12.0, 256};
    bool has_camera = false;

    double mass_x = 1.0, mass_y = 1.0, mass_z = 1.0;

    cplx c1{std::sqrt(0.5), 0.0};
    cplx c2{std::sqrt(0.5), 0.0};
    PacketSpec phi1{PacketKind::gaussian, -5.0, 0.7, 0.0};
    PacketSpec phi2{PacketKind::gaussian, +5.0, 0.7, 0.0};
    PacketSpec pointer_ready{PacketKind::gaussian, 0.0, 1.0, 0.0};
    PacketSpec camera_ready{PacketKind::gaussian, 0.0, 1.0, 0.0};

    double system_boundary = 0.0;
    double pointer_transfer = 6.0;  // displacement, >= 6 pointer widths
    double camera_transfer = 6.0;

    double stage1_t0 = 0.01, stage1_t1 = 0.02;
    double stage2_t0 = 0.04, stage2_t1 = 0.05;
    double t_final = 0.08;

    double dt = 2e-4;
    int snapshot_stride = 25;
    double localization_tol = 1e-6;
    double min_separation_widths = 6.0;

    RegionSpec region_L() const {
        return RegionSpec{"L", {{1, Interval{y_axis.min, 0.0}}}};
    }
    RegionSpec region_R() const {
        return RegionSpec{"R", {{1, Interval{0.0, y_axis.max}}}};
    }
    RegionSpec camera_L() const {
        return RegionSpec{"CL", {{2, Interval{z_axis.min, 0.0}}}};
    }
    RegionSpec camera_R() const {
        return RegionSpec{"CR", {{2, Interval{0.0, z_axis.max}}}};
    }

    CouplingSchedule stage1_coupling() const {
        CouplingSchedule c;
        c.system_axis = 0;
        c.pointer_axis = 1;
        c.t0 = stage1_t0;
        c.t1 = stage1_t1;
        c.strength = pointer_transfer / c.window();
        c.form = CouplingSchedule::Form::projection_pair;
        // Outcome 1 (phi1 side, x < boundary) drives the pointer into L.
        c.region_minus = RegionSpec{"S1", {{0, Interval{x_axis.min, system_boundary}}}};
        c.region_plus = RegionSpec{"S2", {{0, Interval{system_boundary, x_axis.max}}}};
        return c;
    }

    CouplingSchedule stage2_coupling() const {
        CouplingSchedule c;
        c.system_axis = 1;
        c.pointer_axis = 2;
        c.t0 = stage2_t0;
        c.t1 = stage2_t1;
        c.strength = camera_transfer / c.window();
        c.form = CouplingSchedule::Form::projection_pair;
        c.region_minus = RegionSpec{"L", {{1, Interval{y_axis.min, 0.0}}}};
        c.region_plus = RegionSpec{"R", {{1, Interval{0.0, y_axis.max}}}};
        return c;
    }

    GridField system_state() const {
        auto p1 = make_packet(x_axis, phi1);
        auto p2 = make_packet(x_axis, phi2);
        const cplx olap = inner_product(p1, p2);
        if (std::abs(olap) > 1e-8)
            throw SemanticError("phi1 and phi2 are not orthogonal on this grid");
        return superpose(c1, p1, c2, p2, true);
    }

    void validate() const {
        const double csum = std::norm(c1) + std::norm(c2);
        if (std::abs(csum - 1.0) > 1e-10)
            throw SemanticError("|c1|^2 + |c2|^2 must equal 1");
        if (!regions_disjoint(region_L(), region_R(), 2))
            throw SemanticError("pointer regions L and R must be disjoint");
        if (has_camera && !regions_disjoint(camera_L(), camera_R(), 3))
            throw SemanticError("camera regions must be disjoint");
        if (pointer_transfer < min_separation_widths * pointer_ready.width)
            throw ConfigurationError(
                "pointer displacement below the separation requirement");
        if (phi1.center >= system_boundary || phi2.center <= system_boundary)
            throw SemanticError("phi1/phi2 must sit on opposite sides of the boundary");
        if (!(stage1_t0 < stage1_t1 && stage1_t1 <= t_final))
            throw ConfigurationError("stage-1 window must fit inside the run");
        system_state();  // orthogonality check
    }
};

struct QuadratureSplit {
    double total = 0.0;       // region integral of the full field
    double diag1 = 0.0;       // |c1|^2 branch mass in the region
    double diag2 = 0.0;
    double cross = 0.0;       // interference term
    double cross_bound = 0.0; // Cauchy-Schwarz bound on |cross|
};

struct Stage1Result {
    FieldHistory history;
    TrajectoryEnsemble ensemble;

    QuadratureSplit left, right;
    RateInterval empirical_left, empirical_right;

    // Localization of the displaced pointer packets at readout.
    double pointer1_in_L = 0.0, pointer1_in_R = 0.0;
    double pointer2_in_L = 0.0, pointer2_in_R = 0.0;

    // Evolved 1D branch factors at readout time.
    GridField phi1_t, phi2_t, pointer1_t, pointer2_t;
    cplx coeff1{}, coeff2{};
};

namespace detail {

// Evolves one product branch (phi on x) x (pointer on y) through the stage-1
// schedule using exact 1D propagation; the impulse translates the pointer.
struct BranchFactors {
    GridField phi;
    GridField pointer;
};

inline BranchFactors evolve_stage1_branch(const MeasurementScenario& s,
                                          const PacketSpec& phi, double shift) {
    GridField fx = make_packet(s.x_axis, phi);
    GridField fy = make_packet(s.y_axis, s.pointer_ready);
    HamiltonianSpec hx, hy;
    hx.masses = {s.mass_x};
    hy.masses = {s.mass_y};
    const int n1 = detail::steps_for(s.stage1_t0, s.dt, "stage-1 pre span");
    const int n2 =
        detail::steps_for(s.t_final - s.stage1_t1, s.dt, "stage-1 post span");
    {
        GridSpec gx;
        gx.axes = {s.x_axis};
        SplitOperatorStepper stx(gx, hx, s.dt);
        GridSpec gy;
        gy.axes = {s.y_axis};
        SplitOperatorStepper sty(gy, hy, s.dt);
        for (int i = 0; i < n1; ++i) {
            fx = stx.step(std::move(fx));
            fy = sty.step(std::move(fy));
        }
        fy = translate_factor(std::move(fy), shift);
        for (int i = 0; i < n2; ++i) {
            fx = stx.step(std::move(fx));
            fy = sty.step(std::move(fy));
        }
    }
    return {std::move(fx), std::move(fy)};
}

}  // namespace detail

// Full stage 1: pointer reads out which packet carries the system.
// Evolves the joint 2D field, integrates the (X, Y) ensemble through the
// impulse, and reports quadrature and empirical region statistics.
inline Stage1Result run_stage1(const MeasurementScenario& s, const EnsembleSpec& ens,
                               unsigned threads = 0) {
    s.validate();

    auto joint = tensor_product(s.system_state(), make_packet(s.y_axis, s.pointer_ready));
    HamiltonianSpec h = HamiltonianSpec::free_particle(2);
    h.masses = {s.mass_x, s.mass_y};
    h.couplings = {s.stage1_coupling()};

    Stage1Result out;
    out.history = evolve(std::move(joint), h, s.t_final,
                         {s.dt, s.snapshot_stride, Engine::split_operator});

    // Exact branch bookkeeping on 1D factors.
    auto b1 = detail::evolve_stage1_branch(s, s.phi1, -s.pointer_transfer);
    auto b2 = detail::evolve_stage1_branch(s, s.phi2, +s.pointer_transfer);
    RegionSpec yL{"L", {{0, Interval{s.y_axis.min, 0.0}}}};
    RegionSpec yR{"R", {{0, Interval{0.0, s.y_axis.max}}}};
    out.pointer1_in_L = region_probability(b1.pointer, yL);
    out.pointer1_in_R = region_probability(b1.pointer, yR);
    out.pointer2_in_L = region_probability(b2.pointer, yL);
    out.pointer2_in_R = region_probability(b2.pointer, yR);
    if (out.pointer1_in_L < 1.0 - s.localization_tol ||
        out.pointer2_in_R < 1.0 - s.localization_tol ||
        out.pointer1_in_R > s.localization_tol ||
        out.pointer2_in_L > s.localization_tol)
        throw DeviceNoGoodError(
            "pointer packets are not localized in their outcome regions");

    const auto& final_field = out.history.final_field();
    auto quad = [&](const RegionSpec& reg, const RegionSpec& reg1d) {
        QuadratureSplit q;
        q.total = region_probability(final_field, reg);
        const cplx xov = inner_product(b1.phi, b2.phi);
        const cplx yov = region_overlap(b1.pointer, b2.pointer, reg1d);
        q.diag1 = std::norm(s.c1) * region_probability(b1.pointer, reg1d);
        q.diag2 = std::norm(s.c2) * region_probability(b2.pointer, reg1d);
        q.cross = 2.0 * std::real(std::conj(s.c1) * s.c2 * xov * yov);
        q.cross_bound = 2.0 * std::abs(s.c1) * std::abs(s.c2) *
                        cross_term_bound(b1.pointer, b2.pointer, reg1d);
        return q;
    };
    out.left = quad(s.region_L(), yL);
    out.right = quad(s.region_R(), yR);

    // Ensemble through the same history.
    auto starts = sample_initial(out.history.field_at(0.0), ens);
    out.ensemble = integrate_ensemble(out.history, starts,
                                      {{s.mass_x, s.mass_y}}, threads);
    std::size_t in_l = 0, in_r = 0;
    const auto L = s.region_L();
    const auto R = s.region_R();
    for (const auto& m : out.ensemble.members) {
        Configuration fin = m.x.back();
        fin[1] = wrap_periodic(fin[1], s.y_axis.min, s.y_axis.max);
        if (L.contains(fin, 2)) ++in_l;
        if (R.contains(fin, 2)) ++in_r;
    }
    out.empirical_left = wilson_interval(in_l, out.ensemble.size());
    out.empirical_right = wilson_interval(in_r, out.ensemble.size());

    out.phi1_t = std::move(b1.phi);
    out.phi2_t = std::move(b2.phi);
    out.pointer1_t = std::move(b1.pointer);
    out.pointer2_t = std::move(b2.pointer);
    out.coeff1 = s.c1;
    out.coeff2 = s.c2;
    return out;
}

struct ConditionalWaveFunction {
    GridField field;
    bool normalized = false;
};

// Slice of a joint field at fixed coordinates on some axes (the conditional
// wave function given those coordinates), cubically interpolated along the
// fixed axes and normalized.
inline ConditionalWaveFunction conditional_wavefunction(
    const GridField& f, const std::vector<std::pair<int, double>>& fixed) {
    const auto& g = f.spec;
    std::vector<bool> is_fixed(g.dims(), false);
    for (const auto& [axis, value] : fixed) {
        if (axis < 0 || axis >= g.dims())
            throw ConfigurationError("conditional_wavefunction: bad axis");
        is_fixed[axis] = true;
    }
    std::vector<int> keep;
    for (int a = 0; a < g.dims(); ++a)
        if (!is_fixed[a]) keep.push_back(a);
    if (keep.empty() || keep.size() == static_cast<std::size_t>(g.dims()))
        throw ConfigurationError("conditional_wavefunction: fix 1..dims-1 axes");

    GridSpec out_spec;
    out_spec.boundary = g.boundary;
    for (int a : keep) out_spec.axes.push_back(g.axes[a]);

    FieldInterpolator fi(f);
    std::array<double, kMaxDims> probe{};
    for (const auto& [axis, value] : fixed)
        probe[axis] = wrap_periodic(value, g.axes[axis].min, g.axes[axis].max);

    GridField slice = GridField::zeros(out_spec, f.time_tag);
    for (std::size_t i = 0; i < slice.amp.size(); ++i) {
        const auto idx = out_spec.unflatten(i);
        for (std::size_t ka = 0; ka < keep.size(); ++ka)
            probe[keep[ka]] = g.axes[keep[ka]].center(idx[ka]);
        slice.amp[i] = fi.eval(probe).psi;
    }

    if (max_abs(slice) < kNodeEpsilon * max_abs(f))
        throw UndefinedConditionalError(
            "conditional slice lies entirely below the node threshold");
    ConditionalWaveFunction out{normalized(std::move(slice)), true};
    return out;
}

struct JointCell {
    double quadrature = 0.0;
    RateInterval empirical;
};

struct Stage2Result {
    // [pointer region][camera region]; 0 = L, 1 = R.
    JointCell cells[2][2];
    double marginal_pointer_L = 0.0;  // from the final branch field
    double stage1_pointer_L = 0.0;    // quadrature before the camera stage
    double idle_wheel_agreement = 0.0;  // fraction with camera region == pointer region
    RateInterval off_diagonal_rate;     // empirical (Y in L, Z in R) + (Y in R, Z in L)
    BranchField final_state;
    TrajectoryEnsemble ensemble;
};

// Stage 2: a camera records the pointer. Runs in the separable branch
// representation on the 3-axis configuration space.
inline Stage2Result run_stage2_camera(const MeasurementScenario& s,
                                      const EnsembleSpec& ens, unsigned threads = 0) {
    MeasurementScenario sc = s;
    sc.has_camera = true;
    sc.validate();
    if (!(sc.stage1_t1 <= sc.stage2_t0 && sc.stage2_t1 <= sc.t_final))
        throw ConfigurationError("stage-2 window must follow stage 1 inside the run");
    if (sc.camera_transfer < sc.min_separation_widths * sc.camera_ready.width)
        throw ConfigurationError("camera displacement below the separation requirement");

    // Camera record states must localize in their outcome regions just like
    // the pointer states.
    {
        auto cam = make_packet(sc.z_axis, sc.camera_ready);
        auto cl = translate_factor(cam, -sc.camera_transfer);
        RegionSpec zL{"CL", {{0, Interval{sc.z_axis.min, 0.0}}}};
        if (region_probability(cl, zL) < 1.0 - sc.localization_tol)
            throw DeviceNoGoodError(
                "camera record states are not localized in their regions");
    }

    auto initial = BranchField::product({sc.system_state(),
                                         make_packet(sc.y_axis, sc.pointer_ready),
                                         make_packet(sc.z_axis, sc.camera_ready)});
    HamiltonianSpec h = HamiltonianSpec::free_particle(3);
    h.masses = {sc.mass_x, sc.mass_y, sc.mass_z};
    h.couplings = {sc.stage1_coupling(), sc.stage2_coupling()};

    auto hist = BranchHistory::evolve(std::move(initial), h, sc.t_final,
                                      {sc.dt, sc.snapshot_stride, Engine::split_operator});

    Stage2Result out;
    out.final_state = hist.final_state();

    // Quadrature joint probabilities.
    const RegionSpec yreg[2] = {sc.region_L(), sc.region_R()};
    const RegionSpec zreg[2] = {sc.camera_L(), sc.camera_R()};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            RegionSpec both;
            both.label = yreg[i].label + "&" + zreg[j].label;
            both.intervals[1] = yreg[i].intervals[1];
            both.intervals[2] = zreg[j].intervals[2];
            out.cells[i][j].quadrature = region_probability(out.final_state, both);
        }
    out.marginal_pointer_L = region_probability(out.final_state, yreg[0]);
    out.stage1_pointer_L =
        region_probability(hist.state_at(sc.stage2_t0), yreg[0]);

    // Ensemble.
    auto starts = sample_initial_product(hist.state_at(0.0), ens);
    out.ensemble = integrate_ensemble(hist, starts,
                                      {{sc.mass_x, sc.mass_y, sc.mass_z}}, threads);
    std::size_t counts[2][2] = {{0, 0}, {0, 0}};
    std::size_t agree = 0;
    for (const auto& m : out.ensemble.members) {
        Configuration fin = m.x.back();
        fin[1] = wrap_periodic(fin[1], sc.y_axis.min, sc.y_axis.max);
        fin[2] = wrap_periodic(fin[2], sc.z_axis.min, sc.z_axis.max);
        const int yi = (fin[1] < 0.0) ? 0 : 1;
        const int zi = (fin[2] < 0.0) ? 0 : 1;
        ++counts[yi][zi];
        if (yi == zi) ++agree;
    }
    const std::size_t n = out.ensemble.size();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.cells[i][j].empirical = wilson_interval(counts[i][j], n);
    out.off_diagonal_rate = wilson_interval(counts[0][1] + counts[1][0], n);
    out.idle_wheel_agreement = static_cast<double>(agree) / n;
    return out;
}

// z-component of the guiding velocity of a (y, z) field at (Y, Z).
inline double conditional_z_velocity(const GridField& f, double y, double z,
                                     double mass_z = 1.0) {
    if (f.spec.dims() != 2)
        throw ShapeError("conditional_z_velocity expects a 2D (y, z) field");
    auto v = velocity_field(f, {y, z}, {1.0, mass_z});
    return v[1];
}

struct RepeatResult {
    double agreement = 0.0;             // fraction matching the first outcome
    RateInterval agreement_interval;
    double quadrature_disagreement = 0.0;
};

// Applies a second, identical pointer coupling with a fresh ready-state
// pointer to the post-measurement state. The first outcome is the region of
// each trajectory's pointer coordinate; the second pointer is sampled from
// the fresh ready state and jumped by the coupling.
inline RepeatResult repeat_measurement(const MeasurementScenario& s,
                                       const Stage1Result& first,
                                       std::uint64_t seed) {
    RepeatResult out;
    auto fresh = make_packet(s.y_axis, s.pointer_ready);

    // CDF of the fresh pointer for per-trajectory sampling.
    GridSpec g1;
    g1.axes = {s.y_axis};
    EnsembleSpec es;
    es.count = first.ensemble.size();
    es.master_seed = seed;
    auto fresh_samples = sample_initial(fresh, es);

    std::size_t agree = 0;
    const std::size_t n = first.ensemble.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& fin = first.ensemble.members[i].x.back();
        const bool first_left = fin[1] < 0.0;
        const double jump =
            (fin[0] < s.system_boundary) ? -s.pointer_transfer : +s.pointer_transfer;
        const bool second_left = (fresh_samples[i][0] + jump) < 0.0;
        if (first_left == second_left) ++agree;
    }
    out.agreement = static_cast<double>(agree) / n;
    out.agreement_interval = wilson_interval(agree, n);

    // Quadrature prediction. The second outcome is L with probability
    // qL1 = P(fresh pointer < +D) when X sits on the phi1 side and
    // qL2 = P(fresh pointer < -D) on the phi2 side; disagreement mass follows
    // from the joint (X, Y) density of the post-measurement field.
    RegionSpec below_plus{"bp", {{0, Interval{s.y_axis.min,
                                              std::min(s.pointer_transfer, s.y_axis.max)}}}};
    RegionSpec below_minus{"bm", {{0, Interval{s.y_axis.min,
                                               std::max(-s.pointer_transfer, s.y_axis.min)}}}};
    const double q_l1 = region_probability(fresh, below_plus);
    const double q_l2 = region_probability(fresh, below_minus);

    const auto& field = first.history.final_field();
    auto joint = [&](bool x_side1, bool y_left) {
        RegionSpec r;
        r.label = "joint";
        r.intervals[0] = x_side1 ? Interval{s.x_axis.min, s.system_boundary}
                                 : Interval{s.system_boundary, s.x_axis.max};
        r.intervals[1] = y_left ? Interval{s.y_axis.min, 0.0}
                                : Interval{0.0, s.y_axis.max};
        return region_probability(field, r);
    };
    out.quadrature_disagreement = joint(true, true) * (1.0 - q_l1) +
                                  joint(false, true) * (1.0 - q_l2) +
                                  joint(true, false) * q_l1 +
                                  joint(false, false) * q_l2;
    return out;
}

}  // namespace pilotwave
