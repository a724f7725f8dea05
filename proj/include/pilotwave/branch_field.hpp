#pragma once

#include <vector>

#include "pilotwave/history.hpp"
#include "pilotwave/sampling.hpp"

namespace pilotwave {

// Wave function kept as a sum of products of 1D factors,
//   psi(x) = sum_b coeff_b * prod_a f_{b,a}(x_a).
// Separable Hamiltonians evolve each factor independently and projection-pair
// couplings split branches exactly, so the joint field never needs to be
// materialized. This is what makes 3-axis scenarios cheap.
struct BranchField {
    struct Branch {
        cplx coeff{1.0, 0.0};
        std::vector<GridField> factors;  // one 1D field per axis
    };

    GridSpec grid;  // joint grid synthesized from the factor axes
    std::vector<Branch> branches;
    double time_tag = 0.0;

    static BranchField product(std::vector<GridField> factors, double t = 0.0) {
        BranchField bf;
        bf.time_tag = t;
        bf.grid.boundary = Boundary::periodic;
        for (const auto& f : factors) {
            if (f.spec.dims() != 1)
                throw ShapeError("branch factors must be 1D fields");
            bf.grid.axes.push_back(f.spec.axes[0]);
        }
        bf.grid.validate();
        Branch b;
        b.factors = std::move(factors);
        bf.branches.push_back(std::move(b));
        return bf;
    }

    int dims() const { return grid.dims(); }
};

// <f|g> over a region for a pair of branches: product of 1D overlaps.
inline cplx branch_pair_overlap(const BranchField::Branch& a,
                                const BranchField::Branch& b,
                                const RegionSpec& r, int dims) {
    cplx s = std::conj(a.coeff) * b.coeff;
    for (int ax = 0; ax < dims; ++ax) {
        RegionSpec axis_region;
        axis_region.label = r.label;
        axis_region.intervals[0] = r.intervals[ax];
        s *= region_overlap(a.factors[ax], b.factors[ax], axis_region);
    }
    return s;
}

inline double norm_squared(const BranchField& bf) {
    RegionSpec whole;
    cplx s{};
    for (const auto& a : bf.branches)
        for (const auto& b : bf.branches)
            s += branch_pair_overlap(a, b, whole, bf.dims());
    return std::real(s);
}

inline double region_probability(const BranchField& bf, const RegionSpec& r) {
    r.validate(bf.grid);
    cplx s{};
    for (const auto& a : bf.branches)
        for (const auto& b : bf.branches)
            s += branch_pair_overlap(a, b, r, bf.dims());
    return std::real(s);
}

// Zeroes a factor outside an interval (exact projector on the gridded field).
inline GridField project_interval(GridField f, const Interval& iv) {
    const auto& ax = f.spec.axes[0];
    for (int i = 0; i < ax.points; ++i)
        if (!iv.contains(ax.center(i))) f.amp[i] = cplx{};
    return f;
}

// Spectral translation of a 1D factor by d.
inline GridField translate_factor(GridField f, double d) {
    const auto& ax = f.spec.axes[0];
    FftPlan plan(ax.points);
    plan.transform(f.amp.data(), false);
    for (int j = 0; j < ax.points; ++j)
        f.amp[j] *= std::polar(1.0, -fft_wavenumber_even(ax, j) * d);
    plan.transform(f.amp.data(), true);
    return f;
}

// Impulsive projection-pair coupling on a branch field: every branch splits
// into (projected system factor) x (translated pointer factor) for each sign.
// Exact because the two projectors partition the axis.
inline BranchField apply_measurement_coupling(const BranchField& bf,
                                              const CouplingSchedule& c) {
    c.validate(bf.grid);
    if (c.form != CouplingSchedule::Form::projection_pair)
        throw ConfigurationError(
            "branch fields support projection-pair couplings only");
    BranchField out;
    out.grid = bf.grid;
    out.time_tag = c.t1;
    const double d = c.transfer();
    for (const auto& b : bf.branches) {
        for (int sign : {+1, -1}) {
            const auto& region = (sign > 0) ? c.region_plus : c.region_minus;
            BranchField::Branch nb;
            nb.coeff = b.coeff;
            nb.factors = b.factors;
            nb.factors[c.system_axis] = project_interval(
                b.factors[c.system_axis], *region.intervals[c.system_axis]);
            if (norm_squared(nb.factors[c.system_axis]) == 0.0) continue;
            nb.factors[c.pointer_axis] =
                translate_factor(b.factors[c.pointer_axis], sign * d);
            for (auto& f : nb.factors) f.time_tag = c.t1;
            out.branches.push_back(std::move(nb));
        }
    }
    return out;
}

// Samples a single-branch product state by per-axis inverse CDF; the joint
// density factorizes, so this is exact i.i.d. |psi|^2 sampling.
inline std::vector<Configuration> sample_initial_product(const BranchField& bf,
                                                         const EnsembleSpec& spec) {
    spec.validate();
    if (bf.branches.size() != 1)
        throw ConfigurationError("product sampling needs a single-branch state");
    const auto& factors = bf.branches.front().factors;
    const int d = bf.dims();

    std::vector<std::vector<double>> cdf(d);
    for (int a = 0; a < d; ++a) {
        double acc = 0.0;
        cdf[a].resize(factors[a].amp.size());
        for (std::size_t i = 0; i < factors[a].amp.size(); ++i) {
            acc += std::norm(factors[a].amp[i]);
            cdf[a][i] = acc;
        }
        if (acc <= 0.0) throw DomainError("cannot sample a zero factor");
    }

    std::vector<Configuration> out(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        Rng rng(derive_stream_seed(spec.master_seed, i));
        Configuration c{};
        for (int a = 0; a < d; ++a) {
            const auto& ax = bf.grid.axes[a];
            const double u = rng.uniform01() * cdf[a].back();
            const auto it = std::upper_bound(cdf[a].begin(), cdf[a].end(), u);
            const auto cell = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(it - cdf[a].begin(),
                                         static_cast<std::ptrdiff_t>(cdf[a].size()) - 1));
            c[a] = ax.min + (static_cast<double>(cell) + rng.uniform01()) * ax.spacing();
        }
        out[i] = c;
    }
    return out;
}

// Time evolution of a branch field with the same segment/impulse layout as
// FieldHistory, satisfying the same interface for trajectory integration.
class BranchHistory {
public:
    struct BranchSeries {
        cplx coeff;
        // snaps[axis][snapshot]
        std::vector<std::vector<GridField>> snaps;
        std::vector<std::vector<FieldInterpolator>> interp;
        std::vector<std::vector<double>> fmax;
    };
    struct Segment {
        std::vector<double> times;
        std::vector<BranchSeries> branches;
    };

    BranchHistory() = default;
    BranchHistory(const BranchHistory&) = delete;
    BranchHistory& operator=(const BranchHistory&) = delete;
    BranchHistory(BranchHistory&&) = default;
    BranchHistory& operator=(BranchHistory&&) = default;

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& sample_times() const { return times_; }
    int interval_count() const { return static_cast<int>(times_.size()) - 1; }
    bool interval_is_impulse(int i) const { return ref_[i].impulse >= 0; }
    const CouplingSchedule& impulse(int i) const { return impulses_[ref_[i].impulse]; }

    FieldHistory::TimePointEval eval(int i, double alpha,
                                     const std::array<double, kMaxDims>& x) const {
        const auto& r = ref_[i];
        const auto& seg = segments_[r.segment];
        std::array<double, kMaxDims> xw = x;
        for (int a = 0; a < grid_.dims(); ++a)
            xw[a] = wrap_periodic(xw[a], grid_.axes[a].min, grid_.axes[a].max);

        FieldHistory::TimePointEval out;
        const int d = grid_.dims();
        for (const auto& br : seg.branches) {
            // Per-axis factor values and derivatives, time-blended.
            std::array<cplx, kMaxDims> val{}, der{};
            double fmax_prod = std::abs(br.coeff);
            for (int a = 0; a < d; ++a) {
                std::array<double, kMaxDims> xa{};
                xa[0] = xw[a];
                auto p0 = br.interp[a][r.local].eval(xa);
                cplx v = p0.psi, g = p0.grad[0];
                double fm = br.fmax[a][r.local];
                if (alpha > 0.0) {
                    auto p1 = br.interp[a][r.local + 1].eval(xa);
                    v = (1.0 - alpha) * v + alpha * p1.psi;
                    g = (1.0 - alpha) * g + alpha * p1.grad[0];
                    fm = std::max(fm, br.fmax[a][r.local + 1]);
                }
                val[a] = v;
                der[a] = g;
                fmax_prod *= fm;
            }
            cplx prod = br.coeff;
            for (int a = 0; a < d; ++a) prod *= val[a];
            out.pe.psi += prod;
            for (int a = 0; a < d; ++a) {
                cplx gp = br.coeff * der[a];
                for (int a2 = 0; a2 < d; ++a2)
                    if (a2 != a) gp *= val[a2];
                out.pe.grad[a] += gp;
            }
            out.max_amp += fmax_prod;  // upper bound on max |psi|
        }
        return out;
    }

    // Reconstructs the branch field stored at time t.
    BranchField state_at(double t) const {
        for (const auto& seg : segments_) {
            for (std::size_t i = 0; i < seg.times.size(); ++i) {
                if (std::abs(seg.times[i] - t) >= 1e-9) continue;
                BranchField bf;
                bf.grid = grid_;
                bf.time_tag = t;
                for (const auto& br : seg.branches) {
                    BranchField::Branch nb;
                    nb.coeff = br.coeff;
                    for (int a = 0; a < grid_.dims(); ++a)
                        nb.factors.push_back(br.snaps[a][i]);
                    bf.branches.push_back(std::move(nb));
                }
                return bf;
            }
        }
        throw DomainError("no branch snapshot stored at t = " + std::to_string(t));
    }

    BranchField final_state() const { return state_at(times_.back()); }

    // Evolves `initial` to t_final under a separable Hamiltonian, applying
    // the impulsive couplings in h chronologically.
    static BranchHistory evolve(BranchField initial, const HamiltonianSpec& h,
                                double t_final, const EvolveOptions& opt) {
        h.validate(initial.grid);
        if (!h.potential.separable())
            throw ConfigurationError("branch evolution requires a separable potential");

        auto couplings = h.couplings;
        std::sort(couplings.begin(), couplings.end(),
                  [](const auto& a, const auto& b) { return a.t0 < b.t0; });

        BranchHistory out;
        out.grid_ = initial.grid;
        BranchField state = std::move(initial);

        auto run_segment = [&](double t_to) {
            Segment seg;
            seg.times.push_back(state.time_tag);
            for (auto& br : state.branches) {
                BranchSeries bs;
                bs.coeff = br.coeff;
                bs.snaps.resize(out.grid_.dims());
                for (int a = 0; a < out.grid_.dims(); ++a)
                    bs.snaps[a].push_back(br.factors[a]);
                seg.branches.push_back(std::move(bs));
            }
            const int nsteps =
                detail::steps_for(t_to - state.time_tag, opt.dt, "segment span");
            if (nsteps > 0) {
                // Per-axis 1D steppers, shared across branches.
                std::vector<SplitOperatorStepper> steppers;
                for (int a = 0; a < out.grid_.dims(); ++a) {
                    GridSpec g1;
                    g1.axes = {out.grid_.axes[a]};
                    HamiltonianSpec h1;
                    h1.masses = {h.masses[a]};
                    if (h.potential.form == PotentialSpec::Form::harmonic) {
                        h1.potential.form = PotentialSpec::Form::harmonic;
                        h1.potential.omegas = {h.potential.omegas[a]};
                    }
                    steppers.emplace_back(g1, h1, opt.dt);
                }
                for (int s = 1; s <= nsteps; ++s) {
                    for (auto& br : state.branches)
                        for (int a = 0; a < out.grid_.dims(); ++a)
                            br.factors[a] = steppers[a].step(std::move(br.factors[a]));
                    state.time_tag += opt.dt;
                    if (s % opt.snapshot_stride == 0 || s == nsteps) {
                        seg.times.push_back(state.time_tag);
                        for (std::size_t b = 0; b < state.branches.size(); ++b)
                            for (int a = 0; a < out.grid_.dims(); ++a)
                                seg.branches[b].snaps[a].push_back(
                                    state.branches[b].factors[a]);
                    }
                }
            }
            out.segments_.push_back(std::move(seg));
        };

        for (const auto& c : couplings) {
            run_segment(c.t0);
            state = apply_measurement_coupling(state, c);
            out.impulses_.push_back(c);
        }
        run_segment(t_final);
        out.finalize();
        return out;
    }

private:
    struct IntervalRef {
        int segment = 0;
        int local = 0;
        int impulse = -1;
    };

    void finalize() {
        times_.clear();
        ref_.clear();
        for (std::size_t s = 0; s < segments_.size(); ++s) {
            auto& seg = segments_[s];
            for (auto& br : seg.branches) {
                br.interp.resize(grid_.dims());
                br.fmax.resize(grid_.dims());
                for (int a = 0; a < grid_.dims(); ++a) {
                    br.interp[a].clear();
                    br.fmax[a].clear();
                    for (const auto& f : br.snaps[a]) {
                        br.interp[a].emplace_back(f);
                        br.fmax[a].push_back(max_abs(f));
                    }
                }
            }
            for (std::size_t i = 0; i < seg.times.size(); ++i) {
                if (!times_.empty() && i == 0) {
                    ref_.push_back({static_cast<int>(s) - 1, -1,
                                    static_cast<int>(s) - 1});
                } else if (i > 0) {
                    ref_.push_back({static_cast<int>(s), static_cast<int>(i) - 1, -1});
                }
                times_.push_back(seg.times[i]);
            }
        }
    }

    GridSpec grid_;
    std::vector<Segment> segments_;
    std::vector<CouplingSchedule> impulses_;
    std::vector<double> times_;
    std::vector<IntervalRef> ref_;
};

}  // namespace pilotwave
