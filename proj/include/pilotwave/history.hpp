#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "pilotwave/crank_nicolson.hpp"
#include "pilotwave/interpolate.hpp"
#include "pilotwave/split_operator.hpp"

namespace pilotwave {

enum class Engine { split_operator, crank_nicolson };

struct EvolveOptions {
    double dt = 1e-3;
    int snapshot_stride = 1;
    Engine engine = Engine::split_operator;
};

// Stored time evolution: continuous PDE segments separated by impulsive
// coupling windows. Trajectory integration interpolates inside segments and
// jumps analytically across windows (kinetic terms are frozen there, so the
// exact in-window motion of the pointer coordinate is linear).
class FieldHistory {
public:
    struct Segment {
        std::vector<double> times;
        std::vector<GridField> fields;
        std::vector<double> max_amp;
    };

    std::vector<Segment> segments;
    std::vector<CouplingSchedule> impulses;  // impulses[i] joins segment i to i+1

    // Interpolators hold pointers into `segments`; copying would leave them
    // dangling, so histories are move-only.
    FieldHistory() = default;
    FieldHistory(const FieldHistory&) = delete;
    FieldHistory& operator=(const FieldHistory&) = delete;
    FieldHistory(FieldHistory&&) = default;
    FieldHistory& operator=(FieldHistory&&) = default;

    const GridSpec& grid() const { return segments.front().fields.front().spec; }
    int dims() const { return grid().dims(); }

    double t_begin() const { return segments.front().times.front(); }
    double t_end() const { return segments.back().times.back(); }

    // Global snapshot times; consecutive segment boundary pairs bracket the
    // impulse windows.
    const std::vector<double>& sample_times() const { return times_; }
    int interval_count() const { return static_cast<int>(times_.size()) - 1; }

    bool interval_is_impulse(int i) const { return ref_[i].impulse >= 0; }
    const CouplingSchedule& impulse(int i) const { return impulses[ref_[i].impulse]; }

    struct TimePointEval {
        PointEval pe;
        double max_amp = 0.0;
    };

    // Field value and gradient at fraction alpha across interval i, blended
    // linearly in time between the bracketing snapshots.
    TimePointEval eval(int i, double alpha, const std::array<double, kMaxDims>& x) const {
        const auto& r = ref_[i];
        const auto& seg = segments[r.segment];
        std::array<double, kMaxDims> xw = x;
        wrap(xw);
        if (alpha <= 0.0) return sample(seg, r.local, xw);
        if (alpha >= 1.0) return sample(seg, r.local + 1, xw);
        auto a = sample(seg, r.local, xw);
        auto b = sample(seg, r.local + 1, xw);
        TimePointEval out;
        out.pe.psi = (1.0 - alpha) * a.pe.psi + alpha * b.pe.psi;
        for (int d = 0; d < dims(); ++d)
            out.pe.grad[d] = (1.0 - alpha) * a.pe.grad[d] + alpha * b.pe.grad[d];
        out.max_amp = std::max(a.max_amp, b.max_amp);
        return out;
    }

    // Stored snapshot at time t (must match a snapshot time).
    const GridField& field_at(double t) const {
        for (const auto& seg : segments) {
            for (std::size_t i = 0; i < seg.times.size(); ++i)
                if (std::abs(seg.times[i] - t) < 1e-9) return seg.fields[i];
        }
        throw DomainError("no snapshot stored at t = " + std::to_string(t));
    }

    const GridField& final_field() const { return segments.back().fields.back(); }

    // Called once after segments/impulses are filled.
    void finalize() {
        times_.clear();
        ref_.clear();
        interp_.clear();
        for (std::size_t s = 0; s < segments.size(); ++s) {
            auto& seg = segments[s];
            seg.max_amp.clear();
            std::vector<FieldInterpolator> interps;
            for (const auto& f : seg.fields) {
                seg.max_amp.push_back(max_abs(f));
                interps.emplace_back(f);
            }
            interp_.push_back(std::move(interps));
            for (std::size_t i = 0; i < seg.times.size(); ++i) {
                if (!times_.empty() && i == 0) {
                    // Boundary snapshot opens an impulse interval.
                    ref_.push_back({static_cast<int>(s) - 1, -1,
                                    static_cast<int>(s) - 1});
                } else if (i > 0) {
                    ref_.push_back({static_cast<int>(s), static_cast<int>(i) - 1, -1});
                }
                times_.push_back(seg.times[i]);
            }
        }
    }

private:
    struct IntervalRef {
        int segment = 0;
        int local = 0;    // snapshot index of the interval start
        int impulse = -1;
    };

    TimePointEval sample(const Segment& seg, int local,
                         const std::array<double, kMaxDims>& x) const {
        const auto sidx = static_cast<std::size_t>(&seg - segments.data());
        TimePointEval out;
        out.pe = interp_[sidx][local].eval(x);
        out.max_amp = seg.max_amp[local];
        return out;
    }

    void wrap(std::array<double, kMaxDims>& x) const {
        const auto& g = grid();
        for (int a = 0; a < g.dims(); ++a)
            x[a] = wrap_periodic(x[a], g.axes[a].min, g.axes[a].max);
    }

    std::vector<double> times_;
    std::vector<IntervalRef> ref_;
    std::vector<std::vector<FieldInterpolator>> interp_;
};

namespace detail {

inline int steps_for(double span, double dt, const char* what) {
    const double raw = span / dt;
    const int n = static_cast<int>(std::round(raw));
    if (std::abs(raw - n) > 1e-6)
        throw ConfigurationError(std::string(what) +
                                 " must be an integer multiple of dt");
    return n;
}

}  // namespace detail

// Integrates the Schrodinger evolution and stores snapshots every
// `snapshot_stride` steps. Coupling windows in h are applied impulsively in
// chronological order.
inline FieldHistory evolve(GridField psi0, const HamiltonianSpec& h, double t_final,
                           const EvolveOptions& opt) {
    psi0.spec.validate();
    h.validate(psi0.spec);
    if (opt.snapshot_stride < 1) throw ConfigurationError("snapshot stride must be >= 1");

    auto couplings = h.couplings;
    std::sort(couplings.begin(), couplings.end(),
              [](const auto& a, const auto& b) { return a.t0 < b.t0; });
    for (const auto& c : couplings)
        if (c.t0 < psi0.time_tag - 1e-12 || c.t1 > t_final + 1e-12)
            throw ConfigurationError("coupling window outside the run interval");

    HamiltonianSpec base = h;
    base.couplings.clear();

    FieldHistory hist;
    GridField psi = std::move(psi0);

    auto run_segment = [&](double t_to) {
        FieldHistory::Segment seg;
        seg.times.push_back(psi.time_tag);
        seg.fields.push_back(psi);
        const int nsteps = detail::steps_for(t_to - psi.time_tag, opt.dt, "segment span");
        if (nsteps > 0) {
            std::unique_ptr<SplitOperatorStepper> so;
            std::unique_ptr<CrankNicolsonStepper> cn;
            if (opt.engine == Engine::split_operator)
                so = std::make_unique<SplitOperatorStepper>(psi.spec, base, opt.dt);
            else
                cn = std::make_unique<CrankNicolsonStepper>(psi.spec, base, opt.dt);
            for (int s = 1; s <= nsteps; ++s) {
                psi = so ? so->step(std::move(psi)) : cn->step(std::move(psi));
                if (s % opt.snapshot_stride == 0 || s == nsteps) {
                    seg.times.push_back(psi.time_tag);
                    seg.fields.push_back(psi);
                }
            }
        }
        hist.segments.push_back(std::move(seg));
    };

    for (const auto& c : couplings) {
        run_segment(c.t0);
        psi = apply_measurement_coupling(std::move(psi), c);
        hist.impulses.push_back(c);
    }
    run_segment(t_final);
    hist.finalize();
    return hist;
}

}  // namespace pilotwave
