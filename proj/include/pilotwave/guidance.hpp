#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "pilotwave/history.hpp"
#include "pilotwave/interpolate.hpp"

namespace pilotwave {

using Configuration = std::array<double, kMaxDims>;

enum class GradientMethod { spectral, fd4 };

inline constexpr double kNodeEpsilon = 1e-7;  // of max |psi|

// Guiding velocity v_a = Im(d_a psi / psi) / m_a at an off-grid point.
// Gradients are formed on the grid (spectral by default) and interpolated
// cubically together with psi.
inline std::array<double, kMaxDims> velocity_field(
    const GridField& f, const Configuration& x, const std::vector<double>& masses,
    GradientMethod method = GradientMethod::spectral) {
    const auto& g = f.spec;
    if (static_cast<int>(masses.size()) != g.dims())
        throw ConfigurationError("velocity_field: need one mass per axis");

    std::array<double, kMaxDims> xw = x;
    for (int a = 0; a < g.dims(); ++a)
        xw[a] = wrap_periodic(xw[a], g.axes[a].min, g.axes[a].max);

    FieldInterpolator fi(f);
    const auto pe = fi.eval(xw);
    if (std::abs(pe.psi) < kNodeEpsilon * max_abs(f))
        throw NodeError("velocity_field: evaluation too close to a node");

    std::array<double, kMaxDims> v{};
    for (int a = 0; a < g.dims(); ++a) {
        GridField grad = (method == GradientMethod::spectral) ? spectral_gradient(f, a)
                                                              : fd4_gradient(f, a);
        FieldInterpolator gi(grad);
        const cplx dpsi = gi.eval(xw).psi;
        v[a] = std::imag(dpsi / pe.psi) / masses[a];
        if (!std::isfinite(v[a])) throw NodeError("velocity_field: non-finite velocity");
    }
    return v;
}

enum class TrajectoryStatus { active, absorbed };

struct Trajectory {
    std::vector<Configuration> x;  // one entry per sample time
    TrajectoryStatus status = TrajectoryStatus::active;
    std::vector<double> node_times;  // node-regularized-at
};

struct TrajectoryEnsemble {
    std::vector<double> times;
    int dims = 1;
    std::vector<Trajectory> members;

    std::size_t size() const { return members.size(); }

    int time_index(double t) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) < 1e-9) return static_cast<int>(i);
        throw DomainError("no trajectory sample at t = " + std::to_string(t));
    }

    std::vector<double> coordinates_at(int ti, int axis) const {
        std::vector<double> out(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) out[i] = members[i].x[ti][axis];
        return out;
    }
};

struct IntegrateOptions {
    std::vector<double> masses;
    double node_epsilon = kNodeEpsilon;
};

// RK4 over the stored history, one step per snapshot interval, with linear
// time interpolation inside the interval. Impulse windows advance the
// pointer coordinate exactly. At a node the velocity is frozen at its last
// finite value for that step and the event is logged.
template <typename History>
Trajectory integrate_trajectory(const History& h, const Configuration& x0,
                                const IntegrateOptions& opt) {
    const auto& g = h.grid();
    const int d = g.dims();
    if (static_cast<int>(opt.masses.size()) != d)
        throw ConfigurationError("integrate_trajectory: need one mass per axis");

    const auto& times = h.sample_times();
    Trajectory traj;
    traj.x.reserve(times.size());

    Configuration x = x0;
    traj.x.push_back(x);

    std::array<double, kMaxDims> last_v{};
    bool have_last_v = false;

    auto velocity = [&](int interval, double alpha, const Configuration& p,
                        double t) -> std::array<double, kMaxDims> {
        const auto s = h.eval(interval, alpha, p);
        if (std::abs(s.pe.psi) < opt.node_epsilon * s.max_amp) {
            if (traj.node_times.empty() || traj.node_times.back() != t)
                traj.node_times.push_back(t);
            return last_v;  // freeze through the node
        }
        std::array<double, kMaxDims> v{};
        for (int a = 0; a < d; ++a) {
            v[a] = std::imag(s.pe.grad[a] / s.pe.psi) / opt.masses[a];
            if (!std::isfinite(v[a])) v[a] = last_v[a];
        }
        last_v = v;
        have_last_v = true;
        return v;
    };

    for (int i = 0; i + 1 < static_cast<int>(times.size()); ++i) {
        if (traj.status == TrajectoryStatus::absorbed) {
            traj.x.push_back(x);
            continue;
        }
        const double t0 = times[i], t1 = times[i + 1];
        const double dt = t1 - t0;
        if (h.interval_is_impulse(i)) {
            // Spectral displacement of the field is periodic, so the
            // trajectory jump wraps the same way.
            const auto& c = h.impulse(i);
            const auto& ax = g.axes[c.pointer_axis];
            x[c.pointer_axis] = wrap_periodic(
                x[c.pointer_axis] + c.displacement(x[c.system_axis]), ax.min, ax.max);
        } else {
            const auto k1 = velocity(i, 0.0, x, t0);
            Configuration p2 = x;
            for (int a = 0; a < d; ++a) p2[a] += 0.5 * dt * k1[a];
            const auto k2 = velocity(i, 0.5, p2, t0 + 0.5 * dt);
            Configuration p3 = x;
            for (int a = 0; a < d; ++a) p3[a] += 0.5 * dt * k2[a];
            const auto k3 = velocity(i, 0.5, p3, t0 + 0.5 * dt);
            Configuration p4 = x;
            for (int a = 0; a < d; ++a) p4[a] += dt * k3[a];
            const auto k4 = velocity(i, 1.0, p4, t1);
            for (int a = 0; a < d; ++a)
                x[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
        if (in_absorbing_layer(g, x)) traj.status = TrajectoryStatus::absorbed;
        traj.x.push_back(x);
    }
    (void)have_last_v;
    return traj;
}

struct NoCrossingReport {
    std::size_t violations = 0;
    double worst_overlap = 0.0;  // largest ordering inversion found
    std::vector<std::pair<int, int>> samples;  // (time index, rank index), first few

    bool passed() const { return violations == 0; }
};

// Checks that the initial ordering of trajectory coordinates along `axis`
// is preserved at every sample time, up to `tolerance` (flow uniqueness in
// a shared 1D field forbids crossings).
inline NoCrossingReport check_no_crossing(const TrajectoryEnsemble& ens, int axis,
                                          double tolerance) {
    NoCrossingReport rep;
    if (ens.members.empty()) return rep;
    const std::size_t n = ens.members.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ens.members[a].x[0][axis] < ens.members[b].x[0][axis];
    });
    for (std::size_t ti = 0; ti < ens.times.size(); ++ti) {
        for (std::size_t r = 0; r + 1 < n; ++r) {
            const double lo = ens.members[order[r]].x[ti][axis];
            const double hi = ens.members[order[r + 1]].x[ti][axis];
            if (lo > hi + tolerance) {
                ++rep.violations;
                rep.worst_overlap = std::max(rep.worst_overlap, lo - hi);
                if (rep.samples.size() < 16)
                    rep.samples.emplace_back(static_cast<int>(ti), static_cast<int>(r));
            }
        }
    }
    return rep;
}

}  // namespace pilotwave
