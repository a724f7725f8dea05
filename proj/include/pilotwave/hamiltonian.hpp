#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pilotwave/field.hpp"
#include "pilotwave/grid.hpp"

namespace pilotwave {

// Scalar potential, evaluated once per grid. hbar = 1 and masses enter only
// as per-axis multipliers on the kinetic term.
struct PotentialSpec {
    enum class Form { free, harmonic, double_slit_barrier, tabulated };
    Form form = Form::free;

    std::vector<double> omegas;  // harmonic: per-axis angular frequency

    // double_slit_barrier: a soft wall across `barrier_axis` with two gaps
    // cut along the following axis.
    int barrier_axis = 0;
    double barrier_center = 0.0;
    double barrier_height = 50.0;
    double barrier_width = 0.5;
    double slit_half_separation = 2.0;
    double slit_width = 1.0;

    std::vector<double> table;  // tabulated: one value per grid cell

    std::vector<double> evaluate(const GridSpec& g,
                                 const std::vector<double>& masses) const {
        const std::size_t n = g.size();
        std::vector<double> v(n, 0.0);
        switch (form) {
            case Form::free: break;
            case Form::harmonic: {
                if (static_cast<int>(omegas.size()) != g.dims())
                    throw ConfigurationError("harmonic potential needs one omega per axis");
                for (std::size_t i = 0; i < n; ++i) {
                    const auto idx = g.unflatten(i);
                    double val = 0.0;
                    for (int a = 0; a < g.dims(); ++a) {
                        const double x = g.axes[a].center(idx[a]);
                        val += 0.5 * masses[a] * omegas[a] * omegas[a] * x * x;
                    }
                    v[i] = val;
                }
                break;
            }
            case Form::double_slit_barrier: {
                if (g.dims() < 2)
                    throw ConfigurationError("double_slit_barrier needs at least 2 axes");
                const int pa = barrier_axis;
                const int perp = (pa + 1) % g.dims();
                for (std::size_t i = 0; i < n; ++i) {
                    const auto idx = g.unflatten(i);
                    const double xp = g.axes[pa].center(idx[pa]);
                    const double xt = g.axes[perp].center(idx[perp]);
                    const double wall =
                        std::exp(-0.5 * std::pow((xp - barrier_center) / barrier_width, 2));
                    const bool in_slit =
                        std::abs(std::abs(xt) - slit_half_separation) < 0.5 * slit_width;
                    v[i] = in_slit ? 0.0 : barrier_height * wall;
                }
                break;
            }
            case Form::tabulated: {
                if (table.size() != n)
                    throw ConfigurationError("tabulated potential size does not match grid");
                v = table;
                break;
            }
        }
        for (double x : v)
            if (!std::isfinite(x)) throw ConfigurationError("potential not finite on grid");
        return v;
    }

    // True when V splits as a sum of one-axis terms.
    bool separable() const {
        return form == Form::free || form == Form::harmonic;
    }

    double axis_value(const GridSpec& g, const std::vector<double>& masses, int axis,
                      int i) const {
        if (form == Form::free) return 0.0;
        if (form == Form::harmonic) {
            const double x = g.axes[axis].center(i);
            return 0.5 * masses[axis] * omegas[axis] * omegas[axis] * x * x;
        }
        throw ConfigurationError("potential is not separable");
    }
};

// Impulsive pointer coupling: over [t0, t1] the kinetic terms are frozen and
// the pointer coordinate is advected by strength * (observable at the system
// coordinate). Net effect on the wave function is a displacement of the
// pointer factor, applied spectrally.
struct CouplingSchedule {
    enum class Form { projection_pair, linear };

    int system_axis = 0;
    int pointer_axis = 1;
    double strength = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    Form form = Form::projection_pair;
    RegionSpec region_plus;   // sign +1
    RegionSpec region_minus;  // sign -1

    double window() const { return t1 - t0; }
    double transfer() const { return strength * window(); }  // displacement scale

    void validate(const GridSpec& g) const {
        if (!(t0 < t1)) throw ConfigurationError("coupling window must have t0 < t1");
        if (!std::isfinite(transfer()))
            throw ConfigurationError("coupling transfer g*(t1-t0) must be finite");
        if (system_axis == pointer_axis || system_axis >= g.dims() ||
            pointer_axis >= g.dims())
            throw ConfigurationError("coupling axes invalid for this grid");
        if (form == Form::projection_pair) {
            const auto& ax = g.axes[system_axis];
            const auto& p = region_plus.intervals[system_axis];
            const auto& m = region_minus.intervals[system_axis];
            if (!p || !m)
                throw ConfigurationError(
                    "projection-pair regions must constrain the system axis");
            const bool disjoint = p->hi <= m->lo || m->hi <= p->lo;
            const double covered = (p->hi - p->lo) + (m->hi - m->lo);
            if (!disjoint || std::abs(covered - ax.extent()) > 1e-9 * ax.extent())
                throw ConfigurationError(
                    "projection-pair regions must partition the system axis");
        }
    }

    // Observable value at a system coordinate: +-1 for the projection pair,
    // the coordinate itself for the linear form.
    double observable(double x) const {
        if (form == Form::linear) return x;
        const auto& p = region_plus.intervals[system_axis];
        if (p && p->contains(x)) return 1.0;
        return -1.0;
    }

    double displacement(double x) const { return transfer() * observable(x); }
};

struct HamiltonianSpec {
    std::vector<double> masses;  // per grid axis
    PotentialSpec potential;
    std::vector<CouplingSchedule> couplings;

    void validate(const GridSpec& g) const {
        if (static_cast<int>(masses.size()) != g.dims())
            throw ConfigurationError("need one mass per grid axis");
        for (double m : masses)
            if (!(m > 0.0)) throw ConfigurationError("masses must be positive");
        for (const auto& c : couplings) c.validate(g);
        // At most one impulsive coupling active at a time.
        for (std::size_t i = 0; i < couplings.size(); ++i)
            for (std::size_t j = i + 1; j < couplings.size(); ++j) {
                const auto& a = couplings[i];
                const auto& b = couplings[j];
                if (!(a.t1 <= b.t0 || b.t1 <= a.t0))
                    throw ConfigurationError("coupling windows overlap");
            }
    }

    static HamiltonianSpec free_particle(int dims) {
        HamiltonianSpec h;
        h.masses.assign(dims, 1.0);
        return h;
    }
};

// Imaginary absorbing potential: quartic ramp over the outer 10% of each
// axis, peak strength 5. Keeps reflection below ~1e-4 for momenta up to a
// quarter of the grid Nyquist.
inline constexpr double kAbsorberPeak = 5.0;
inline constexpr double kAbsorberFraction = 0.10;

inline double absorber_ramp(const AxisSpec& axis, double x) {
    const double ramp = kAbsorberFraction * axis.extent();
    const double from_lo = x - axis.min;
    const double from_hi = axis.max - x;
    const double d = std::min(from_lo, from_hi);
    if (d >= ramp) return 0.0;
    const double s = 1.0 - std::max(d, 0.0) / ramp;
    return kAbsorberPeak * s * s * s * s;
}

inline std::vector<double> absorber_profile(const GridSpec& g) {
    std::vector<double> w(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        double val = 0.0;
        for (int a = 0; a < g.dims(); ++a)
            val += absorber_ramp(g.axes[a], g.axes[a].center(idx[a]));
        w[i] = val;
    }
    return w;
}

// True once a trajectory coordinate has entered the absorbing ramp.
inline bool in_absorbing_layer(const GridSpec& g, const std::array<double, kMaxDims>& x) {
    if (g.boundary != Boundary::absorbing_layer) return false;
    for (int a = 0; a < g.dims(); ++a)
        if (absorber_ramp(g.axes[a], x[a]) > 0.0) return true;
    return false;
}

}  // namespace pilotwave
