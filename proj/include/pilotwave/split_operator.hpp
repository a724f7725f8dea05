#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "pilotwave/field.hpp"
#include "pilotwave/hamiltonian.hpp"

namespace pilotwave {

// Largest phase advance per step allowed by the stability guard, from the
// potential extremum and the grid Nyquist kinetic eigenvalue.
inline double guard_phase(const GridSpec& g, const HamiltonianSpec& h, double dt,
                          const std::vector<double>& potential) {
    double vmax = 0.0;
    for (double v : potential) vmax = std::max(vmax, std::abs(v));
    double kin = 0.0;
    for (int a = 0; a < g.dims(); ++a) {
        const double knyq = std::numbers::pi / g.axes[a].spacing();
        kin += knyq * knyq / (2.0 * h.masses[a]);
    }
    return dt * std::max(vmax, kin);
}

inline constexpr double kGuardLimit = std::numbers::pi / 4.0;

// Strang splitting: half potential, full spectral kinetic, half potential.
// Exactly unitary on periodic grids; the absorbing layer damps by design.
class SplitOperatorStepper {
public:
    SplitOperatorStepper(const GridSpec& grid, const HamiltonianSpec& h, double dt)
        : grid_(grid), dt_(dt) {
        grid_.validate();
        h.validate(grid_);
        if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
        const auto v = h.potential.evaluate(grid_, h.masses);
        const double phase = guard_phase(grid_, h, dt, v);
        if (phase >= kGuardLimit)
            throw StepSizeError("stability guard violated: phase per step " +
                                std::to_string(phase) + " >= pi/4");

        exp_v_half_.resize(grid_.size());
        std::vector<double> absorb;
        if (grid_.boundary == Boundary::absorbing_layer) absorb = absorber_profile(grid_);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            cplx e = std::polar(1.0, -0.5 * dt * v[i]);
            if (!absorb.empty()) e *= std::exp(-0.5 * dt * absorb[i]);
            exp_v_half_[i] = e;
        }

        exp_k_.resize(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const auto idx = grid_.unflatten(i);
            double k2 = 0.0;
            for (int a = 0; a < grid_.dims(); ++a) {
                const double k = fft_wavenumber_even(grid_.axes[a], idx[a]);
                k2 += k * k / (2.0 * h.masses[a]);
            }
            exp_k_[i] = std::polar(1.0, -dt * k2);
        }

        for (int a = 0; a < grid_.dims(); ++a)
            transforms_.push_back(std::make_unique<AxisTransform>(grid_, a));
    }

    double dt() const { return dt_; }
    const GridSpec& grid() const { return grid_; }

    GridField step(GridField f) const {
        if (!f.spec.same_shape(grid_)) throw ShapeError("stepper grid mismatch");
        cplx* d = f.amp.data();
        for (std::size_t i = 0; i < f.amp.size(); ++i) d[i] *= exp_v_half_[i];
        for (auto& tx : transforms_) tx->apply(d, false);
        for (std::size_t i = 0; i < f.amp.size(); ++i) d[i] *= exp_k_[i];
        for (auto& tx : transforms_) tx->apply(d, true);
        for (std::size_t i = 0; i < f.amp.size(); ++i) d[i] *= exp_v_half_[i];
        f.time_tag += dt_;
        return f;
    }

private:
    GridSpec grid_;
    double dt_;
    std::vector<cplx> exp_v_half_;
    std::vector<cplx> exp_k_;
    mutable std::vector<std::unique_ptr<AxisTransform>> transforms_;
};

inline GridField step_split_operator(const GridField& f, const HamiltonianSpec& h,
                                     double dt) {
    SplitOperatorStepper s(f.spec, h, dt);
    return s.step(f);
}

// <psi|H|psi> with the spectral kinetic term (real part; imaginary part is
// roundoff for Hermitian H).
inline double energy_expectation(const GridField& f, const HamiltonianSpec& h) {
    const auto& g = f.spec;
    const auto v = h.potential.evaluate(g, h.masses);
    double pot = 0.0;
    for (std::size_t i = 0; i < f.amp.size(); ++i) pot += v[i] * std::norm(f.amp[i]);
    pot *= g.cell_volume();

    GridField hat = f;
    for (int a = 0; a < g.dims(); ++a) {
        AxisTransform tx(g, a);
        tx.apply(hat.amp.data(), false);
    }
    double kin = 0.0;
    for (std::size_t i = 0; i < hat.amp.size(); ++i) {
        const auto idx = g.unflatten(i);
        double k2 = 0.0;
        for (int a = 0; a < g.dims(); ++a) {
            const double k = fft_wavenumber_even(g.axes[a], idx[a]);
            k2 += k * k / (2.0 * h.masses[a]);
        }
        kin += k2 * std::norm(hat.amp[i]);
    }
    kin *= g.cell_volume() / static_cast<double>(g.size());
    return kin + pot;
}

// Applies the net effect of an impulsive coupling window: the pointer-axis
// coordinate is displaced by transfer * observable(system coordinate),
// realized as a phase in the pointer-axis Fourier representation. Unitary,
// so normalization is preserved exactly.
inline GridField apply_measurement_coupling(GridField f, const CouplingSchedule& c) {
    c.validate(f.spec);
    const int sa = c.system_axis;
    const int pa = c.pointer_axis;
    const auto& g = f.spec;

    AxisTransform tx(g, pa);
    tx.apply(f.amp.data(), false);
    for (std::size_t i = 0; i < f.amp.size(); ++i) {
        const auto idx = g.unflatten(i);
        const double x = g.axes[sa].center(idx[sa]);
        const double k = fft_wavenumber_even(g.axes[pa], idx[pa]);
        f.amp[i] *= std::polar(1.0, -k * c.displacement(x));
    }
    tx.apply(f.amp.data(), true);
    f.time_tag = c.t1;
    return f;
}

}  // namespace pilotwave
