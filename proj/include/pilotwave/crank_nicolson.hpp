#pragma once

#include <vector>

#include "pilotwave/field.hpp"
#include "pilotwave/hamiltonian.hpp"

namespace pilotwave {

namespace detail {

// Solves (T + corner terms) x = r for a cyclic tridiagonal system with
// constant off-diagonal `off` and corner elements equal to `off`
// (periodic 3-point Laplacian shape), via Thomas + Sherman-Morrison.
class CyclicTridiagonalSolver {
public:
    CyclicTridiagonalSolver(std::vector<cplx> diag, cplx off)
        : diag_(std::move(diag)), off_(off) {
        const std::size_t n = diag_.size();
        cprime_.resize(n);
        work_.resize(n);
        z_.resize(n);
        const cplx gamma = -diag_[0];
        mod_diag_ = diag_;
        mod_diag_[0] -= gamma;
        mod_diag_[n - 1] -= off_ * off_ / gamma;
        gamma_ = gamma;
        // z solves T z = u with u = (gamma, 0, ..., 0, off).
        std::vector<cplx> u(n, cplx{0.0, 0.0});
        u[0] = gamma;
        u[n - 1] = off_;
        thomas(u, z_);
    }

    void solve(const std::vector<cplx>& rhs, std::vector<cplx>& x) const {
        const std::size_t n = diag_.size();
        thomas(rhs, x);
        const cplx fact = (x[0] + off_ / gamma_ * x[n - 1]) /
                          (1.0 + z_[0] + off_ / gamma_ * z_[n - 1]);
        for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z_[i];
    }

private:
    void thomas(const std::vector<cplx>& rhs, std::vector<cplx>& x) const {
        const std::size_t n = diag_.size();
        cplx m = mod_diag_[0];
        cprime_[0] = off_ / m;
        work_[0] = rhs[0] / m;
        for (std::size_t i = 1; i < n; ++i) {
            m = mod_diag_[i] - off_ * cprime_[i - 1];
            cprime_[i] = off_ / m;
            work_[i] = (rhs[i] - off_ * work_[i - 1]) / m;
        }
        x[n - 1] = work_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = work_[i] - cprime_[i] * x[i + 1];
    }

    std::vector<cplx> diag_, mod_diag_, z_;
    mutable std::vector<cplx> cprime_, work_;
    cplx off_, gamma_;
};

}  // namespace detail

// Crank-Nicolson propagation with a 3-point finite-difference kinetic term
// on periodic topology. Supports 1D grids with any potential and 2D grids
// with separable potentials (applied axis by axis; the axis Hamiltonians
// commute, so the composition keeps second order in dt).
class CrankNicolsonStepper {
public:
    CrankNicolsonStepper(const GridSpec& grid, const HamiltonianSpec& h, double dt)
        : grid_(grid), dt_(dt) {
        grid_.validate();
        h.validate(grid_);
        if (grid_.dims() > 2)
            throw ConfigurationError("Crank-Nicolson supports 1D or separable 2D only");
        if (grid_.dims() == 2 && !h.potential.separable())
            throw ConfigurationError("2D Crank-Nicolson requires a separable potential");

        std::vector<double> full_v;
        if (grid_.dims() == 1) full_v = h.potential.evaluate(grid_, h.masses);

        for (int a = 0; a < grid_.dims(); ++a) {
            const auto& ax = grid_.axes[a];
            const int n = ax.points;
            const double hx = ax.spacing();
            const double inv = 1.0 / (2.0 * h.masses[a] * hx * hx);
            const cplx ihalf(0.0, 0.5 * dt);

            std::vector<cplx> diag_a(n), diag_b(n);
            for (int i = 0; i < n; ++i) {
                double v = (grid_.dims() == 1) ? full_v[i]
                                               : h.potential.axis_value(grid_, h.masses, a, i);
                cplx hval = cplx(2.0 * inv + v, 0.0);
                if (grid_.boundary == Boundary::absorbing_layer)
                    hval -= cplx(0.0, absorber_ramp(ax, ax.center(i)));
                diag_a[i] = 1.0 + ihalf * hval;
                diag_b[i] = 1.0 - ihalf * hval;
            }
            const cplx off_h(-inv, 0.0);
            axes_.push_back(AxisSolver{
                detail::CyclicTridiagonalSolver(diag_a, ihalf * off_h),
                std::move(diag_b), -ihalf * off_h, n});
        }
    }

    double dt() const { return dt_; }

    GridField step(GridField f) const {
        if (!f.spec.same_shape(grid_)) throw ShapeError("stepper grid mismatch");
        for (int a = 0; a < grid_.dims(); ++a) apply_axis(f, a);
        f.time_tag += dt_;
        return f;
    }

private:
    struct AxisSolver {
        detail::CyclicTridiagonalSolver solver;
        std::vector<cplx> diag_b;
        cplx off_b;
        int n;
    };

    void apply_axis(GridField& f, int axis) const {
        const auto& s = axes_[axis];
        const int n = s.n;
        std::size_t inner = 1;
        for (int a = axis + 1; a < grid_.dims(); ++a)
            inner *= static_cast<std::size_t>(grid_.axes[a].points);
        const std::size_t lines = f.amp.size() / static_cast<std::size_t>(n);
        const std::size_t outers = lines / inner;

        std::vector<cplx> line(n), rhs(n), sol(n);
        for (std::size_t o = 0; o < outers; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                cplx* base = f.amp.data() + o * inner * static_cast<std::size_t>(n) + in;
                for (int i = 0; i < n; ++i) line[i] = base[i * inner];
                for (int i = 0; i < n; ++i) {
                    const cplx up = line[(i + 1) % n];
                    const cplx dn = line[(i - 1 + n) % n];
                    rhs[i] = s.diag_b[i] * line[i] + s.off_b * (up + dn);
                }
                s.solver.solve(rhs, sol);
                for (int i = 0; i < n; ++i) base[i * inner] = sol[i];
            }
        }
    }

    GridSpec grid_;
    double dt_;
    std::vector<AxisSolver> axes_;
};

inline GridField step_crank_nicolson(const GridField& f, const HamiltonianSpec& h,
                                     double dt) {
    CrankNicolsonStepper s(f.spec, h, dt);
    return s.step(f);
}

}  // namespace pilotwave
