#pragma once

#include <array>
#include <cmath>

#include "pilotwave/field.hpp"

namespace pilotwave {

namespace detail {

// Catmull-Rom cubic weights and their u-derivatives on the unit interval.
inline void catmull_rom(double u, std::array<double, 4>& w, std::array<double, 4>& dw) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = 0.5 * (-u3 + 2.0 * u2 - u);
    w[1] = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0);
    w[2] = 0.5 * (-3.0 * u3 + 4.0 * u2 + u);
    w[3] = 0.5 * (u3 - u2);
    dw[0] = 0.5 * (-3.0 * u2 + 4.0 * u - 1.0);
    dw[1] = 0.5 * (9.0 * u2 - 10.0 * u);
    dw[2] = 0.5 * (-9.0 * u2 + 8.0 * u + 1.0);
    dw[3] = 0.5 * (3.0 * u2 - 2.0 * u);
}

}  // namespace detail

struct PointEval {
    cplx psi{};
    std::array<cplx, kMaxDims> grad{};
};

// Cubic interpolation of a field and its gradient at an off-grid point.
// The gradient is the derivative of the interpolant itself, which keeps the
// velocity field seen by trajectories consistent with the interpolated
// amplitude. Stencils wrap periodically.
class FieldInterpolator {
public:
    explicit FieldInterpolator(const GridField& f) : f_(&f) {
        const auto& g = f.spec;
        for (int a = 0; a < g.dims(); ++a) {
            n_[a] = g.axes[a].points;
            inv_dx_[a] = 1.0 / g.axes[a].spacing();
            min_[a] = g.axes[a].min;
        }
        stride_[g.dims() - 1] = 1;
        for (int a = g.dims() - 2; a >= 0; --a)
            stride_[a] = stride_[a + 1] * static_cast<std::size_t>(n_[a + 1]);
    }

    PointEval eval(const std::array<double, kMaxDims>& x) const {
        const int d = f_->spec.dims();
        std::array<std::array<int, 4>, kMaxDims> idx{};
        std::array<std::array<double, 4>, kMaxDims> w{}, dw{};
        for (int a = 0; a < d; ++a) {
            // Samples sit at cell centers min + (i + 0.5) dx.
            const double s = (x[a] - min_[a]) * inv_dx_[a] - 0.5;
            const double fl = std::floor(s);
            const double u = s - fl;
            const int i0 = static_cast<int>(fl);
            detail::catmull_rom(u, w[a], dw[a]);
            for (int q = 0; q < 4; ++q) {
                int i = i0 - 1 + q;
                i %= n_[a];
                if (i < 0) i += n_[a];
                idx[a][q] = i;
            }
            for (int q = 0; q < 4; ++q) dw[a][q] *= inv_dx_[a];
        }

        PointEval out{};
        const cplx* amp = f_->amp.data();
        if (d == 1) {
            for (int q = 0; q < 4; ++q) {
                const cplx v = amp[idx[0][q]];
                out.psi += w[0][q] * v;
                out.grad[0] += dw[0][q] * v;
            }
        } else if (d == 2) {
            for (int qa = 0; qa < 4; ++qa) {
                const std::size_t base = idx[0][qa] * stride_[0];
                cplx row{}, drow{};
                for (int qb = 0; qb < 4; ++qb) {
                    const cplx v = amp[base + idx[1][qb]];
                    row += w[1][qb] * v;
                    drow += dw[1][qb] * v;
                }
                out.psi += w[0][qa] * row;
                out.grad[0] += dw[0][qa] * row;
                out.grad[1] += w[0][qa] * drow;
            }
        } else {
            for (int qa = 0; qa < 4; ++qa)
                for (int qb = 0; qb < 4; ++qb) {
                    const std::size_t base =
                        idx[0][qa] * stride_[0] + idx[1][qb] * stride_[1];
                    cplx row{}, drow{};
                    for (int qc = 0; qc < 4; ++qc) {
                        const cplx v = amp[base + idx[2][qc]];
                        row += w[2][qc] * v;
                        drow += dw[2][qc] * v;
                    }
                    const double wab = w[0][qa] * w[1][qb];
                    out.psi += wab * row;
                    out.grad[0] += dw[0][qa] * w[1][qb] * row;
                    out.grad[1] += w[0][qa] * dw[1][qb] * row;
                    out.grad[2] += wab * drow;
                }
        }
        return out;
    }

private:
    const GridField* f_;
    std::array<int, kMaxDims> n_{};
    std::array<double, kMaxDims> inv_dx_{}, min_{};
    std::array<std::size_t, kMaxDims> stride_{};
};

inline double max_abs(const GridField& f) {
    double m = 0.0;
    for (const auto& a : f.amp) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace pilotwave
