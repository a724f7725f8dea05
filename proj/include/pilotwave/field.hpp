#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "pilotwave/fft.hpp"
#include "pilotwave/grid.hpp"

namespace pilotwave {

// Complex wave function sampled on a grid. Fields are treated as immutable
// values: operations construct new fields instead of mutating in place.
struct GridField {
    GridSpec spec;
    std::vector<cplx> amp;
    double time_tag = 0.0;

    GridField() = default;
    GridField(GridSpec s, std::vector<cplx> a, double t = 0.0)
        : spec(std::move(s)), amp(std::move(a)), time_tag(t) {
        spec.validate();
        if (amp.size() != spec.size())
            throw ShapeError("amplitude array length does not match grid");
    }

    static GridField zeros(GridSpec s, double t = 0.0) {
        const auto n = s.size();
        return GridField(std::move(s), std::vector<cplx>(n), t);
    }

    const cplx& at(const std::array<int, kMaxDims>& idx) const {
        return amp[spec.flat(idx)];
    }
    cplx& at(const std::array<int, kMaxDims>& idx) { return amp[spec.flat(idx)]; }
};

inline double norm_squared(const GridField& f) {
    double s = 0.0;
    for (const auto& a : f.amp) s += std::norm(a);
    return s * f.spec.cell_volume();
}

inline GridField normalized(GridField f) {
    const double n2 = norm_squared(f);
    if (n2 <= 0.0) throw DomainError("cannot normalize a zero field");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : f.amp) a *= scale;
    return f;
}

inline cplx inner_product(const GridField& f, const GridField& g) {
    if (!f.spec.same_shape(g.spec)) throw ShapeError("inner_product: grid mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < f.amp.size(); ++i)
        s += std::conj(f.amp[i]) * g.amp[i];
    return s * f.spec.cell_volume();
}

namespace detail {

// Iterates cells whose centers lie inside the region.
template <typename Fn>
void for_each_region_cell(const GridSpec& g, const RegionSpec& r, Fn&& fn) {
    const int d = g.dims();
    std::array<int, kMaxDims> lo{}, hi{};
    for (int a = 0; a < d; ++a) {
        lo[a] = 0;
        hi[a] = g.axes[a].points;
        if (r.intervals[a]) {
            // Center of cell i is min + (i + 0.5) dx.
            const auto& ax = g.axes[a];
            const double dx = ax.spacing();
            int first = static_cast<int>(std::ceil((r.intervals[a]->lo - ax.min) / dx - 0.5));
            int last = static_cast<int>(std::ceil((r.intervals[a]->hi - ax.min) / dx - 0.5));
            lo[a] = std::clamp(first, 0, ax.points);
            hi[a] = std::clamp(last, 0, ax.points);
        }
    }
    std::array<int, kMaxDims> idx = lo;
    if (d == 1) {
        for (idx[0] = lo[0]; idx[0] < hi[0]; ++idx[0]) fn(g.flat(idx));
    } else if (d == 2) {
        for (idx[0] = lo[0]; idx[0] < hi[0]; ++idx[0])
            for (idx[1] = lo[1]; idx[1] < hi[1]; ++idx[1]) fn(g.flat(idx));
    } else {
        for (idx[0] = lo[0]; idx[0] < hi[0]; ++idx[0])
            for (idx[1] = lo[1]; idx[1] < hi[1]; ++idx[1])
                for (idx[2] = lo[2]; idx[2] < hi[2]; ++idx[2]) fn(g.flat(idx));
    }
}

}  // namespace detail

// Probability mass of |f|^2 inside a region (cell-center membership).
inline double region_probability(const GridField& f, const RegionSpec& r) {
    r.validate(f.spec);
    double s = 0.0;
    detail::for_each_region_cell(f.spec, r,
                                 [&](std::size_t i) { s += std::norm(f.amp[i]); });
    return s * f.spec.cell_volume();
}

// Region-restricted overlap integral of two fields on the same grid.
inline cplx region_overlap(const GridField& f, const GridField& g, const RegionSpec& r) {
    if (!f.spec.same_shape(g.spec)) throw ShapeError("region_overlap: grid mismatch");
    r.validate(f.spec);
    cplx s{0.0, 0.0};
    detail::for_each_region_cell(
        f.spec, r, [&](std::size_t i) { s += std::conj(f.amp[i]) * g.amp[i]; });
    return s * f.spec.cell_volume();
}

// Cauchy-Schwarz bound on |integral_r f* g|.
inline double cross_term_bound(const GridField& f, const GridField& g, const RegionSpec& r) {
    if (!f.spec.same_shape(g.spec)) throw ShapeError("cross_term_bound: grid mismatch");
    return std::sqrt(region_probability(f, r)) * std::sqrt(region_probability(g, r));
}

// Pointwise product state on the concatenated axes.
inline GridField tensor_product(const GridField& f, const GridField& g) {
    if (f.spec.dims() + g.spec.dims() > kMaxDims)
        throw ConfigurationError("tensor_product: more than 3 total axes");
    if (f.spec.boundary != g.spec.boundary)
        throw ConfigurationError("tensor_product: boundary kinds differ");
    GridSpec joint;
    joint.boundary = f.spec.boundary;
    joint.axes = f.spec.axes;
    joint.axes.insert(joint.axes.end(), g.spec.axes.begin(), g.spec.axes.end());
    std::vector<cplx> amp(joint.size());
    const std::size_t ng = g.amp.size();
    for (std::size_t i = 0; i < f.amp.size(); ++i) {
        const cplx fi = f.amp[i];
        cplx* row = amp.data() + i * ng;
        for (std::size_t j = 0; j < ng; ++j) row[j] = fi * g.amp[j];
    }
    return GridField(std::move(joint), std::move(amp), f.time_tag);
}

// Marginal density of |f|^2 over all axes except `axis`.
inline std::vector<double> marginal_density(const GridField& f, int axis) {
    const auto& g = f.spec;
    std::vector<double> out(g.axes[axis].points, 0.0);
    double dv = 1.0;
    for (int a = 0; a < g.dims(); ++a)
        if (a != axis) dv *= g.axes[a].spacing();
    for (std::size_t i = 0; i < f.amp.size(); ++i) {
        const auto idx = g.unflatten(i);
        out[idx[axis]] += std::norm(f.amp[i]) * dv;
    }
    return out;
}

// Spectral derivative along one axis (exact for band-limited periodic data).
inline GridField spectral_gradient(const GridField& f, int axis) {
    GridField out = f;
    AxisTransform tx(f.spec, axis);
    tx.apply(out.amp.data(), false);
    const auto& ax = f.spec.axes[axis];
    const int n = ax.points;
    std::size_t inner = 1;
    for (int a = axis + 1; a < f.spec.dims(); ++a)
        inner *= static_cast<std::size_t>(f.spec.axes[a].points);
    const std::size_t outer = f.spec.size() / (inner * static_cast<std::size_t>(n));
    for (std::size_t o = 0; o < outer; ++o)
        for (int j = 0; j < n; ++j) {
            const cplx ik(0.0, fft_wavenumber(ax, j));
            cplx* base = out.amp.data() + (o * n + j) * inner;
            for (std::size_t in = 0; in < inner; ++in) base[in] *= ik;
        }
    tx.apply(out.amp.data(), true);
    return out;
}

// 4th-order central difference gradient with periodic wrap.
inline GridField fd4_gradient(const GridField& f, int axis) {
    const auto& g = f.spec;
    const int n = g.axes[axis].points;
    const double h = g.axes[axis].spacing();
    std::size_t inner = 1;
    for (int a = axis + 1; a < g.dims(); ++a)
        inner *= static_cast<std::size_t>(g.axes[a].points);
    const std::size_t outer = g.size() / (inner * static_cast<std::size_t>(n));
    GridField out = GridField::zeros(g, f.time_tag);
    const double c1 = 8.0 / (12.0 * h), c2 = 1.0 / (12.0 * h);
    for (std::size_t o = 0; o < outer; ++o) {
        const cplx* src = f.amp.data() + o * n * inner;
        cplx* dst = out.amp.data() + o * n * inner;
        for (int i = 0; i < n; ++i) {
            const int ip1 = (i + 1) & (n - 1), ip2 = (i + 2) & (n - 1);
            const int im1 = (i - 1 + n) & (n - 1), im2 = (i - 2 + n) & (n - 1);
            for (std::size_t in = 0; in < inner; ++in)
                dst[i * inner + in] = c1 * (src[ip1 * inner + in] - src[im1 * inner + in]) -
                                      c2 * (src[ip2 * inner + in] - src[im2 * inner + in]);
        }
    }
    return out;
}

}  // namespace pilotwave
