#pragma once

#include <cmath>
#include <vector>

#include "pilotwave/field.hpp"

namespace pilotwave {

// 1D wave packet builders. Width conventions:
//   gaussian: amplitude ~ exp(-(x-c)^2 / (2 w^2)), so the position density
//             |psi|^2 has standard deviation w / sqrt(2).
//   cauchy:   amplitude ~ (1 + ((x-c)/w)^2)^(-1/2), so |psi|^2 is a truncated
//             Cauchy (Lorentzian) density with scale w. Heavy tails on purpose.
enum class PacketKind { gaussian, cauchy };

struct PacketSpec {
    PacketKind kind = PacketKind::gaussian;
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;

    // Position-density standard deviation for the gaussian case.
    double position_stddev() const { return width / std::numbers::sqrt2; }
};

inline GridField make_packet(const AxisSpec& axis, const PacketSpec& p,
                             Boundary boundary = Boundary::periodic) {
    GridSpec g;
    g.axes = {axis};
    g.boundary = boundary;
    std::vector<cplx> amp(axis.points);
    for (int i = 0; i < axis.points; ++i) {
        const double x = axis.center(i);
        const double u = (x - p.center) / p.width;
        double mag = 0.0;
        switch (p.kind) {
            case PacketKind::gaussian: mag = std::exp(-0.5 * u * u); break;
            case PacketKind::cauchy: mag = 1.0 / std::sqrt(1.0 + u * u); break;
        }
        amp[i] = std::polar(mag, p.momentum * (x - p.center));
    }
    return normalized(GridField(std::move(g), std::move(amp)));
}

// Normalized plane wave exp(i k x) with k snapped to the nearest grid mode,
// so it is an exact eigenstate of the spectral kinetic operator.
inline GridField make_plane_wave(const AxisSpec& axis, double k,
                                 Boundary boundary = Boundary::periodic) {
    const double dk = 2.0 * std::numbers::pi / axis.extent();
    const double ks = dk * std::round(k / dk);
    GridSpec g;
    g.axes = {axis};
    g.boundary = boundary;
    std::vector<cplx> amp(axis.points);
    const double mag = 1.0 / std::sqrt(axis.extent());
    for (int i = 0; i < axis.points; ++i)
        amp[i] = std::polar(mag, ks * axis.center(i));
    return GridField(std::move(g), std::move(amp));
}

inline double snapped_wavenumber(const AxisSpec& axis, double k) {
    const double dk = 2.0 * std::numbers::pi / axis.extent();
    return dk * std::round(k / dk);
}

// c1 * f + c2 * g, optionally renormalized.
inline GridField superpose(cplx c1, const GridField& f, cplx c2, const GridField& g,
                           bool renormalize = true) {
    if (!f.spec.same_shape(g.spec)) throw ShapeError("superpose: grid mismatch");
    GridField out = f;
    for (std::size_t i = 0; i < out.amp.size(); ++i)
        out.amp[i] = c1 * f.amp[i] + c2 * g.amp[i];
    return renormalize ? normalized(std::move(out)) : out;
}

}  // namespace pilotwave
