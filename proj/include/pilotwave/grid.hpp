#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pilotwave/errors.hpp"

namespace pilotwave {

inline constexpr int kMaxDims = 3;

enum class Boundary { periodic, absorbing_layer };

struct AxisSpec {
    std::string label;
    double min = 0.0;
    double max = 0.0;
    int points = 0;

    double extent() const { return max - min; }
    double spacing() const { return extent() / points; }
    // Sample points sit at cell centers, so n cells tile [min, max) exactly.
    double center(int i) const { return min + (i + 0.5) * spacing(); }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Rectangular uniform grid over a 1-3 axis configuration space.
struct GridSpec {
    std::vector<AxisSpec> axes;
    Boundary boundary = Boundary::periodic;

    int dims() const { return static_cast<int>(axes.size()); }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (const auto& a : axes) v *= a.spacing();
        return v;
    }

    void validate() const {
        if (axes.empty() || dims() > kMaxDims)
            throw ConfigurationError("grid must have 1 to 3 axes, got " +
                                     std::to_string(dims()));
        for (const auto& a : axes) {
            if (!(a.extent() > 0.0))
                throw ConfigurationError("axis '" + a.label +
                                         "': extent must be positive");
            if (a.points < 16)
                throw ConfigurationError("axis '" + a.label +
                                         "': need at least 16 points");
            if (!is_power_of_two(a.points))
                throw ConfigurationError("axis '" + a.label +
                                         "': point count must be a power of two");
        }
    }

    // Flat index with axis 0 outermost (row-major).
    std::size_t flat(const std::array<int, kMaxDims>& idx) const {
        std::size_t f = 0;
        for (int a = 0; a < dims(); ++a)
            f = f * static_cast<std::size_t>(axes[a].points) +
                static_cast<std::size_t>(idx[a]);
        return f;
    }

    std::array<int, kMaxDims> unflatten(std::size_t f) const {
        std::array<int, kMaxDims> idx{};
        for (int a = dims() - 1; a >= 0; --a) {
            auto n = static_cast<std::size_t>(axes[a].points);
            idx[a] = static_cast<int>(f % n);
            f /= n;
        }
        return idx;
    }

    int axis_index(const std::string& label) const {
        for (int a = 0; a < dims(); ++a)
            if (axes[a].label == label) return a;
        throw ConfigurationError("no axis labeled '" + label + "'");
    }

    bool same_shape(const GridSpec& o) const {
        if (dims() != o.dims()) return false;
        for (int a = 0; a < dims(); ++a) {
            if (axes[a].points != o.axes[a].points) return false;
            if (axes[a].min != o.axes[a].min || axes[a].max != o.axes[a].max)
                return false;
        }
        return true;
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    // Half-open so labeled partitions stay disjoint.
    bool contains(double x) const { return x >= lo && x < hi; }
};

// Axis-aligned subset of configuration space. Axes without an interval are
// unconstrained (wildcard).
struct RegionSpec {
    std::string label;
    std::array<std::optional<Interval>, kMaxDims> intervals{};

    RegionSpec() = default;
    RegionSpec(std::string lbl,
               std::initializer_list<std::pair<int, Interval>> parts)
        : label(std::move(lbl)) {
        for (const auto& [axis, iv] : parts) intervals[axis] = iv;
    }

    bool contains(const std::array<double, kMaxDims>& x, int dims) const {
        for (int a = 0; a < dims; ++a)
            if (intervals[a] && !intervals[a]->contains(x[a])) return false;
        return true;
    }

    void validate(const GridSpec& g) const {
        for (int a = 0; a < g.dims(); ++a) {
            if (!intervals[a]) continue;
            const auto& iv = *intervals[a];
            if (!(iv.lo < iv.hi))
                throw DomainError("region '" + label + "': empty interval on axis " +
                                  std::to_string(a));
            if (iv.lo < g.axes[a].min - 1e-12 || iv.hi > g.axes[a].max + 1e-12)
                throw DomainError("region '" + label +
                                  "' lies outside the grid extent on axis " +
                                  std::to_string(a));
        }
    }
};

inline bool regions_disjoint(const RegionSpec& a, const RegionSpec& b, int dims) {
    for (int ax = 0; ax < dims; ++ax) {
        if (!a.intervals[ax] || !b.intervals[ax]) continue;
        const auto& u = *a.intervals[ax];
        const auto& v = *b.intervals[ax];
        if (u.hi <= v.lo || v.hi <= u.lo) return true;  // separated on this axis
    }
    return false;
}

// Wraps x into [min, max) for periodic evaluation.
inline double wrap_periodic(double x, double min, double max) {
    const double L = max - min;
    double y = std::fmod(x - min, L);
    if (y < 0) y += L;
    return min + y;
}

}  // namespace pilotwave
