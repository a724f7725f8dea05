#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "pilotwave/field.hpp"
#include "pilotwave/guidance.hpp"
#include "pilotwave/rng.hpp"

namespace pilotwave {

enum class SamplerKind { automatic, inverse_cdf, rejection };

struct EnsembleSpec {
    std::size_t count = 1;
    std::uint64_t master_seed = 0;
    SamplerKind sampler = SamplerKind::automatic;
    int histogram_bins = 0;  // 0: sqrt(N) rule capped at grid resolution

    void validate() const {
        if (count < 1) throw ConfigurationError("ensemble needs at least one trajectory");
    }
};

inline constexpr std::size_t kMaxRejectionProposalsPerSample = 10000;

namespace detail {

inline std::vector<Configuration> sample_inverse_cdf(const GridField& f,
                                                     const EnsembleSpec& spec) {
    const auto& ax = f.spec.axes[0];
    const double dx = ax.spacing();
    std::vector<double> cdf(f.amp.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < f.amp.size(); ++i) {
        acc += std::norm(f.amp[i]);
        cdf[i] = acc;
    }
    if (acc <= 0.0) throw DomainError("cannot sample a zero field");

    std::vector<Configuration> out(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        Rng rng(derive_stream_seed(spec.master_seed, i));
        const double u = rng.uniform01() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto cell = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(it - cdf.begin(),
                                     static_cast<std::ptrdiff_t>(cdf.size()) - 1));
        Configuration c{};
        c[0] = ax.min + (static_cast<double>(cell) + rng.uniform01()) * dx;
        out[i] = c;
    }
    return out;
}

inline std::vector<Configuration> sample_rejection(const GridField& f,
                                                   const EnsembleSpec& spec) {
    const auto& g = f.spec;
    const int d = g.dims();
    double max_density = 0.0;
    for (const auto& a : f.amp) max_density = std::max(max_density, std::norm(a));
    if (max_density <= 0.0) throw DomainError("cannot sample a zero field");

    std::vector<Configuration> out(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        Rng rng(derive_stream_seed(spec.master_seed, i));
        Configuration c{};
        std::size_t proposals = 0;
        for (;;) {
            if (++proposals > kMaxRejectionProposalsPerSample)
                throw SamplerEfficiencyError(
                    "rejection sampler exceeded the proposal budget");
            std::array<int, kMaxDims> idx{};
            for (int a = 0; a < d; ++a) {
                c[a] = rng.uniform(g.axes[a].min, g.axes[a].max);
                idx[a] = std::min(
                    static_cast<int>((c[a] - g.axes[a].min) / g.axes[a].spacing()),
                    g.axes[a].points - 1);
            }
            const double density = std::norm(f.amp[g.flat(idx)]);
            if (rng.uniform01() * max_density <= density) break;
        }
        out[i] = c;
    }
    return out;
}

}  // namespace detail

// Draws `spec.count` configurations i.i.d. from |f|^2 (piecewise-constant on
// cells, uniform within a cell). Sample i depends only on
// (master_seed, i), so the result is identical under any parallel schedule.
inline std::vector<Configuration> sample_initial(const GridField& f,
                                                 const EnsembleSpec& spec) {
    spec.validate();
    SamplerKind kind = spec.sampler;
    if (kind == SamplerKind::automatic)
        kind = (f.spec.dims() == 1) ? SamplerKind::inverse_cdf : SamplerKind::rejection;
    if (kind == SamplerKind::inverse_cdf && f.spec.dims() != 1)
        throw ConfigurationError("inverse-CDF sampling is 1D only");
    return kind == SamplerKind::inverse_cdf ? detail::sample_inverse_cdf(f, spec)
                                            : detail::sample_rejection(f, spec);
}

}  // namespace pilotwave
