#pragma once

#include <functional>
#include <thread>
#include <vector>

#include "pilotwave/sampling.hpp"
#include "pilotwave/stats.hpp"

namespace pilotwave {

// Integrates one trajectory per starting configuration, in parallel over
// fixed index ranges. Each slot is written exactly once, so the ensemble is
// bitwise independent of the thread count.
template <typename History>
TrajectoryEnsemble integrate_ensemble(const History& h,
                                      const std::vector<Configuration>& starts,
                                      const IntegrateOptions& opt,
                                      unsigned threads = 0) {
    TrajectoryEnsemble ens;
    ens.times = h.sample_times();
    ens.dims = h.grid().dims();
    ens.members.resize(starts.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(starts.size(), 1));

    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            ens.members[i] = integrate_trajectory(h, starts[i], opt);
    };
    if (threads <= 1) {
        worker(0, starts.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (starts.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(starts.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return ens;
}

// Histogram bins per axis. Counts are snapped down to powers of two so each
// bin is an exact union of grid cells; binned field masses and binned samples
// then live on identical partitions.
struct BinGrid {
    std::array<int, kMaxDims> bins{};
    int dims = 1;

    int total() const {
        int t = 1;
        for (int a = 0; a < dims; ++a) t *= bins[a];
        return t;
    }

    static int snap(int requested, int points) {
        int b = 2;
        while (b * 2 <= std::min(requested, points)) b *= 2;
        return b;
    }
};

// sqrt(N) bins total, split evenly across axes, capped at grid resolution.
inline BinGrid default_bins(const GridSpec& g, std::size_t n) {
    BinGrid bg;
    bg.dims = g.dims();
    const double per_axis = std::pow(std::sqrt(static_cast<double>(n)),
                                     1.0 / g.dims());
    for (int a = 0; a < g.dims(); ++a)
        bg.bins[a] = BinGrid::snap(static_cast<int>(std::round(per_axis)),
                                   g.axes[a].points);
    return bg;
}

inline BinGrid uniform_bins(const GridSpec& g, int requested) {
    BinGrid bg;
    bg.dims = g.dims();
    for (int a = 0; a < g.dims(); ++a)
        bg.bins[a] = BinGrid::snap(requested, g.axes[a].points);
    return bg;
}

namespace detail {

inline int bin_of(const GridSpec& g, const BinGrid& bg,
                  const Configuration& x) {
    int flat = 0;
    for (int a = 0; a < g.dims(); ++a) {
        const auto& ax = g.axes[a];
        const int per = ax.points / bg.bins[a];
        int cell = static_cast<int>((wrap_periodic(x[a], ax.min, ax.max) - ax.min) /
                                    ax.spacing());
        cell = std::clamp(cell, 0, ax.points - 1);
        flat = flat * bg.bins[a] + cell / per;
    }
    return flat;
}

// |psi_t|^2 mass per bin (bins are unions of whole cells).
inline std::vector<double> field_bin_masses(const GridField& f, const BinGrid& bg) {
    const auto& g = f.spec;
    std::vector<double> q(bg.total(), 0.0);
    const double dv = g.cell_volume();
    for (std::size_t i = 0; i < f.amp.size(); ++i) {
        const auto idx = g.unflatten(i);
        int flat = 0;
        for (int a = 0; a < g.dims(); ++a) {
            const int per = g.axes[a].points / bg.bins[a];
            flat = flat * bg.bins[a] + idx[a] / per;
        }
        q[flat] += std::norm(f.amp[i]) * dv;
    }
    return q;
}

}  // namespace detail

struct EquivarianceReport {
    double time = 0.0;
    double tv = 0.0;
    double chi2_pvalue = 1.0;
    int bins = 0;
};

// Total-variation distance between the binned empirical distribution of the
// ensemble at time t and the binned |psi_t|^2, plus a chi-square p-value.
template <typename History>
EquivarianceReport check_equivariance(const TrajectoryEnsemble& ens, const History& h,
                                      double t, const BinGrid& bg) {
    const auto& field = h.field_at(t);
    const int ti = ens.time_index(t);

    std::vector<double> counts(bg.total(), 0.0);
    for (const auto& m : ens.members)
        counts[detail::bin_of(field.spec, bg, m.x[ti])] += 1.0;

    auto q = detail::field_bin_masses(field, bg);
    // Normalize both to unit mass over the bins.
    double qsum = 0.0;
    for (double v : q) qsum += v;
    std::vector<double> p(counts.size()), qn(q.size());
    const double n = static_cast<double>(ens.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = counts[i] / n;
        qn[i] = q[i] / qsum;
    }

    EquivarianceReport rep;
    rep.time = t;
    rep.bins = bg.total();
    rep.tv = tv_distance(p, qn);
    std::vector<double> expected(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) expected[i] = qn[i] * n;
    rep.chi2_pvalue = chi_square_pvalue(counts, expected);
    return rep;
}

template <typename History>
EquivarianceReport check_equivariance(const TrajectoryEnsemble& ens, const History& h,
                                      double t) {
    return check_equivariance(ens, h, t, default_bins(h.grid(), ens.size()));
}

// Expected TV distance of a fresh |psi_t|^2 sample of size n against the
// binned |psi_t|^2 itself: the pure sampling-noise floor at time t,
// estimated by bootstrap. Fixed-width bins make this floor grow as the
// support of |psi_t|^2 spreads, so each sample time gets its own baseline.
template <typename History>
double equivariance_noise_baseline(const History& h, double t, std::size_t n,
                                   const BinGrid& bg, std::uint64_t seed,
                                   int replicas = 32) {
    const auto& field = h.field_at(t);
    auto q = detail::field_bin_masses(field, bg);
    double qsum = 0.0;
    for (double v : q) qsum += v;
    std::vector<double> qn(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) qn[i] = q[i] / qsum;

    double acc = 0.0;
    for (int r = 0; r < replicas; ++r) {
        EnsembleSpec spec;
        spec.count = n;
        spec.master_seed = derive_stream_seed(seed, static_cast<std::uint64_t>(r));
        auto samples = sample_initial(field, spec);
        std::vector<double> counts(bg.total(), 0.0);
        for (const auto& c : samples)
            counts[detail::bin_of(field.spec, bg, c)] += 1.0;
        for (auto& v : counts) v /= static_cast<double>(n);
        acc += tv_distance(counts, qn);
    }
    return acc / replicas;
}

// Empirical frequency of an event over final configurations, with a 95%
// Wilson interval (Clopper-Pearson upper bound for exact zeros).
inline RateInterval estimate_atypical_rate(
    const TrajectoryEnsemble& ens,
    const std::function<bool(const Configuration&)>& event) {
    std::size_t count = 0;
    for (const auto& m : ens.members)
        if (event(m.x.back())) ++count;
    return wilson_interval(count, ens.size());
}

inline RateInterval estimate_atypical_rate(const TrajectoryEnsemble& ens,
                                           const RegionSpec& region) {
    return estimate_atypical_rate(ens, [&](const Configuration& c) {
        return region.contains(c, ens.dims);
    });
}

}  // namespace pilotwave
