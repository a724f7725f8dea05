#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "pilotwave/errors.hpp"

namespace pilotwave {

struct Histogram1D {
    double min = 0.0;
    double max = 0.0;
    std::vector<double> counts;  // weights, not yet normalized

    int bins() const { return static_cast<int>(counts.size()); }
    double width() const { return (max - min) / bins(); }

    Histogram1D() = default;
    Histogram1D(double lo, double hi, int nbins) : min(lo), max(hi), counts(nbins, 0.0) {}

    void add(double x, double w = 1.0) {
        if (x < min || x >= max) return;
        const int b = static_cast<int>((x - min) / width());
        counts[std::min(b, bins() - 1)] += w;
    }

    double total() const {
        double s = 0.0;
        for (double c : counts) s += c;
        return s;
    }

    // Bin masses normalized to the histogram total.
    std::vector<double> probabilities() const {
        std::vector<double> p(counts.size(), 0.0);
        const double t = total();
        if (t > 0.0)
            for (std::size_t i = 0; i < counts.size(); ++i) p[i] = counts[i] / t;
        return p;
    }

    double bin_center(int b) const { return min + (b + 0.5) * width(); }
};

// Total variation distance between two binned measures.
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw ShapeError("tv_distance: bin count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

// Kolmogorov-Smirnov statistic of samples against a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::abs((i + 1) / n - F));
        d = std::max(d, std::abs(F - i / n));
    }
    return d;
}

namespace detail {

// Regularized incomplete gamma Q(a, x), series + continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Q(a,x) by Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace detail

// Pearson chi-square p-value of observed counts against expected counts.
// Low-expectation bins are pooled until each cell expects at least
// `min_expected` so the chi-square approximation stays honest.
inline double chi_square_pvalue(const std::vector<double>& observed,
                                const std::vector<double>& expected,
                                double min_expected = 5.0) {
    if (observed.size() != expected.size())
        throw ShapeError("chi_square_pvalue: size mismatch");
    std::vector<double> obs, exp;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 && !exp.empty()) {
        obs.back() += o_acc;
        exp.back() += e_acc;
    }
    if (exp.size() < 2) return 1.0;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        const double diff = obs[i] - exp[i];
        chi2 += diff * diff / exp[i];
    }
    const double dof = static_cast<double>(exp.size() - 1);
    return detail::gamma_q(dof / 2.0, chi2 / 2.0);
}

struct RateInterval {
    double rate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    std::size_t n = 0;
};

// 95% Wilson score interval; an exact zero count falls back to the
// Clopper-Pearson upper bound 1 - 0.025^(1/n) (about 3.69/n).
inline RateInterval wilson_interval(std::size_t count, std::size_t n) {
    RateInterval r;
    r.count = count;
    r.n = n;
    if (n == 0) return r;
    const double p = static_cast<double>(count) / n;
    r.rate = p;
    if (count == 0) {
        r.lo = 0.0;
        r.hi = 1.0 - std::pow(0.025, 1.0 / static_cast<double>(n));
        return r;
    }
    if (count == n) {
        r.hi = 1.0;
        r.lo = std::pow(0.025, 1.0 / static_cast<double>(n));
        return r;
    }
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    r.lo = std::max(0.0, center - half);
    r.hi = std::min(1.0, center + half);
    return r;
}

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

inline double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

// Standard deviation of a tabulated density on bin centers.
inline double density_stddev(const std::vector<double>& density,
                             const std::function<double(int)>& center) {
    double w = 0.0, m = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        w += density[i];
        m += density[i] * center(static_cast<int>(i));
    }
    if (w <= 0.0) return 0.0;
    m /= w;
    double v = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        const double d = center(static_cast<int>(i)) - m;
        v += density[i] * d * d;
    }
    return std::sqrt(v / w);
}

}  // namespace pilotwave
