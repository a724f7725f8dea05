#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "pilotwave/errors.hpp"
#include "pilotwave/grid.hpp"

namespace pilotwave {

using cplx = std::complex<double>;

// Iterative radix-2 FFT. Grids enforce power-of-two axis sizes, so this is
// all the transform machinery the library needs. Forward is unnormalized,
// inverse carries the 1/n factor, so inverse(forward(x)) == x.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        if (!is_power_of_two(n)) throw ConfigurationError("FFT size must be a power of two");
        rev_.resize(n);
        int log2n = 0;
        while ((1 << log2n) < n) ++log2n;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < log2n; ++b)
                if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
            rev_[i] = r;
        }
        // Twiddles per stage, forward sign convention exp(-2*pi*i*j/m).
        tw_.resize(log2n);
        for (int s = 0; s < log2n; ++s) {
            const int m = 1 << (s + 1);
            tw_[s].resize(m / 2);
            for (int j = 0; j < m / 2; ++j) {
                const double ang = -2.0 * std::numbers::pi * j / m;
                tw_[s][j] = cplx(std::cos(ang), std::sin(ang));
            }
        }
    }

    int size() const { return n_; }

    void transform(cplx* data, bool inverse) const {
        for (int i = 0; i < n_; ++i) {
            const int r = rev_[i];
            if (i < r) std::swap(data[i], data[r]);
        }
        for (std::size_t s = 0; s < tw_.size(); ++s) {
            const int m = 1 << (s + 1);
            const int half = m / 2;
            for (int base = 0; base < n_; base += m) {
                for (int j = 0; j < half; ++j) {
                    const cplx w = inverse ? std::conj(tw_[s][j]) : tw_[s][j];
                    const cplx t = w * data[base + j + half];
                    const cplx u = data[base + j];
                    data[base + j] = u + t;
                    data[base + j + half] = u - t;
                }
            }
        }
        if (inverse) {
            const double inv = 1.0 / n_;
            for (int i = 0; i < n_; ++i) data[i] *= inv;
        }
    }

private:
    int n_;
    std::vector<int> rev_;
    std::vector<std::vector<cplx>> tw_;
};

// Applies a 1D FFT along one axis of a flattened row-major array.
class AxisTransform {
public:
    AxisTransform(const GridSpec& grid, int axis)
        : plan_(grid.axes[axis].points), scratch_(grid.axes[axis].points) {
        n_ = grid.axes[axis].points;
        stride_ = 1;
        for (int a = axis + 1; a < grid.dims(); ++a) stride_ *= grid.axes[a].points;
        lines_ = grid.size() / static_cast<std::size_t>(n_);
        inner_ = static_cast<std::size_t>(stride_);
        outer_stride_ = inner_ * static_cast<std::size_t>(n_);
    }

    void apply(cplx* data, bool inverse) {
        if (inner_ == 1) {
            for (std::size_t line = 0; line < lines_; ++line)
                plan_.transform(data + line * static_cast<std::size_t>(n_), inverse);
            return;
        }
        const std::size_t outers = lines_ / inner_;
        for (std::size_t o = 0; o < outers; ++o) {
            for (std::size_t in = 0; in < inner_; ++in) {
                cplx* base = data + o * outer_stride_ + in;
                for (int i = 0; i < n_; ++i) scratch_[i] = base[i * inner_];
                plan_.transform(scratch_.data(), inverse);
                for (int i = 0; i < n_; ++i) base[i * inner_] = scratch_[i];
            }
        }
    }

private:
    FftPlan plan_;
    std::vector<cplx> scratch_;
    int n_ = 0;
    int stride_ = 0;
    std::size_t lines_ = 0;
    std::size_t inner_ = 0;
    std::size_t outer_stride_ = 0;
};

// Angular wavenumber for FFT bin j of an axis; Nyquist bin maps to zero for
// odd-order (derivative) use.
inline double fft_wavenumber(const AxisSpec& axis, int j) {
    const int n = axis.points;
    const double dk = 2.0 * std::numbers::pi / axis.extent();
    if (j == n / 2) return 0.0;
    return (j < n / 2) ? dk * j : dk * (j - n);
}

// Same but keeping the Nyquist bin, for even-order symbols like k^2.
inline double fft_wavenumber_even(const AxisSpec& axis, int j) {
    const int n = axis.points;
    const double dk = 2.0 * std::numbers::pi / axis.extent();
    return (j <= n / 2) ? dk * j : dk * (j - n);
}

}  // namespace pilotwave
