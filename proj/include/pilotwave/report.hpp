#pragma once

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pilotwave/scenario.hpp"

namespace pilotwave {

// Shortest round-trip decimal representation, used everywhere numbers land
// in text artifacts so identical runs produce identical bytes.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparator;  // "<", "<=", ">=", "==", "in"
    bool pass = false;
    std::string note;
};

struct NamedQuantity {
    std::string name;
    double value = 0.0;
    double bound = 0.0;  // e.g. Cauchy-Schwarz bound; 0 when not applicable
};

struct NamedRate {
    std::string name;
    RateInterval interval;
};

struct RunReport {
    json scenario_echo;
    std::vector<NamedQuantity> quadrature;
    std::vector<NamedRate> empirical;
    std::vector<CheckResult> checks;
    json diagnostics;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    json to_json() const {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["scenario"] = scenario_echo;
        json q = json::array();
        for (const auto& v : quadrature) {
            json e{{"name", v.name}, {"value", v.value}};
            if (v.bound != 0.0) e["bound"] = v.bound;
            q.push_back(e);
        }
        j["quadrature"] = q;
        json emp = json::array();
        for (const auto& r : empirical)
            emp.push_back(json{{"name", r.name},
                               {"rate", r.interval.rate},
                               {"wilson_low", r.interval.lo},
                               {"wilson_high", r.interval.hi},
                               {"count", r.interval.count},
                               {"n", r.interval.n}});
        j["empirical"] = emp;
        json ch = json::array();
        for (const auto& c : checks) {
            json e{{"name", c.name},
                   {"value", c.value},
                   {"comparator", c.comparator},
                   {"threshold", c.threshold},
                   {"pass", c.pass}};
            if (!c.note.empty()) e["note"] = c.note;
            ch.push_back(e);
        }
        j["checks"] = ch;
        j["diagnostics"] = diagnostics;
        return j;
    }
};

namespace io {

namespace fs = std::filesystem;

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write " + path.string());
    out << text;
}

// One row per (trajectory, time sample): index, time, coordinates, status.
inline void write_trajectory_table(const fs::path& path,
                                   const TrajectoryEnsemble& ens) {
    std::string text;
    text.reserve(ens.members.size() * ens.times.size() * 32);
    text += "trajectory\ttime";
    const char* names[] = {"x", "y", "z"};
    for (int a = 0; a < ens.dims; ++a) {
        text += '\t';
        text += names[a];
    }
    text += "\tstatus\n";
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
        const auto& m = ens.members[i];
        for (std::size_t t = 0; t < ens.times.size(); ++t) {
            text += std::to_string(i);
            text += '\t';
            text += fmt_double(ens.times[t]);
            for (int a = 0; a < ens.dims; ++a) {
                text += '\t';
                text += fmt_double(m.x[t][a]);
            }
            text += '\t';
            text += (m.status == TrajectoryStatus::absorbed) ? "absorbed" : "active";
            text += '\n';
        }
    }
    write_text(path, text);
}

inline void write_histogram(const fs::path& path, const Histogram1D& h,
                            const std::vector<double>* expected = nullptr) {
    std::string text = "bin_lo\tbin_hi\tcount";
    if (expected) text += "\texpected";
    text += '\n';
    for (int b = 0; b < h.bins(); ++b) {
        text += fmt_double(h.min + b * h.width());
        text += '\t';
        text += fmt_double(h.min + (b + 1) * h.width());
        text += '\t';
        text += fmt_double(h.counts[b]);
        if (expected) {
            text += '\t';
            text += fmt_double((*expected)[b]);
        }
        text += '\n';
    }
    write_text(path, text);
}

inline void write_field_snapshot(const fs::path& stem, const GridField& f) {
    // Sidecar header.
    std::string hdr = "time " + fmt_double(f.time_tag) + "\n";
    hdr += "dims " + std::to_string(f.spec.dims()) + "\n";
    hdr += std::string("boundary ") +
           (f.spec.boundary == Boundary::periodic ? "periodic" : "absorbing-layer") +
           "\n";
    for (const auto& a : f.spec.axes)
        hdr += "axis " + a.label + " " + fmt_double(a.min) + " " + fmt_double(a.max) +
               " " + std::to_string(a.points) + "\n";
    write_text(fs::path(stem.string() + ".hdr"), hdr);

    // Interleaved little-endian float64 (re, im) pairs.
    std::ofstream out(fs::path(stem.string() + ".bin"), std::ios::binary);
    if (!out) throw ConfigurationError("cannot write " + stem.string() + ".bin");
    static_assert(std::endian::native == std::endian::little,
                  "field snapshots assume a little-endian host");
    for (const auto& a : f.amp) {
        const double re = a.real(), im = a.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

inline void write_field_history(const fs::path& dir, const FieldHistory& hist) {
    fs::create_directories(dir);
    int index = 0;
    for (const auto& seg : hist.segments)
        for (const auto& f : seg.fields) {
            char name[32];
            std::snprintf(name, sizeof(name), "field_%05d", index++);
            write_field_snapshot(dir / name, f);
        }
}

// ---------------------------------------------------------------------------
// Minimal PPM rendering for the plot emit flag. Plots are diagnostics, never
// part of the numeric path.
// ---------------------------------------------------------------------------

struct Image {
    int w = 0, h = 0;
    std::vector<unsigned char> rgb;

    Image(int width, int height) : w(width), h(height), rgb(width * height * 3, 255) {}

    void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
        if (x < 0 || x >= w || y < 0 || y >= h) return;
        auto* p = &rgb[3 * (static_cast<std::size_t>(y) * w + x)];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }

    void line(double x0, double y0, double x1, double y1, unsigned char r,
              unsigned char g, unsigned char b) {
        const int steps = static_cast<int>(std::max(std::abs(x1 - x0), std::abs(y1 - y0))) + 1;
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            set(static_cast<int>(x0 + t * (x1 - x0)),
                static_cast<int>(y0 + t * (y1 - y0)), r, g, b);
        }
    }

    void save(const fs::path& path) const {
        std::ofstream out(path, std::ios::binary);
        out << "P6\n" << w << " " << h << "\n255\n";
        out.write(reinterpret_cast<const char*>(rgb.data()),
                  static_cast<std::streamsize>(rgb.size()));
    }
};

inline void plot_histogram(const fs::path& path, const Histogram1D& h) {
    Image img(800, 400);
    double peak = 1.0;
    for (double c : h.counts) peak = std::max(peak, c);
    const double bw = 800.0 / h.bins();
    for (int b = 0; b < h.bins(); ++b) {
        const int top = 390 - static_cast<int>(380.0 * h.counts[b] / peak);
        const int x0 = static_cast<int>(b * bw), x1 = static_cast<int>((b + 1) * bw);
        for (int x = x0; x < x1; ++x)
            for (int y = top; y < 390; ++y) img.set(x, y, 70, 100, 180);
    }
    img.save(path);
}

inline void plot_trajectory_fan(const fs::path& path, const TrajectoryEnsemble& ens,
                                int axis, std::size_t max_members = 200) {
    Image img(800, 600);
    if (ens.members.empty() || ens.times.size() < 2) {
        img.save(path);
        return;
    }
    double lo = 1e300, hi = -1e300;
    const std::size_t step = std::max<std::size_t>(1, ens.members.size() / max_members);
    for (std::size_t i = 0; i < ens.members.size(); i += step)
        for (const auto& p : ens.members[i].x) {
            lo = std::min(lo, p[axis]);
            hi = std::max(hi, p[axis]);
        }
    if (!(hi > lo)) hi = lo + 1.0;
    const double t0 = ens.times.front(), t1 = ens.times.back();
    for (std::size_t i = 0; i < ens.members.size(); i += step) {
        const auto& m = ens.members[i];
        for (std::size_t t = 0; t + 1 < ens.times.size(); ++t) {
            const auto px = [&](double tt) { return 800.0 * (tt - t0) / (t1 - t0); };
            const auto py = [&](double x) { return 590.0 - 580.0 * (x - lo) / (hi - lo); };
            img.line(px(ens.times[t]), py(m.x[t][axis]), px(ens.times[t + 1]),
                     py(m.x[t + 1][axis]), 40, 40, 40);
        }
    }
    img.save(path);
}

}  // namespace io

}  // namespace pilotwave
