#pragma once

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "pilotwave/experiments.hpp"

namespace pilotwave {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class ScenarioKind {
    free_gaussian,
    pointer_readout,
    camera,
    double_slit,
    packet_exchange,
    absolute_uncertainty,
};

inline std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::free_gaussian: return "free_gaussian";
        case ScenarioKind::pointer_readout: return "pointer_readout";
        case ScenarioKind::camera: return "camera";
        case ScenarioKind::double_slit: return "double_slit";
        case ScenarioKind::packet_exchange: return "packet_exchange";
        case ScenarioKind::absolute_uncertainty: return "absolute_uncertainty";
    }
    throw ConfigurationError("bad scenario kind");
}

inline ScenarioKind kind_from_string(const std::string& s) {
    if (s == "free_gaussian") return ScenarioKind::free_gaussian;
    if (s == "pointer_readout") return ScenarioKind::pointer_readout;
    if (s == "camera") return ScenarioKind::camera;
    if (s == "double_slit") return ScenarioKind::double_slit;
    if (s == "packet_exchange") return ScenarioKind::packet_exchange;
    if (s == "absolute_uncertainty") return ScenarioKind::absolute_uncertainty;
    throw SchemaError("unknown scenario kind '" + s + "'");
}

struct FreeGaussianParams {
    double width = 1.0;  // amplitude width
    double center = 0.0;
    double momentum = 0.0;
    double extent = 20.0;
    int points = 1024;
    double t_final = 1.2990381056766580;  // width doubles over the run
    double dt = 1.8042195912175806e-4;    // t_final / 7200
    int snapshot_stride = 144;
};

// Declarative description of one run: kind-specific physics parameters plus
// shared run controls. Parses from and serializes to the versioned JSON
// schema documented in docs/scenario-schema.md.
struct ScenarioSpec {
    int schema_version = kSchemaVersion;
    std::string name;
    ScenarioKind kind = ScenarioKind::free_gaussian;

    FreeGaussianParams free_gaussian;
    MeasurementScenario measurement;
    DoubleSlitParams double_slit;
    PacketExchangeParams packet_exchange;
    AbsoluteUncertaintyParams absolute_uncertainty;

    std::size_t trajectories = 10000;
    std::uint64_t seed = 1;
    int histogram_bins = 0;  // 0: sqrt(N) rule
    std::vector<double> sample_times;  // equivariance checks, when applicable

    json to_json() const;
    static ScenarioSpec from_json(const json& j);
    void validate() const;
};

namespace schema_detail {

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw SchemaError("unknown key '" + it.key() + "' in " + where);
    }
}

inline const json& require(const json& j, const std::string& where, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw SchemaError("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

inline double number(const json& j, const std::string& where, const char* key) {
    const auto& v = require(j, where, key);
    if (!v.is_number())
        throw SchemaError("key '" + std::string(key) + "' in " + where +
                          " must be a number");
    return v.get<double>();
}

inline double number_or(const json& j, const char* key, double dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_number())
        throw SchemaError(std::string("key '") + key + "' must be a number");
    return it->get<double>();
}

inline int integer_or(const json& j, const char* key, int dflt) {
    auto it = j.find(key);
    if (it == j.end()) return dflt;
    if (!it->is_number_integer())
        throw SchemaError(std::string("key '") + key + "' must be an integer");
    return it->get<int>();
}

inline json axis_json(const AxisSpec& a, const char* role, double mass) {
    return json{{"label", a.label}, {"role", role},   {"min", a.min},
                {"max", a.max},     {"points", a.points}, {"mass", mass}};
}

inline json packet_json(const PacketSpec& p) {
    json j{{"type", p.kind == PacketKind::gaussian ? "gaussian" : "cauchy"},
           {"center", p.center},
           {"width", p.width}};
    if (p.momentum != 0.0) j["momentum"] = p.momentum;
    return j;
}

inline PacketSpec packet_from(const json& j, const std::string& where) {
    check_keys(j, where, {"type", "center", "width", "momentum"});
    PacketSpec p;
    const std::string type = require(j, where, "type").get<std::string>();
    if (type == "gaussian")
        p.kind = PacketKind::gaussian;
    else if (type == "cauchy")
        p.kind = PacketKind::cauchy;
    else
        throw SchemaError("unknown packet type '" + type + "' in " + where);
    p.center = number(j, where, "center");
    p.width = number(j, where, "width");
    if (p.width <= 0.0)
        throw SemanticError("packet width in " + where + " must be positive");
    p.momentum = number_or(j, "momentum", 0.0);
    return p;
}

inline AxisSpec axis_from(const json& j, const std::string& where, double* mass) {
    check_keys(j, where, {"label", "role", "min", "max", "points", "mass"});
    AxisSpec a;
    a.label = require(j, where, "label").get<std::string>();
    a.min = number(j, where, "min");
    a.max = number(j, where, "max");
    a.points = static_cast<int>(number(j, where, "points"));
    if (mass) *mass = number_or(j, "mass", 1.0);
    if (!(a.max > a.min))
        throw SemanticError("axis '" + a.label + "': max must exceed min");
    if (!is_power_of_two(a.points) || a.points < 16)
        throw SemanticError("axis '" + a.label +
                            "': points must be a power of two, at least 16");
    return a;
}

}  // namespace schema_detail

inline json ScenarioSpec::to_json() const {
    using namespace schema_detail;
    json j;
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["kind"] = to_string(kind);

    json run{{"trajectories", trajectories},
             {"seed", seed},
             {"histogram_bins", histogram_bins}};

    switch (kind) {
        case ScenarioKind::free_gaussian: {
            const auto& p = free_gaussian;
            j["axes"] = json::array(
                {axis_json({"x", -p.extent, p.extent, p.points}, "system", 1.0)});
            j["potential"] = {{"form", "free"}};
            j["initial"] = {{"x", packet_json({PacketKind::gaussian, p.center,
                                               p.width, p.momentum})}};
            run["t_final"] = p.t_final;
            run["dt"] = p.dt;
            run["snapshot_stride"] = p.snapshot_stride;
            break;
        }
        case ScenarioKind::pointer_readout:
        case ScenarioKind::camera: {
            const auto& m = measurement;
            json axes = json::array({axis_json(m.x_axis, "system", m.mass_x),
                                     axis_json(m.y_axis, "pointer", m.mass_y)});
            if (kind == ScenarioKind::camera)
                axes.push_back(axis_json(m.z_axis, "camera", m.mass_z));
            j["axes"] = axes;
            j["potential"] = {{"form", "free"}};
            json initial{{"x", json{{"type", "gaussian_pair"},
                                    {"amplitudes", json::array({json::array({m.c1.real(), m.c1.imag()}),
                                                                json::array({m.c2.real(), m.c2.imag()})})},
                                    {"packets", json::array({packet_json(m.phi1),
                                                             packet_json(m.phi2)})}}},
                         {"y", packet_json(m.pointer_ready)}};
            if (kind == ScenarioKind::camera) initial["z"] = packet_json(m.camera_ready);
            j["initial"] = initial;

            json couplings = json::array();
            couplings.push_back(json{{"system_axis", "x"},
                                     {"pointer_axis", "y"},
                                     {"observable", "projection_pair"},
                                     {"boundary", m.system_boundary},
                                     {"transfer", m.pointer_transfer},
                                     {"window", json::array({m.stage1_t0, m.stage1_t1})}});
            if (kind == ScenarioKind::camera)
                couplings.push_back(json{{"system_axis", "y"},
                                         {"pointer_axis", "z"},
                                         {"observable", "projection_pair"},
                                         {"boundary", 0.0},
                                         {"transfer", m.camera_transfer},
                                         {"window", json::array({m.stage2_t0, m.stage2_t1})}});
            j["couplings"] = couplings;

            json regions = json::array();
            regions.push_back({{"label", "L"}, {"axis", "y"},
                               {"interval", json::array({m.y_axis.min, 0.0})}});
            regions.push_back({{"label", "R"}, {"axis", "y"},
                               {"interval", json::array({0.0, m.y_axis.max})}});
            if (kind == ScenarioKind::camera) {
                regions.push_back({{"label", "CL"}, {"axis", "z"},
                                   {"interval", json::array({m.z_axis.min, 0.0})}});
                regions.push_back({{"label", "CR"}, {"axis", "z"},
                                   {"interval", json::array({0.0, m.z_axis.max})}});
            }
            j["regions"] = regions;
            j["device"] = {{"localization_tolerance", m.localization_tol},
                           {"min_separation_widths", m.min_separation_widths}};
            run["t_final"] = m.t_final;
            run["dt"] = m.dt;
            run["snapshot_stride"] = m.snapshot_stride;
            break;
        }
        case ScenarioKind::double_slit: {
            const auto& p = double_slit;
            j["axes"] = json::array(
                {axis_json({"x", -p.extent, p.extent, p.points}, "system", 1.0)});
            j["potential"] = {{"form", "free"}};
            j["initial"] = {{"x", json{{"type", "gaussian_pair"},
                                       {"amplitudes", json::array({json::array({std::numbers::sqrt2 / 2.0, 0.0}),
                                                                   json::array({std::numbers::sqrt2 / 2.0, 0.0})})},
                                       {"packets", json::array({packet_json({PacketKind::gaussian, -p.slit_half_separation, p.packet_width, 0.0}),
                                                                packet_json({PacketKind::gaussian, +p.slit_half_separation, p.packet_width, 0.0})})}}}};
            j["experiment"] = {{"single_slit", p.single_slit}};
            run["t_final"] = p.screen_time;
            run["dt"] = p.dt;
            run["snapshot_stride"] = p.snapshot_stride;
            break;
        }
        case ScenarioKind::packet_exchange: {
            const auto& p = packet_exchange;
            json axes = json::array(
                {axis_json({"x", -p.extent, p.extent, p.points}, "system", 1.0)});
            if (p.transverse_offset > 0.0)
                axes.push_back(axis_json({"y", -p.transverse_extent, p.transverse_extent,
                                          p.transverse_points},
                                         "system", 1.0));
            j["axes"] = axes;
            j["potential"] = {{"form", "free"}};
            j["initial"] = {{"x", json{{"type", "gaussian_pair"},
                                       {"amplitudes", json::array({json::array({std::numbers::sqrt2 / 2.0, 0.0}),
                                                                   json::array({std::numbers::sqrt2 / 2.0, 0.0})})},
                                       {"packets", json::array({packet_json({PacketKind::gaussian, -p.packet_offset, p.packet_width, +p.momentum}),
                                                                packet_json({PacketKind::gaussian, +p.packet_offset, p.packet_width, -p.momentum})})}}}};
            j["experiment"] = {{"transverse_offset", p.transverse_offset}};
            run["t_final"] = p.t_final;
            run["dt"] = p.dt;
            run["snapshot_stride"] = p.snapshot_stride;
            break;
        }
        case ScenarioKind::absolute_uncertainty: {
            const auto& p = absolute_uncertainty;
            j["axes"] = json::array(
                {axis_json({"x", -p.extent_x, p.extent_x, p.points}, "system", 1.0),
                 axis_json({"y", -p.extent_y, p.extent_y, p.points}, "pointer", 1.0)});
            j["potential"] = {{"form", "free"}};
            j["initial"] = {{"x", packet_json({PacketKind::gaussian, 0.0, p.system_width, 0.0})},
                            {"y", packet_json({PacketKind::gaussian, 0.0, p.pointer_width, 0.0})}};
            j["couplings"] = json::array({json{{"system_axis", "x"},
                                               {"pointer_axis", "y"},
                                               {"observable", "linear"},
                                               {"transfer", p.transfer},
                                               {"window", json::array({p.window_t0, p.window_t1})}}});
            j["analysis"] = {{"record_bins", p.record_bins},
                             {"min_bin_samples", p.min_bin_samples},
                             {"x_bins", p.x_bins}};
            run["t_final"] = p.t_final;
            run["dt"] = p.dt;
            run["snapshot_stride"] = p.snapshot_stride;
            break;
        }
    }

    if (!sample_times.empty()) run["sample_times"] = sample_times;
    j["run"] = run;
    return j;
}

inline ScenarioSpec ScenarioSpec::from_json(const json& j) {
    using namespace schema_detail;
    check_keys(j, "scenario",
               {"schema_version", "name", "kind", "axes", "potential", "initial",
                "couplings", "regions", "experiment", "device", "analysis", "run"});

    ScenarioSpec s;
    s.schema_version = static_cast<int>(number(j, "scenario", "schema_version"));
    if (s.schema_version != kSchemaVersion)
        throw SchemaError("unsupported schema_version " +
                          std::to_string(s.schema_version));
    s.name = require(j, "scenario", "name").get<std::string>();
    s.kind = kind_from_string(require(j, "scenario", "kind").get<std::string>());

    const auto& pot = require(j, "scenario", "potential");
    check_keys(pot, "potential", {"form"});
    if (require(pot, "potential", "form").get<std::string>() != "free")
        throw SchemaError("only the free potential form is supported by presets");

    const auto& run = require(j, "scenario", "run");
    check_keys(run, "run",
               {"trajectories", "seed", "histogram_bins", "t_final", "dt",
                "snapshot_stride", "sample_times"});
    s.trajectories = static_cast<std::size_t>(number(run, "run", "trajectories"));
    if (s.trajectories < 1) throw SemanticError("run.trajectories must be at least 1");
    s.seed = require(run, "run", "seed").get<std::uint64_t>();
    s.histogram_bins = integer_or(run, "histogram_bins", 0);
    const double t_final = number(run, "run", "t_final");
    const double dt = number(run, "run", "dt");
    const int stride = integer_or(run, "snapshot_stride", 1);
    if (!(dt > 0.0)) throw SemanticError("run.dt must be positive");
    if (stride < 1) throw SemanticError("run.snapshot_stride must be at least 1");
    if (auto it = run.find("sample_times"); it != run.end())
        s.sample_times = it->get<std::vector<double>>();

    const auto& axes = require(j, "scenario", "axes");
    if (!axes.is_array() || axes.empty())
        throw SchemaError("axes must be a non-empty array");

    auto packet_pair = [&](const json& init, const char* axis_key,
                           std::array<cplx, 2>& amps, PacketSpec& a, PacketSpec& b) {
        const auto& jx = require(init, "initial", axis_key);
        check_keys(jx, std::string("initial.") + axis_key,
                   {"type", "amplitudes", "packets"});
        if (require(jx, "initial", "type").get<std::string>() != "gaussian_pair")
            throw SchemaError(std::string("initial.") + axis_key +
                              " must be a gaussian_pair");
        const auto& ja = require(jx, "initial", "amplitudes");
        if (!ja.is_array() || ja.size() != 2)
            throw SchemaError("amplitudes must hold two [re, im] entries");
        for (int i = 0; i < 2; ++i) {
            if (!ja[i].is_array() || ja[i].size() != 2)
                throw SchemaError("amplitudes must hold two [re, im] entries");
            amps[i] = cplx(ja[i][0].get<double>(), ja[i][1].get<double>());
        }
        const auto& jp = require(jx, "initial", "packets");
        if (!jp.is_array() || jp.size() != 2)
            throw SchemaError("packets must hold two packet objects");
        a = packet_from(jp[0], "initial packets[0]");
        b = packet_from(jp[1], "initial packets[1]");
    };

    switch (s.kind) {
        case ScenarioKind::free_gaussian: {
            auto& p = s.free_gaussian;
            double mass = 1.0;
            auto ax = axis_from(axes[0], "axes[0]", &mass);
            p.extent = ax.max;
            p.points = ax.points;
            const auto& init = require(j, "scenario", "initial");
            check_keys(init, "initial", {"x"});
            auto pk = packet_from(require(init, "initial", "x"), "initial.x");
            p.width = pk.width;
            p.center = pk.center;
            p.momentum = pk.momentum;
            p.t_final = t_final;
            p.dt = dt;
            p.snapshot_stride = stride;
            break;
        }
        case ScenarioKind::pointer_readout:
        case ScenarioKind::camera: {
            auto& m = s.measurement;
            m.x_axis = axis_from(axes[0], "axes[0]", &m.mass_x);
            if (axes.size() < 2) throw SchemaError("measurement scenarios need a pointer axis");
            m.y_axis = axis_from(axes[1], "axes[1]", &m.mass_y);
            if (s.kind == ScenarioKind::camera) {
                if (axes.size() < 3) throw SchemaError("camera scenarios need a camera axis");
                m.z_axis = axis_from(axes[2], "axes[2]", &m.mass_z);
                m.has_camera = true;
            }

            const auto& init = require(j, "scenario", "initial");
            check_keys(init, "initial", {"x", "y", "z"});
            std::array<cplx, 2> amps{};
            packet_pair(init, "x", amps, m.phi1, m.phi2);
            m.c1 = amps[0];
            m.c2 = amps[1];
            const double csum = std::norm(m.c1) + std::norm(m.c2);
            if (std::abs(csum - 1.0) > 1e-10)
                throw SemanticError(
                    "initial.x.amplitudes violate |c1|^2 + |c2|^2 = 1");
            m.pointer_ready = packet_from(require(init, "initial", "y"), "initial.y");
            if (s.kind == ScenarioKind::camera)
                m.camera_ready = packet_from(require(init, "initial", "z"), "initial.z");

            const auto& coup = require(j, "scenario", "couplings");
            if (!coup.is_array() ||
                coup.size() != (s.kind == ScenarioKind::camera ? 2u : 1u))
                throw SchemaError("unexpected number of couplings for this kind");
            for (const auto& c : coup)
                check_keys(c, "coupling",
                           {"system_axis", "pointer_axis", "observable", "boundary",
                            "transfer", "window"});
            {
                const auto& c = coup[0];
                if (require(c, "coupling", "observable").get<std::string>() !=
                    "projection_pair")
                    throw SchemaError("stage-1 coupling must be a projection_pair");
                m.system_boundary = number_or(c, "boundary", 0.0);
                m.pointer_transfer = number(c, "coupling", "transfer");
                const auto& w = require(c, "coupling", "window");
                m.stage1_t0 = w[0].get<double>();
                m.stage1_t1 = w[1].get<double>();
            }
            if (s.kind == ScenarioKind::camera) {
                const auto& c = coup[1];
                m.camera_transfer = number(c, "coupling", "transfer");
                const auto& w = require(c, "coupling", "window");
                m.stage2_t0 = w[0].get<double>();
                m.stage2_t1 = w[1].get<double>();
            }

            const auto& regs = require(j, "scenario", "regions");
            const std::size_t want = (s.kind == ScenarioKind::camera) ? 4u : 2u;
            if (!regs.is_array() || regs.size() != want)
                throw SchemaError("unexpected region list for this kind");
            for (const auto& r : regs) {
                check_keys(r, "region", {"label", "axis", "interval"});
                const auto label = require(r, "region", "label").get<std::string>();
                const auto& iv = require(r, "region", "interval");
                const double lo = iv[0].get<double>(), hi = iv[1].get<double>();
                const bool left_kind = (label == "L" || label == "CL");
                if (label != "L" && label != "R" && label != "CL" && label != "CR")
                    throw SchemaError("unknown region label '" + label + "'");
                // Presets use half-axis outcome regions split at zero.
                if ((left_kind && hi != 0.0) || (!left_kind && lo != 0.0))
                    throw SemanticError("region '" + label +
                                        "' must be a half-axis split at 0");
            }

            if (auto it = j.find("device"); it != j.end()) {
                check_keys(*it, "device",
                           {"localization_tolerance", "min_separation_widths"});
                m.localization_tol =
                    number_or(*it, "localization_tolerance", m.localization_tol);
                m.min_separation_widths =
                    number_or(*it, "min_separation_widths", m.min_separation_widths);
            }
            m.t_final = t_final;
            m.dt = dt;
            m.snapshot_stride = stride;
            break;
        }
        case ScenarioKind::double_slit: {
            auto& p = s.double_slit;
            double mass = 1.0;
            auto ax = axis_from(axes[0], "axes[0]", &mass);
            p.extent = ax.max;
            p.points = ax.points;
            const auto& init = require(j, "scenario", "initial");
            check_keys(init, "initial", {"x"});
            std::array<cplx, 2> amps{};
            PacketSpec a, b;
            packet_pair(init, "x", amps, a, b);
            if (a.center != -b.center || a.width != b.width)
                throw SemanticError("double slit requires mirror-symmetric packets");
            p.slit_half_separation = std::abs(a.center);
            p.packet_width = a.width;
            if (auto it = j.find("experiment"); it != j.end()) {
                check_keys(*it, "experiment", {"single_slit"});
                p.single_slit = it->value("single_slit", false);
            }
            p.screen_time = t_final;
            p.dt = dt;
            p.snapshot_stride = stride;
            break;
        }
        case ScenarioKind::packet_exchange: {
            auto& p = s.packet_exchange;
            double mass = 1.0;
            auto ax = axis_from(axes[0], "axes[0]", &mass);
            p.extent = ax.max;
            p.points = ax.points;
            if (axes.size() > 1) {
                auto ay = axis_from(axes[1], "axes[1]", &mass);
                p.transverse_extent = ay.max;
                p.transverse_points = ay.points;
            }
            const auto& init = require(j, "scenario", "initial");
            check_keys(init, "initial", {"x"});
            std::array<cplx, 2> amps{};
            PacketSpec a, b;
            packet_pair(init, "x", amps, a, b);
            if (a.center != -b.center || a.momentum != -b.momentum)
                throw SemanticError("packet exchange requires mirrored packets");
            p.packet_offset = std::abs(a.center);
            p.packet_width = a.width;
            p.momentum = std::abs(a.momentum);
            if (auto it = j.find("experiment"); it != j.end()) {
                check_keys(*it, "experiment", {"transverse_offset"});
                p.transverse_offset = number_or(*it, "transverse_offset", 0.0);
            }
            p.t_final = t_final;
            p.dt = dt;
            p.snapshot_stride = stride;
            break;
        }
        case ScenarioKind::absolute_uncertainty: {
            auto& p = s.absolute_uncertainty;
            double mass = 1.0;
            auto ax = axis_from(axes[0], "axes[0]", &mass);
            p.extent_x = ax.max;
            p.points = ax.points;
            if (axes.size() < 2)
                throw SchemaError("absolute_uncertainty needs a pointer axis");
            auto ay = axis_from(axes[1], "axes[1]", &mass);
            p.extent_y = ay.max;
            const auto& init = require(j, "scenario", "initial");
            check_keys(init, "initial", {"x", "y"});
            auto px = packet_from(require(init, "initial", "x"), "initial.x");
            auto py = packet_from(require(init, "initial", "y"), "initial.y");
            p.system_width = px.width;
            p.pointer_width = py.width;
            const auto& coup = require(j, "scenario", "couplings");
            if (!coup.is_array() || coup.size() != 1)
                throw SchemaError("absolute_uncertainty needs exactly one coupling");
            const auto& c = coup[0];
            check_keys(c, "coupling",
                       {"system_axis", "pointer_axis", "observable", "transfer",
                        "window"});
            if (require(c, "coupling", "observable").get<std::string>() != "linear")
                throw SchemaError("absolute_uncertainty coupling must be linear");
            p.transfer = number(c, "coupling", "transfer");
            const auto& w = require(c, "coupling", "window");
            p.window_t0 = w[0].get<double>();
            p.window_t1 = w[1].get<double>();
            if (auto it = j.find("analysis"); it != j.end()) {
                check_keys(*it, "analysis",
                           {"record_bins", "min_bin_samples", "x_bins"});
                p.record_bins = integer_or(*it, "record_bins", p.record_bins);
                p.min_bin_samples = static_cast<std::size_t>(
                    integer_or(*it, "min_bin_samples",
                               static_cast<int>(p.min_bin_samples)));
                p.x_bins = integer_or(*it, "x_bins", p.x_bins);
            }
            p.t_final = t_final;
            p.dt = dt;
            p.snapshot_stride = stride;
            break;
        }
    }

    s.validate();
    return s;
}

inline void ScenarioSpec::validate() const {
    switch (kind) {
        case ScenarioKind::free_gaussian:
            if (free_gaussian.width <= 0.0)
                throw SemanticError("free_gaussian.width must be positive");
            break;
        case ScenarioKind::pointer_readout:
            measurement.validate();
            break;
        case ScenarioKind::camera: {
            auto m = measurement;
            m.has_camera = true;
            m.validate();
            break;
        }
        case ScenarioKind::double_slit:
            if (double_slit.slit_half_separation <= 0.0 ||
                double_slit.packet_width <= 0.0)
                throw SemanticError("double_slit geometry must be positive");
            break;
        case ScenarioKind::packet_exchange:
            if (packet_exchange.momentum <= 0.0)
                throw SemanticError("packet_exchange.momentum must be positive");
            break;
        case ScenarioKind::absolute_uncertainty:
            if (absolute_uncertainty.pointer_width <= 0.0)
                throw SemanticError("absolute_uncertainty.pointer_width must be positive");
            break;
    }
    if (trajectories < 1) throw SemanticError("run.trajectories must be at least 1");
}

// ---------------------------------------------------------------------------
// Built-in presets.
// ---------------------------------------------------------------------------

struct PresetInfo {
    std::string name;
    std::string summary;
};

inline std::vector<PresetInfo> preset_catalog() {
    return {
        {"free-gaussian", "spreading Gaussian packet, equivariance checks"},
        {"pointer-readout", "two-outcome pointer measurement, Born statistics"},
        {"camera", "camera records the pointer; joint region statistics"},
        {"camera-tails", "camera with truncated-Cauchy record states (atypical events)"},
        {"double-slit", "two-mode interference with no-crossing trajectories"},
        {"single-slit", "one-mode control run without interference"},
        {"packet-exchange", "counter-propagating packets that bounce, not cross"},
        {"packet-exchange-offset", "2D pass-by control without interference"},
        {"absolute-uncertainty", "linear pointer record conditioning the system"},
    };
}

inline ScenarioSpec make_preset(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    if (name == "free-gaussian") {
        s.kind = ScenarioKind::free_gaussian;
        const auto& p = s.free_gaussian;
        s.sample_times = {0.2 * p.t_final, 0.4 * p.t_final, 0.6 * p.t_final,
                          0.8 * p.t_final, p.t_final};
    } else if (name == "pointer-readout") {
        s.kind = ScenarioKind::pointer_readout;
        s.measurement.c1 = cplx(std::sqrt(0.3), 0.0);
        s.measurement.c2 = cplx(std::sqrt(0.7), 0.0);
    } else if (name == "camera") {
        s.kind = ScenarioKind::camera;
        s.measurement.has_camera = true;
    } else if (name == "camera-tails") {
        s.kind = ScenarioKind::camera;
        s.measurement.has_camera = true;
        s.measurement.camera_ready.kind = PacketKind::cauchy;
        s.measurement.localization_tol = 0.2;
    } else if (name == "double-slit") {
        s.kind = ScenarioKind::double_slit;
        const double T = s.double_slit.screen_time;
        s.sample_times = {0.2 * T, 0.4 * T, 0.6 * T, 0.8 * T, T};
    } else if (name == "single-slit") {
        s.kind = ScenarioKind::double_slit;
        s.double_slit.single_slit = true;
    } else if (name == "packet-exchange") {
        s.kind = ScenarioKind::packet_exchange;
    } else if (name == "packet-exchange-offset") {
        s.kind = ScenarioKind::packet_exchange;
        auto& p = s.packet_exchange;
        p.packet_offset = 8.0;
        p.packet_width = 1.5;
        p.momentum = 5.0;
        p.t_final = 3.2;
        p.extent = 30.0;
        p.points = 512;
        p.transverse_offset = 4.5;
        p.transverse_extent = 12.0;
        p.transverse_points = 64;
        p.dt = 8e-4;
        p.snapshot_stride = 25;
    } else if (name == "absolute-uncertainty") {
        s.kind = ScenarioKind::absolute_uncertainty;
    } else {
        throw SchemaError("unknown preset '" + name + "'");
    }
    s.validate();
    return s;
}

// Loads a scenario from a preset name or a JSON file path.
inline ScenarioSpec parse_scenario(const std::string& source) {
    for (const auto& p : preset_catalog())
        if (p.name == source) return make_preset(source);
    std::ifstream in(source);
    if (!in) throw SchemaError("cannot open scenario file '" + source + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError("invalid JSON in '" + source + "': " + e.what());
    }
    return ScenarioSpec::from_json(j);
}

}  // namespace pilotwave
