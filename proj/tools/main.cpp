#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "pilotwave/runner.hpp"

using namespace pilotwave;

namespace {

void print_checks(const RunReport& rep) {
    for (const auto& c : rep.checks)
        std::printf("%-34s %s  (value %.6g %s %.6g)%s%s\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.value, c.comparator.c_str(),
                    c.threshold, c.note.empty() ? "" : "  ", c.note.c_str());
}

int fail_with(const std::exception& e, const char* kind) {
    json err{{"error", kind}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pilotwave: Bohmian trajectory laboratory"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "execute a scenario and write artifacts");
    std::string scenario, out_dir = "out", emit = "trajectories,histograms";
    std::uint64_t seed = 0;
    bool seed_set = false;
    long long trajectories = -1;
    int stride = -1;
    unsigned threads = 0;
    run_cmd->add_option("--scenario", scenario, "scenario file path");
    std::string preset;
    run_cmd->add_option("--preset", preset, "built-in preset name");
    run_cmd->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run_cmd->add_option("--trajectories", trajectories, "ensemble size");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--snapshot-stride", stride, "field snapshot stride");
    run_cmd->add_option("--emit", emit,
                        "comma list of trajectories,histograms,fields,plots or 'none'");
    run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "parse a scenario and echo it");
    std::string val_source;
    val_cmd->add_option("source", val_source, "preset name or scenario file")
        ->required();

    // presets
    auto* presets_cmd = app.add_subcommand("presets", "list built-in presets");

    // report
    auto* report_cmd =
        app.add_subcommand("report", "recompute statistics from stored trajectories");
    std::string report_dir;
    report_cmd->add_option("--in", report_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (scenario.empty() == preset.empty()) {
                std::cerr << "run needs exactly one of --scenario or --preset\n";
                return 2;
            }
            RunConfig cfg;
            cfg.scenario_source = scenario.empty() ? preset : scenario;
            if (seed_set) cfg.seed = seed;
            if (trajectories >= 0)
                cfg.trajectories = static_cast<std::size_t>(trajectories);
            if (stride > 0) cfg.snapshot_stride = stride;
            cfg.out_dir = out_dir;
            cfg.threads = threads;
            cfg.emit_trajectories = emit.find("trajectories") != std::string::npos;
            cfg.emit_histograms = emit.find("histograms") != std::string::npos;
            cfg.emit_fields = emit.find("fields") != std::string::npos;
            cfg.emit_plots = emit.find("plots") != std::string::npos;

            auto rep = run(cfg);
            print_checks(rep);
            std::printf("report: %s/report.json\n", cfg.out_dir.c_str());
            return rep.all_passed() ? 0 : 3;
        }
        if (*val_cmd) {
            auto spec = parse_scenario(val_source);
            std::cout << spec.to_json().dump(2) << "\n";
            return 0;
        }
        if (*presets_cmd) {
            for (const auto& p : preset_catalog())
                std::printf("%-24s %s\n", p.name.c_str(), p.summary.c_str());
            return 0;
        }
        if (*report_cmd) {
            auto rep = recompute_report(report_dir);
            print_checks(rep);
            std::cout << rep.to_json().dump(2) << "\n";
            return 0;
        }
    } catch (const SchemaError& e) {
        return fail_with(e, "schema");
    } catch (const SemanticError& e) {
        return fail_with(e, "semantic");
    } catch (const Error& e) {
        return fail_with(e, "runtime");
    } catch (const std::exception& e) {
        return fail_with(e, "internal");
    }
    return 2;
}
