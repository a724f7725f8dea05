#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("presets and validate verbs succeed") {
    CHECK(run_cli("presets") == 0);
    CHECK(run_cli("validate double-slit") == 0);
    CHECK(run_cli("validate no-such-preset") == 1);
}

TEST_CASE("identical config and seed give byte-identical tables at any thread count") {
    const auto a = fresh_dir("pw_cli_a");
    const auto b = fresh_dir("pw_cli_b");
    const std::string base =
        "run --preset packet-exchange --trajectories 150 --seed 99 --emit trajectories,histograms";
    REQUIRE(run_cli(base + " --threads 1 --out " + a.string()) == 0);
    REQUIRE(run_cli(base + " --threads 4 --out " + b.string()) == 0);

    CHECK(slurp(a / "trajectories.tsv") == slurp(b / "trajectories.tsv"));
    CHECK(!slurp(a / "trajectories.tsv").empty());
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("different seeds change the tables") {
    const auto a = fresh_dir("pw_cli_s1");
    const auto b = fresh_dir("pw_cli_s2");
    REQUIRE(run_cli("run --preset packet-exchange --trajectories 60 --seed 1 --out " +
                    a.string()) == 0);
    REQUIRE(run_cli("run --preset packet-exchange --trajectories 60 --seed 2 --out " +
                    b.string()) == 0);
    CHECK(slurp(a / "trajectories.tsv") != slurp(b / "trajectories.tsv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("emit flags control the artifact set") {
    const auto dir = fresh_dir("pw_cli_emit");
    REQUIRE(run_cli("run --preset packet-exchange --trajectories 40 --seed 3 "
                    "--emit none --out " +
                    dir.string()) == 0);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "scenario.json"));
    CHECK(!fs::exists(dir / "trajectories.tsv"));
    CHECK(!fs::exists(dir / "fields"));
    fs::remove_all(dir);

    const auto full = fresh_dir("pw_cli_full");
    REQUIRE(run_cli("run --preset free-gaussian --trajectories 40 --seed 3 "
                    "--emit trajectories,histograms,fields,plots --out " +
                    full.string()) == 0);
    CHECK(fs::exists(full / "trajectories.tsv"));
    CHECK(fs::exists(full / "histogram_screen.tsv"));
    CHECK(fs::exists(full / "fields" / "field_00000.bin"));
    CHECK(fs::exists(full / "fields" / "field_00000.hdr"));
    CHECK(fs::exists(full / "plots" / "histogram_screen.ppm"));
    CHECK(fs::exists(full / "plots" / "trajectories.ppm"));
    fs::remove_all(full);
}

TEST_CASE("scenario files drive runs end to end") {
    const auto dir = fresh_dir("pw_cli_file");
    const std::string file =
        std::string(PW_SOURCE_DIR) + "/scenarios/camera-tails.json";
    CHECK(run_cli("run --scenario " + file +
                  " --trajectories 400 --seed 21 --emit none --out " +
                  dir.string()) == 0);
    CHECK(fs::exists(dir / "report.json"));
    fs::remove_all(dir);
}

TEST_CASE("report verb recomputes from stored trajectories") {
    const auto dir = fresh_dir("pw_cli_report");
    REQUIRE(run_cli("run --preset packet-exchange --trajectories 50 --seed 4 --out " +
                    dir.string()) == 0);
    CHECK(run_cli("report --in " + dir.string()) == 0);
    fs::remove_all(dir);
}

TEST_CASE("schema errors exit nonzero with a machine-readable record") {
    const auto dir = fresh_dir("pw_cli_bad");
    fs::create_directories(dir);
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{\"schema_version\": 1, \"name\": \"x\", \"kind\": \"nope\"}";
    }
    const std::string cmd = std::string(PW_CLI_PATH) + " validate " +
                            (dir / "bad.json").string() + " 2> " +
                            (dir / "err.txt").string() + " >/dev/null";
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 1);
    const auto err = slurp(dir / "err.txt");
    CHECK(err.find("\"error\"") != std::string::npos);
    CHECK(err.find("schema") != std::string::npos);
    fs::remove_all(dir);
}
