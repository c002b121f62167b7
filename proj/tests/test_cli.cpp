// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin_path() {
    const char* p = std::getenv("KPPLAB_BIN");
    REQUIRE_MESSAGE(p != nullptr, "KPPLAB_BIN must point at the CLI binary");
    return p;
}

int run_cli(const std::string& args) {
    std::string cmd = bin_path() + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

fs::path scratch() {
    fs::path d = fs::temp_directory_path() / "kpplab_cli_test";
    fs::create_directories(d);
    return d;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file ", p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double json_number(const std::string& text, const std::string& key) {
    std::string needle = "\"" + key + "\": ";
    auto pos = text.find(needle);
    REQUIRE_MESSAGE(pos != std::string::npos, "key ", key, " absent");
    return std::strtod(text.c_str() + pos + needle.size(), nullptr);
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    fs::path dir = scratch();
    write_text(dir / "ok.json", R"({"version": 1})");

    CHECK(run_cli("bogus --config " + (dir / "ok.json").string()) == 2);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("dispersion") == 2);  // --config is required

    write_text(dir / "bad.json", "{ not json");
    CHECK(run_cli("dispersion --config " + (dir / "bad.json").string()) == 2);

    write_text(dir / "invalid.json", R"({"version": 1, "scheme": {"dt": -0.1}})");
    CHECK(run_cli("dispersion --config " + (dir / "invalid.json").string()) == 2);

    CHECK(run_cli("dispersion --config " + (dir / "no_such_file.json").string()) == 2);
}

TEST_CASE("dispersion: correct values, stamped and reproducible outputs") {
    fs::path dir = scratch();
    write_text(dir / "homog.json", R"({
        "version": 1,
        "model": {"kind": "logistic", "period": 1.0, "mu_hat": 1.0, "kappa": 1.0}
    })");

    fs::path out1 = dir / "out1", out2 = dir / "out2";
    std::string cfg = (dir / "homog.json").string();
    CHECK(run_cli("dispersion --config " + cfg + " --out " + out1.string()) == 0);

    std::string js = slurp(out1 / "dispersion.json");
    CHECK(std::abs(json_number(js, "c_star") - 2.0) <= 1e-6);
    CHECK(std::abs(json_number(js, "lambda_star") - 1.0) <= 1e-6);
    CHECK(std::abs(json_number(js, "N_fit") - 2.0) <= 1e-3);
    CHECK(js.find("\"config_hash\": \"") != std::string::npos);

    std::string csv = slurp(out1 / "dispersion.csv");
    CHECK(csv.rfind("# kpplab format=1 config=", 0) == 0);
    CHECK(csv.find("lambda,mu,c_of_lambda") != std::string::npos);

    // a second run of the same config is byte-identical
    CHECK(run_cli("dispersion --config " + cfg + " --out " + out2.string()) == 0);
    CHECK(slurp(out2 / "dispersion.json") == js);
    CHECK(slurp(out2 / "dispersion.csv") == csv);
}

TEST_CASE("simulate: snapshots and observation log are emitted") {
    fs::path dir = scratch();
    write_text(dir / "sim.json", R"({
        "version": 1,
        "model": {"mu_hat": 1.0, "kappa": 1.0},
        "grid": {"x_min": -20, "x_max": 24, "cells_per_period": 32},
        "scenario": {"t_end": 5, "snapshot_dt": 2.5}
    })");
    fs::path out = dir / "sim_out";
    CHECK(run_cli("simulate --config " + (dir / "sim.json").string() + " --out " +
                  out.string()) == 0);

    std::string obs = slurp(out / "observations.csv");
    CHECK(obs.rfind("# kpplab format=1 config=", 0) == 0);
    CHECK(obs.find("t,front_pos,mass") != std::string::npos);
    int snaps = 0;
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().filename().string().rfind("snap_t", 0) == 0) ++snaps;
    CHECK(snaps == 3);  // t = 0, 2.5, 5
}

TEST_CASE("experiment subcommand: passing report, deterministic bytes") {
    fs::path dir = scratch();
    write_text(dir / "steep.json", R"({
        "version": 1,
        "model": {"mu_hat": [1.0, 0.5], "kappa": 1.0},
        "grid": {"x_min": -20, "x_max": 20, "cells_per_period": 32},
        "scenario": {"t_end": 4, "n_pairs": 4, "seed": 11}
    })");
    std::string cfg = (dir / "steep.json").string();
    fs::path out1 = dir / "steep1", out2 = dir / "steep2";
    CHECK(run_cli("steepness --config " + cfg + " --out " + out1.string()) == 0);

    std::string rep = slurp(out1 / "steepness_report.json");
    CHECK(rep.find("\"id\": \"steepness\"") != std::string::npos);
    CHECK(rep.find("\"pass\": true") != std::string::npos);
    std::string trace = slurp(out1 / "steepness_steepness.csv");
    CHECK(trace.rfind("# kpplab format=1 config=", 0) == 0);

    CHECK(run_cli("steepness --config " + cfg + " --out " + out2.string()) == 0);
    CHECK(slurp(out2 / "steepness_report.json") == rep);
    CHECK(slurp(out2 / "steepness_steepness.csv") == trace);
}
