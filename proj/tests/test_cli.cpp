#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bhdimer/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "bhdimer");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = bhd::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bhdimer_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_config(const fs::path& dir, const json& j) {
    const fs::path f = dir / "config.json";
    std::ofstream(f) << j.dump();
    return f.string();
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& f) { return json::parse(slurp(f)); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
    auto r = invoke({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("phase-diagram") != std::string::npos);  // usage lists subcommands

    CHECK(invoke({}).code == 2);
    CHECK(invoke({"gain", "--no-such-flag"}).code == 2);
    CHECK(invoke({"figure", "9z"}).code == 2);
    CHECK(invoke({"gain", "--threads", "0"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config validation is a usage error") {
    const auto dir = scratch("config");
    auto run_with = [&](const json& cfg) {
        return invoke({"steady-state", "-c", write_config(dir, cfg), "-o", (dir / "out").string()});
    };
    auto r = run_with({{"dimer", {{"J_GHz", 0.25}, {"J_MHz", 250}}}});
    CHECK(r.code == 2);
    CHECK(r.err.find("J_MHz") != std::string::npos);
    CHECK(run_with({{"drive", {{"delta_MHz", "fast"}}}}).code == 2);
    CHECK(run_with({{"drive", {{"delta_MHz", 1}, {"pump_GHz", 7}}}}).code == 2);
    std::ofstream(dir / "config.json") << "{ not json";
    CHECK(invoke({"steady-state", "-c", (dir / "config.json").string(), "-o", (dir / "out").string()}).code == 2);
}

TEST_CASE("domain errors exit with 1 and name the error") {
    const auto dir = scratch("domain");
    auto r = invoke({"steady-state", "-c", write_config(dir, {{"dimer", {{"kappa_GHz", -0.1}}}}), "-o",
                     (dir / "out").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("InvalidParams:", 0) == 0);

    std::ofstream(dir / "short.csv") << "freq_Hz,phase_rad\n7e9,0.1\n7.1e9,0.2\n";
    r = invoke({"fit-reflection", "-c", write_config(dir, {{"trace", "short.csv"}}), "-o", (dir / "out").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("InvalidParams") != std::string::npos);
}

TEST_CASE("manifest echoes resolved config and outputs") {
    const auto dir = scratch("manifest");
    const auto out = dir / "out";
    REQUIRE(invoke({"reflection", "-c", write_config(dir, {{"noise_deg", 1.0}}), "-o", out.string(), "--seed", "9"})
                .code == 0);
    const json m = read_json(out / "manifest.json");
    CHECK(m["command"] == "reflection");
    CHECK(m["version"].get<std::string>().size() > 0);
    CHECK(m["config"]["seed"] == 9);
    CHECK(m["config"]["dimer"]["J_GHz"] == 0.25);  // defaults are echoed too
    CHECK(m["config"]["probe_GHz"]["points"] == 561);
    for (const auto& f : m["outputs"]) CHECK(fs::exists(out / f.get<std::string>()));
    CHECK(m.contains("timestamp"));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const auto dir = scratch("determinism");
    const std::string cfg = write_config(
        dir, {{"pump", {{"delta_MHz", -174}, {"gain_dB", 15}}}, {"samples_count", 20000}, {"seed", 4}});
    for (const char* sub : {"a", "b"})
        REQUIRE(invoke({"cumulants", "-c", cfg, "-o", (dir / sub).string()}).code == 0);
    CHECK(slurp(dir / "a" / "cumulants.json") == slurp(dir / "b" / "cumulants.json"));
    json ma = read_json(dir / "a" / "manifest.json"), mb = read_json(dir / "b" / "manifest.json");
    ma.erase("timestamp");
    mb.erase("timestamp");
    CHECK(ma == mb);

    // Thread count does not change grid results.
    const std::string pd = write_config(dir, {{"delta_MHz", {{"from", -400}, {"to", 300}, {"points", 15}}},
                                              {"flux_phps", {{"from", 0}, {"to", 3e12}, {"points", 15}}}});
    REQUIRE(invoke({"phase-diagram", "-c", pd, "-o", (dir / "t1").string(), "-t", "1"}).code == 0);
    REQUIRE(invoke({"phase-diagram", "-c", pd, "-o", (dir / "t4").string(), "-t", "4"}).code == 0);
    CHECK(slurp(dir / "t1" / "phase_diagram.csv") == slurp(dir / "t4" / "phase_diagram.csv"));
}

TEST_CASE("fit-reflection on the bundled trace") {
    const auto dir = scratch("fit");
    REQUIRE(invoke({"fit-reflection", "-o", dir.string()}).code == 0);
    const json f = read_json(dir / "fit.json");
    CHECK(f["omega_L_GHz"].get<double>() == doctest::Approx(7.0).epsilon(0.01));
    CHECK(f["omega_R_GHz"].get<double>() == doctest::Approx(7.2).epsilon(0.01));
    CHECK(f["kappa_GHz"].get<double>() == doctest::Approx(0.29).epsilon(0.01));
    CHECK(f["J_GHz"].get<double>() == doctest::Approx(0.25).epsilon(0.01));
    CHECK(f["rms_residual_deg"].get<double>() == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("figure 1c grid holds all three regions") {
    const auto dir = scratch("fig1c");
    REQUIRE(invoke({"figure", "1c", "-o", dir.string(), "-t", "4"}).code == 0);
    std::ifstream csv(dir / "phase_diagram.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "delta_Hz,flux_phps,n_solutions,n_stable,region");
    std::set<std::string> labels;
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        labels.insert(line.substr(line.rfind(',') + 1));
        ++rows;
    }
    CHECK(rows == 200u * 200u);
    CHECK(labels == std::set<std::string>{"S", "M", "P"});
    const json m = read_json(dir / "manifest.json");
    const json& d = m["config"]["phase_diagram"]["dimer"];
    CHECK(d["J_GHz"].get<double>() == doctest::Approx(0.7 * d["kappa_GHz"].get<double>()));
    CHECK(d["U_L_kHz"].get<double>() < 0.0);
    CHECK(fs::exists(dir / "locus.csv"));

    CHECK(invoke({"figure", "1c", "-c", "x.json", "-o", dir.string()}).code == 2);
}

TEST_CASE("every bundled config completes within 60 s") {
    for (const auto& e : fs::directory_iterator(BHD_CONFIG_DIR)) {
        std::string cmd = e.path().stem().string();
        std::replace(cmd.begin(), cmd.end(), '_', '-');
        const auto dir = scratch("bundled_" + cmd);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = invoke({cmd, "-c", e.path().string(), "-o", dir.string(), "-t", "4"});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        INFO(cmd << ": " << r.err);
        CHECK(r.code == 0);
        CHECK(secs < 60.0);
        CHECK(fs::exists(dir / "manifest.json"));
    }
}
