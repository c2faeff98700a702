#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "incnet/scenario.hpp"

using namespace incnet;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kConfigDir = INCENTIVE_NET_CONFIG_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "incnet_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& command, const fs::path& config, const fs::path& out) {
    ScenarioOptions opts;
    opts.command = command;
    opts.config_path = config.string();
    opts.out_dir = out.string();
    opts.workers = 2;
    return run_scenario(opts);
}

}  // namespace

TEST_CASE("design scenario on the ring reproduces the exact benchmark") {
    const fs::path out = fresh_dir("ring_design");
    REQUIRE(run("design", kConfigDir / "ring4_design.json", out) == 0);
    const json metrics = json::parse(slurp(out / "metrics.json"));
    CHECK(metrics.at("scenario") == "ring4-design");
    CHECK(metrics.at("v_opt").get<double>() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(metrics.at("poa").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    const json protocol = json::parse(slurp(out / "protocol.json"));
    for (const auto& agent : protocol.at("strategy"))
        for (const auto& link : agent) {
            CHECK(link[0].get<double>() == 0.0);
            CHECK(link[1].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
        }
    CHECK(fs::exists(out / "dcrs_trace.csv"));
}

TEST_CASE("design scenario on the star reports the compensated ratio") {
    const fs::path out = fresh_dir("star_design");
    REQUIRE(run("design", kConfigDir / "star4_design.json", out) == 0);
    const json metrics = json::parse(slurp(out / "metrics.json"));
    CHECK(metrics.at("v_star").get<double>() == doctest::Approx(27.0 / 7.0).epsilon(1e-4));
    CHECK(metrics.at("poa").get<double>() == doctest::Approx(28.0 / 27.0).epsilon(1e-4));
    CHECK(metrics.at("ppe_max_gain").get<double>() <= 1e-9);
}

TEST_CASE("benchmark on an edgeless graph") {
    const fs::path out = fresh_dir("edgeless");
    REQUIRE(run("benchmark", kConfigDir / "edgeless_benchmark.json", out) == 0);
    const json metrics = json::parse(slurp(out / "metrics.json"));
    CHECK(metrics.at("v_opt").get<double>() == 0.0);
}

TEST_CASE("scenario outputs are byte-identical across runs") {
    const fs::path out1 = fresh_dir("det1");
    const fs::path out2 = fresh_dir("det2");
    for (const auto& [cmd, cfg] : std::vector<std::pair<std::string, std::string>>{
             {"design", "star4_design.json"},
             {"benchmark", "edgeless_benchmark.json"},
             {"compare-tft", "tft_compare.json"}}) {
        REQUIRE(run(cmd, kConfigDir / cfg, out1 / cmd) == 0);
        REQUIRE(run(cmd, kConfigDir / cfg, out2 / cmd) == 0);
        for (const auto& entry : fs::directory_iterator(out1 / cmd)) {
            const fs::path twin = out2 / cmd / entry.path().filename();
            REQUIRE(fs::exists(twin));
            CHECK(slurp(entry.path()) == slurp(twin));
        }
    }
}

TEST_CASE("simulate scenario writes occupancy statistics") {
    const fs::path out = fresh_dir("simulate");
    // shrink the shipped config so the unit test stays fast
    json cfg = json::parse(slurp(kConfigDir / "star4_simulate.json"));
    cfg["simulate"]["horizon"] = 5000;
    const fs::path cfg_path = out / "config.json";
    {
        std::ofstream os(cfg_path);
        os << cfg.dump(2);
    }
    REQUIRE(run("simulate", cfg_path, out) == 0);
    const json metrics = json::parse(slurp(out / "metrics.json"));
    CHECK(metrics.at("time_avg_welfare").get<double>() > 0.0);
    CHECK(metrics.at("stationary_occupancy").size() == 4);
}

TEST_CASE("invalid configs exit nonzero") {
    const fs::path out = fresh_dir("invalid");
    const fs::path cfg_path = out / "bad.json";
    {
        std::ofstream os(cfg_path);
        os << "{\"delta\": 2.0, \"topology\": {\"kind\": \"ring\", \"n\": 4}}";
    }
    CHECK(run("design", cfg_path, out) != 0);
    CHECK(run("design", out / "missing.json", out) != 0);
    CHECK(run("no-such-command", cfg_path, out) != 0);
}

TEST_CASE("the installed binary runs a scenario end to end") {
    const fs::path out = fresh_dir("binary_smoke");
    std::ostringstream cmd;
    cmd << "\"" << INCENTIVE_NET_BIN << "\" design --config \""
        << (kConfigDir / "ring4_design.json").string() << "\" --out \"" << out.string()
        << "\" >/dev/null 2>&1";
    CHECK(std::system(cmd.str().c_str()) == 0);
    CHECK(fs::exists(out / "protocol.json"));
    CHECK(fs::exists(out / "metrics.json"));
}
