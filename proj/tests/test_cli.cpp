#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "resetfr/cli.hpp"

using namespace resetfr;
using namespace resetfr::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("resetfr_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string config_error_path(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

json pci_config(const fs::path& out) {
    return {{"system", {{"case", "pci_pid"}}},
            {"excitation", {{"amplitude", 1.0}, {"frequencies_hz", {100.0}}, {"units", "Hz"}}},
            {"n_harmonics", 5},
            {"output_dir", out.string()}};
}

}  // namespace

TEST_CASE("FNV-1a reference vectors", "[cli]") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("configuration errors name the offending field", "[cli]") {
    json j = pci_config("/tmp");
    CHECK(config_error_path(j).empty());
    j["excitation"]["amplitude"] = -1.0;
    CHECK(config_error_path(j) == "excitation.amplitude");
    j = pci_config("/tmp");
    j["excitation"]["frequencies_hz"] = {10.0, "x"};
    CHECK(config_error_path(j) == "excitation.frequencies_hz[1]");
    j = pci_config("/tmp");
    j["system"]["case"] = "bogus";
    CHECK(config_error_path(j) == "system.case");
    j = pci_config("/tmp");
    j.erase("system");
    CHECK(config_error_path(j) == "$.system");
    j = pci_config("/tmp");
    j["sim"] = {{"init", "hot"}};
    CHECK(config_error_path(j) == "sim.init");
    j = pci_config("/tmp");
    j["system"] = {{"case", "custom"}, {"reset_controller", {{"A", 0}, {"B", 1}, {"C", 1}}}};
    CHECK(config_error_path(j) == "system.reset_controller.gamma");
}

TEST_CASE("overrides change the configuration hash", "[cli]") {
    const json j = pci_config("/tmp");
    const auto a = parse_config(j);
    const auto b = parse_config(j, CliOverrides{std::nullopt, 7, std::nullopt});
    CHECK(a.hash != b.hash);
    CHECK(b.n_harmonics == std::vector<int>{7});
    CHECK(parse_config(j).hash == a.hash);
}

TEST_CASE("bode-open writes odd harmonics with a header", "[cli]") {
    const auto dir = scratch_dir("bode_open");
    const auto cfg = write_config(dir, pci_config(dir));
    std::ostringstream log;
    REQUIRE(run("bode-open", cfg.string(), {}, Method::corrected, log) == kOk);
    const auto lines = read_lines(dir / "bode_open.csv");
    REQUIRE(lines.size() == 2 + 3);
    CHECK(lines[0].rfind("# resetfr 0.1.0 config_hash=", 0) == 0);
    CHECK(lines[1] == "f_hz,n,Cn_mag_db,Cn_phase_deg,Hn_mag_db,Hn_phase_deg");
    CHECK(lines[2].rfind("100,1,", 0) == 0);
    CHECK(lines[4].rfind("100,5,", 0) == 0);
}

TEST_CASE("bode-closed adds baseline columns on request", "[cli]") {
    const auto dir = scratch_dir("bode_closed");
    const auto cfg = write_config(dir, pci_config(dir));
    std::ostringstream log;
    REQUIRE(run("bode-closed", cfg.string(), {}, Method::all, log) == kOk);
    const auto lines = read_lines(dir / "bode_closed.csv");
    REQUIRE(lines.size() == 5);
    const auto cols = std::count(lines[1].begin(), lines[1].end(), ',') + 1;
    CHECK(cols == 10 + 12 + 1);
    for (std::size_t i = 2; i < lines.size(); ++i)
        CHECK(std::count(lines[i].begin(), lines[i].end(), ',') + 1 == cols);
}

TEST_CASE("empty frequency list is not an error", "[cli]") {
    const auto dir = scratch_dir("empty");
    json j = pci_config(dir);
    j["excitation"]["frequencies_hz"] = json::array();
    const auto cfg = write_config(dir, j);
    std::ostringstream log;
    CHECK(run("predict", cfg.string(), {}, Method::corrected, log) == kOk);
    CHECK(run("bode-open", cfg.string(), {}, Method::corrected, log) == kOk);
}

TEST_CASE("a linear single-harmonic loop predicts a pure sinusoid", "[cli]") {
    const auto dir = scratch_dir("linear");
    json j = {{"system",
               {{"case", "custom"},
                {"reset_controller", {{"A", {{0.0}}}, {"B", {{1.0}}}, {"C", {{1.0}}}, {"gamma", 1.0}}},
                {"plant", {{"num", {1.0}}, {"den", {1.0, 1.0}}}}}},
              {"excitation", {{"amplitude", 2.0}, {"frequencies_hz", {0.5}}}},
              {"n_harmonics", 1},
              {"sim", {{"samples_per_period", 1024}}},
              {"output_dir", dir.string()}};
    const auto cfg = write_config(dir, j);
    std::ostringstream log;
    REQUIRE(run("predict", cfg.string(), {}, Method::corrected, log) == kOk);
    const auto lines = read_lines(dir / "predict_0.5Hz.csv");
    REQUIRE(lines.size() == 2 + 1025);
    const double w = kPi;
    const Complex s(0.0, w);
    const Complex l = 1.0 / (s * (s + 1.0));
    const Complex sens = 2.0 / (1.0 + l);
    for (std::size_t k = 2; k < lines.size(); k += 101) {
        double t = 0.0, e = 0.0;
        std::sscanf(lines[k].c_str(), "%lf,%lf", &t, &e);
        CHECK(std::abs(e - std::imag(sens * std::exp(Complex(0.0, w * t)))) < 1e-10);
    }
}

TEST_CASE("exit codes", "[cli]") {
    const auto dir = scratch_dir("codes");
    std::ostringstream log;
    CHECK(run("bode-open", (dir / "missing.json").string(), {}, Method::corrected, log) == kConfigError);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(run("bode-open", (dir / "broken.json").string(), {}, Method::corrected, log) == kConfigError);
    CHECK(log.str().find("config error") != std::string::npos);

    // an unstable loop cannot be certified
    json j = {{"system",
               {{"case", "custom"},
                {"reset_controller", {{"A", 0.0}, {"B", 1.0}, {"C", 1.0}, {"gamma", 0.0}}},
                {"plant", {{"num", {1.0}}, {"den", {1.0, -5.0}}}}}},
              {"excitation", {{"frequencies_hz", json::array()}}},
              {"verify", {{"beta", 1.0}, {"P", 1.0}}},
              {"output_dir", dir.string()}};
    const auto cfg = write_config(dir, j);
    CHECK(run("verify", cfg.string(), {}, Method::corrected, log) == kAssumptionViolation);

    // a window that cannot settle in the allowed number of periods
    json slow = pci_config(dir);
    slow["sim"] = {{"init", "zero"}, {"periods", 4}, {"transient_periods", 2}, {"max_periods", 4},
                   {"samples_per_period", 1024}};
    CHECK(run("simulate", write_config(dir, slow).string(), {}, Method::corrected, log) ==
          kNonConvergence);
}

TEST_CASE("simulate and compare outputs", "[cli]") {
    const auto dir = scratch_dir("sim");
    json j = pci_config(dir);
    j["n_harmonics"] = {1, 21};
    const auto cfg = write_config(dir, j);
    std::ostringstream log;
    REQUIRE(run("simulate", cfg.string(), {}, Method::corrected, log) == kOk);
    std::ifstream in(dir / "sim_100Hz.json");
    const auto summary = json::parse(in);
    CHECK(summary.at("resets_per_period") == 2);
    CHECK(summary.at("regime") == "two-reset");

    REQUIRE(run("compare", cfg.string(), {}, Method::corrected, log) == kOk);
    std::ifstream cin(dir / "compare.json");
    const auto report = json::parse(cin);
    const auto& results = report.at("frequencies").at(0).at("results");
    REQUIRE(results.size() == 2);
    CHECK(results.at(1).at("pe").get<double>() < results.at(0).at("pe").get<double>());
    CHECK_FALSE(report.at("frequencies").at(0).contains("warning"));
}
