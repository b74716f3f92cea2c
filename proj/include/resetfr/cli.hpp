#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resetfr/casestudies.hpp"
#include "resetfr/errors.hpp"
#include "resetfr/hybridsim.hpp"

namespace resetfr::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kNonConvergence = 3,
    kAssumptionViolation = 4,
};

// Schema violation; `path` names the offending field, e.g. "excitation.amplitude".
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string path, const std::string& what)
        : InvalidArgument(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class CaseKind { pci_pid, tpci_pid, open_demo, custom };

struct SystemSpec {
    CaseKind kind = CaseKind::pci_pid;
    CaseStudyParams params;
    // T-PCI-PID: filter settings; the centre follows the excitation unless given.
    std::optional<nlohmann::json> shaping_json;
    // custom systems
    bool closed_loop = true;
    std::optional<ResetController> rc;
    LinearSystem c_alpha = TransferFunction::gain(1.0);
    LinearSystem plant = TransferFunction::gain(1.0);
};

// Everything needed to run one excitation frequency.
struct BuiltSystem {
    std::optional<ClosedLoopSystem> closed;
    std::optional<OpenLoopSetup> open;

    const ResetController& rc() const { return closed ? closed->rc() : open->rc; }
};

BuiltSystem build_system(const SystemSpec& spec, double omega);

struct VerifySpec {
    std::optional<double> beta;
    std::optional<double> p_nr;
    std::vector<double> delta_grid_s;
};

struct RunConfig {
    SystemSpec system;
    double amplitude = 1.0;
    std::vector<double> frequencies_hz;
    std::vector<int> n_harmonics{501};
    SimConfig sim;
    std::string output_dir = ".";
    VerifySpec verify;
    std::string hash;  // FNV-1a of the effective configuration
};

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<int> n_harmonics;
    std::optional<std::vector<double>> frequencies_hz;
};

RunConfig parse_config(const nlohmann::json& j, const CliOverrides& overrides = {});
RunConfig load_config(const std::string& path, const CliOverrides& overrides = {});

std::string fnv1a_hex(const std::string& text);

enum class Method { corrected, a, b, all };
Method parse_method(const std::string& s);

// Each command writes its files under cfg.output_dir and a short summary to
// `log`. Returns a process exit code.
int cmd_bode_open(const RunConfig& cfg, std::ostream& log);
int cmd_bode_closed(const RunConfig& cfg, Method method, std::ostream& log);
int cmd_predict(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);

// Dispatches by subcommand name and maps exceptions to exit codes.
int run(const std::string& command, const std::string& config_path, const CliOverrides& overrides,
        Method method, std::ostream& log);

}  // namespace resetfr::cli
