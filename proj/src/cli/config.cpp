#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "resetfr/cli.hpp"

namespace resetfr::cli {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "." + key, "missing field");
    return j.at(key);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Matrix as_matrix(const json& j, const std::string& path) {
    if (j.is_number()) return Matrix::Constant(1, 1, as_number(j, path));
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty matrix");
    const auto rows = j.size();
    const auto first = as_vector(j[0], path + "[0]");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(first.size()));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = as_vector(j[r], path + "[" + std::to_string(r) + "]");
        if (row.size() != first.size()) throw ConfigError(path, "ragged matrix rows");
        for (std::size_t c = 0; c < row.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return m;
}

TransferFunction as_tf(const json& j, const std::string& path) {
    try {
        return TransferFunction(as_vector(require(j, "num", path), path + ".num"),
                                as_vector(require(j, "den", path), path + ".den"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

SystemSpec parse_system(const json& j) {
    const std::string path = "system";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const auto& c = require(j, "case", path);
    if (!c.is_string()) throw ConfigError(path + ".case", "expected a string");
    const std::string name = c.get<std::string>();

    SystemSpec s;
    try {
        if (j.contains("params")) s.params = params_from_json(j.at("params"));
    } catch (const Error& e) {
        throw ConfigError(path + ".params", e.what());
    }
    if (j.contains("shaping")) {
        if (!j.at("shaping").is_object()) throw ConfigError(path + ".shaping", "expected an object");
        s.shaping_json = j.at("shaping");
    }

    if (name == "pci_pid") {
        s.kind = CaseKind::pci_pid;
    } else if (name == "tpci_pid") {
        s.kind = CaseKind::tpci_pid;
    } else if (name == "open_demo") {
        s.kind = CaseKind::open_demo;
        s.closed_loop = false;
    } else if (name == "custom") {
        s.kind = CaseKind::custom;
        const std::string loop = j.value("loop", std::string("closed"));
        if (loop != "closed" && loop != "open")
            throw ConfigError(path + ".loop", "must be \"closed\" or \"open\"");
        s.closed_loop = loop == "closed";
        const auto& r = require(j, "reset_controller", path);
        const std::string rp = path + ".reset_controller";
        try {
            s.rc = ResetController(as_matrix(require(r, "A", rp), rp + ".A"),
                                   as_matrix(require(r, "B", rp), rp + ".B"),
                                   as_matrix(require(r, "C", rp), rp + ".C"),
                                   r.contains("D") ? as_number(r.at("D"), rp + ".D") : 0.0,
                                   as_number(require(r, "gamma", rp), rp + ".gamma"));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(rp, e.what());
        }
        if (j.contains("c_alpha")) s.c_alpha = as_tf(j.at("c_alpha"), path + ".c_alpha");
        if (j.contains("plant")) s.plant = as_tf(j.at("plant"), path + ".plant");
    } else {
        throw ConfigError(path + ".case", "unknown case \"" + name +
                                              "\" (pci_pid, tpci_pid, open_demo, custom)");
    }
    return s;
}

SimConfig parse_sim(const json& j) {
    const std::string path = "sim";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    SimConfig s;
    if (j.contains("samples_per_period"))
        s.samples_per_period = as_int(j.at("samples_per_period"), path + ".samples_per_period");
    if (j.contains("periods")) s.periods = as_int(j.at("periods"), path + ".periods");
    if (j.contains("transient_periods"))
        s.transient_periods = as_int(j.at("transient_periods"), path + ".transient_periods");
    if (j.contains("max_periods")) s.max_periods = as_int(j.at("max_periods"), path + ".max_periods");
    if (j.contains("event_tol")) s.event_tol = as_number(j.at("event_tol"), path + ".event_tol");
    if (j.contains("residual_tol"))
        s.residual_tol = as_number(j.at("residual_tol"), path + ".residual_tol");
    if (j.contains("stiffness_limit"))
        s.stiffness_limit = as_number(j.at("stiffness_limit"), path + ".stiffness_limit");
    if (j.contains("extend_until_periodic")) {
        if (!j.at("extend_until_periodic").is_boolean())
            throw ConfigError(path + ".extend_until_periodic", "expected a boolean");
        s.extend_until_periodic = j.at("extend_until_periodic").get<bool>();
    }
    if (j.contains("init")) {
        const auto& v = j.at("init");
        if (v == "zero")
            s.init = InitialState::zero;
        else if (v == "linear")
            s.init = InitialState::linear_steady_state;
        else
            throw ConfigError(path + ".init", "must be \"zero\" or \"linear\"");
    }
    if (s.max_periods < s.periods) s.max_periods = s.periods;
    try {
        s.validate();
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
    return s;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

RunConfig parse_config(const json& input, const CliOverrides& overrides) {
    if (!input.is_object()) throw ConfigError("$", "configuration must be a JSON object");
    json j = input;
    if (overrides.out_dir) j["output_dir"] = *overrides.out_dir;
    if (overrides.n_harmonics) j["n_harmonics"] = *overrides.n_harmonics;
    if (overrides.frequencies_hz) j["excitation"]["frequencies_hz"] = *overrides.frequencies_hz;

    RunConfig cfg;
    cfg.system = parse_system(require(j, "system", "$"));

    const auto& ex = require(j, "excitation", "$");
    if (!ex.is_object()) throw ConfigError("excitation", "expected an object");
    if (ex.contains("units") && ex.at("units") != "Hz")
        throw ConfigError("excitation.units", "excitation frequencies are given in Hz");
    if (ex.contains("amplitude")) cfg.amplitude = as_number(ex.at("amplitude"), "excitation.amplitude");
    if (!(cfg.amplitude > 0.0)) throw ConfigError("excitation.amplitude", "must be positive");
    cfg.frequencies_hz =
        as_vector(require(ex, "frequencies_hz", "excitation"), "excitation.frequencies_hz");
    for (std::size_t i = 0; i < cfg.frequencies_hz.size(); ++i)
        if (!(cfg.frequencies_hz[i] > 0.0))
            throw ConfigError("excitation.frequencies_hz[" + std::to_string(i) + "]",
                              "must be positive");

    if (j.contains("n_harmonics")) {
        const auto& nh = j.at("n_harmonics");
        cfg.n_harmonics.clear();
        if (nh.is_array()) {
            for (std::size_t i = 0; i < nh.size(); ++i)
                cfg.n_harmonics.push_back(as_int(nh[i], "n_harmonics[" + std::to_string(i) + "]"));
        } else {
            cfg.n_harmonics.push_back(as_int(nh, "n_harmonics"));
        }
        if (cfg.n_harmonics.empty()) throw ConfigError("n_harmonics", "must not be empty");
        for (int n : cfg.n_harmonics)
            if (n < 1) throw ConfigError("n_harmonics", "must be at least 1");
    }

    if (j.contains("sim")) cfg.sim = parse_sim(j.at("sim"));
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("output_dir", "expected a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        if (!v.is_object()) throw ConfigError("verify", "expected an object");
        if (v.contains("beta")) cfg.verify.beta = as_number(v.at("beta"), "verify.beta");
        if (v.contains("P")) cfg.verify.p_nr = as_number(v.at("P"), "verify.P");
        if (v.contains("delta_grid_s"))
            cfg.verify.delta_grid_s = as_vector(v.at("delta_grid_s"), "verify.delta_grid_s");
    }
    cfg.hash = fnv1a_hex(j.dump());
    return cfg;
}

RunConfig load_config(const std::string& path, const CliOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j, overrides);
}

Method parse_method(const std::string& s) {
    if (s == "new") return Method::corrected;
    if (s == "A") return Method::a;
    if (s == "B") return Method::b;
    if (s == "all") return Method::all;
    throw ConfigError("--method", "must be one of new, A, B, all");
}

BuiltSystem build_system(const SystemSpec& spec, double omega) {
    BuiltSystem b;
    switch (spec.kind) {
        case CaseKind::pci_pid:
            b.closed = build_pci_pid(spec.params);
            break;
        case CaseKind::tpci_pid: {
            ShapingFilter sf = spec.shaping_json ? shaping_from_json(*spec.shaping_json, omega)
                                                 : tpci_shaping(omega);
            b.closed = build_tpci_pid(spec.params, sf);
            break;
        }
        case CaseKind::open_demo:
            b.open = build_open_loop_demo().chain;
            break;
        case CaseKind::custom:
            if (spec.closed_loop) {
                std::optional<ShapingFilter> sf;
                if (spec.shaping_json) sf = shaping_from_json(*spec.shaping_json, omega);
                b.closed = ClosedLoopSystem(*spec.rc, spec.c_alpha, spec.plant, sf);
            } else {
                b.open = OpenLoopSetup{*spec.rc, spec.c_alpha, spec.plant};
            }
            break;
    }
    return b;
}

}  // namespace resetfr::cli
