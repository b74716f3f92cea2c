#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "resetfr/cli.hpp"
#include "resetfr/verify.hpp"

namespace resetfr::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Magnitude in dB and phase in degrees; both empty for an exact zero.
std::string db(Complex z) { return z == 0.0 ? std::string() : num(mag_db(z)); }
std::string deg(Complex z) { return z == 0.0 ? std::string() : num(principal_angle(z) * 180.0 / kPi); }

std::string freq_tag(double f_hz) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%gHz", f_hz);
    return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path p = fs::path(cfg.output_dir) / name;
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

std::ofstream open_csv(const RunConfig& cfg, const std::string& name, const std::string& header) {
    auto os = open_output(cfg, name);
    os << "# resetfr " << kVersion << " config_hash=" << cfg.hash << '\n' << header << '\n';
    return os;
}

void write_json(const RunConfig& cfg, const std::string& name, json body) {
    body["version"] = kVersion;
    body["config_hash"] = cfg.hash;
    auto os = open_output(cfg, name);
    os << body.dump(2) << '\n';
}

// Runs fn(i) for every frequency index on a small worker pool. Results keep
// the input order; the first failure (in input order) is rethrown.
template <class T, class Fn>
std::vector<T> for_each_frequency(std::size_t count, Fn fn) {
    std::vector<std::optional<T>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, count);
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    if (count > 0) worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(count);
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

double omega_of(double f_hz) { return 2.0 * kPi * f_hz; }

const ClosedLoopSystem& require_closed(const BuiltSystem& b, const char* command) {
    if (!b.closed)
        throw ConfigError("system.case", std::string(command) + " needs a closed-loop system");
    return *b.closed;
}

struct Prediction {
    HarmonicSpectrum e, y, u;
};

// Steady-state harmonic spectra predicted for one excitation frequency.
Prediction predict_spectra(const BuiltSystem& b, double amplitude, double w, int n_max) {
    if (b.closed) {
        const auto sens = closed_loop_sensitivities(*b.closed, w, n_max);
        const auto p = predict_signals(sens, amplitude, {});
        return {p.e, p.y, p.u};
    }
    const auto& ch = *b.open;
    Prediction p{HarmonicSpectrum(w), HarmonicSpectrum(w), HarmonicSpectrum(w)};
    p.e.set(1, amplitude);
    const auto chain = cn_intermediates(ch.rc, w);
    for (int n = 1; n <= n_max; n += 2) {
        const double wn = n * w;
        Complex c = nonlinear_hosidf(ch.rc, chain, w, n);
        if (n == 1) c += base_linear_response(ch.rc, w);
        const Complex u = amplitude * c * ch.c_alpha.at(wn);
        p.u.set(n, u);
        p.y.set(n, u * ch.plant.at(wn));
    }
    return p;
}

Trajectory simulate_built(const BuiltSystem& b, double amplitude, double w, const SimConfig& sim) {
    const SinusoidSpec input{amplitude, 1, w, 0.0};
    if (b.closed) return simulate(*b.closed, input, sim);
    return simulate_open(*b.open, input, std::nullopt, sim);
}

std::string multiple_reset_warning(double f_hz, int resets) {
    return "f=" + num(f_hz) + " Hz: " + std::to_string(resets) +
           " resets per period; the two-reset assumption is violated and predictions are unreliable";
}

}  // namespace

int cmd_bode_open(const RunConfig& cfg, std::ostream& log) {
    const int n_max = cfg.n_harmonics.front();
    const auto rows = for_each_frequency<std::string>(cfg.frequencies_hz.size(), [&](std::size_t i) {
        const double f = cfg.frequencies_hz[i];
        const double w = omega_of(f);
        const auto rc = build_system(cfg.system, w).rc();
        const auto chain = cn_intermediates(rc, w);
        std::string out;
        for (int n = 1; n <= n_max; n += 2) {
            Complex cn = nonlinear_hosidf(rc, chain, w, n);
            if (n == 1) cn += base_linear_response(rc, w);
            const Complex hn = classical_hosidf(rc, w, n);
            out += num(f) + ',' + std::to_string(n) + ',' + db(cn) + ',' + deg(cn) + ',' + db(hn) +
                   ',' + deg(hn) + '\n';
        }
        return out;
    });
    auto os = open_csv(cfg, "bode_open.csv", "f_hz,n,Cn_mag_db,Cn_phase_deg,Hn_mag_db,Hn_phase_deg");
    for (const auto& r : rows) os << r;
    log << "wrote " << (fs::path(cfg.output_dir) / "bode_open.csv").string() << '\n';
    return kOk;
}

int cmd_bode_closed(const RunConfig& cfg, Method method, std::ostream& log) {
    const int n_max = cfg.n_harmonics.front();
    const bool with_a = method == Method::a || method == Method::all;
    const bool with_b = method == Method::b || method == Method::all;
    auto triple = [](Complex s, Complex t, Complex cs) {
        return ',' + db(s) + ',' + deg(s) + ',' + db(t) + ',' + deg(t) + ',' + db(cs) + ',' + deg(cs);
    };
    std::string header = "f_hz,n,S_mag_db,S_phase_deg,T_mag_db,T_phase_deg,CS_mag_db,CS_phase_deg,gamma,psi_n";
    for (const char* m : {"A", "B"}) {
        if ((m[0] == 'A' && !with_a) || (m[0] == 'B' && !with_b)) continue;
        for (const char* q : {"S", "T", "CS"})
            header += std::string(",") + m + "_" + q + "_mag_db," + m + "_" + q + "_phase_deg";
    }
    header += ",flag";
    const int extra_cols = 6 * (static_cast<int>(with_a) + static_cast<int>(with_b));

    const auto rows = for_each_frequency<std::string>(cfg.frequencies_hz.size(), [&](std::size_t i) {
        const double f = cfg.frequencies_hz[i];
        const double w = omega_of(f);
        const auto built = build_system(cfg.system, w);
        const auto& sys = require_closed(built, "bode-closed");
        SensitivitySet sens;
        try {
            sens = closed_loop_sensitivities(sys, w, n_max);
        } catch (const SingularityError& e) {
            std::string row = num(f) + ",1,,,,,,,,";
            row += std::string(static_cast<std::size_t>(extra_cols), ',');
            return row + ",singular: " + std::string(e.what()) + '\n';
        }
        std::string out;
        for (int n = 1; n <= n_max; n += 2) {
            out += num(f) + ',' + std::to_string(n) + triple(sens.s(n), sens.t(n), sens.cs(n)) + ',' +
                   num(sens.gamma.gamma) + ',' + (n == 1 ? std::string() : num(sens.gamma.psi.at(n)));
            if (with_a) {
                if (n == 1) {
                    const auto a = method_a(sys, w);
                    out += triple(a.s, a.t, a.cs);
                } else {
                    out += ",,,,,,";
                }
            }
            if (with_b) {
                const auto b = method_b(sys, w, n);
                out += triple(b.s, b.t, b.cs);
            }
            out += ",\n";
        }
        return out;
    });
    auto os = open_csv(cfg, "bode_closed.csv", header);
    for (const auto& r : rows) os << r;
    log << "wrote " << (fs::path(cfg.output_dir) / "bode_closed.csv").string() << '\n';
    return kOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& log) {
    const int n_max = cfg.n_harmonics.front();
    const int samples = cfg.sim.samples_per_period;
    const auto files = for_each_frequency<std::string>(cfg.frequencies_hz.size(), [&](std::size_t i) {
        const double f = cfg.frequencies_hz[i];
        const double w = omega_of(f);
        const auto p = predict_spectra(build_system(cfg.system, w), cfg.amplitude, w, n_max);
        std::vector<double> t(static_cast<std::size_t>(samples) + 1);
        for (int k = 0; k <= samples; ++k) t[static_cast<std::size_t>(k)] = k * (1.0 / f) / samples;
        const auto e = reconstruct(p.e, t);
        const auto y = reconstruct(p.y, t);
        const auto u = reconstruct(p.u, t);
        const std::string name = "predict_" + freq_tag(f) + ".csv";
        auto os = open_csv(cfg, name, "t,e_pre,y_pre,u_pre");
        for (std::size_t k = 0; k < t.size(); ++k)
            os << num(t[k]) << ',' << num(e[k]) << ',' << num(y[k]) << ',' << num(u[k]) << '\n';
        return name;
    });
    for (const auto& f : files) log << "wrote " << (fs::path(cfg.output_dir) / f).string() << '\n';
    return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    const auto files = for_each_frequency<std::string>(cfg.frequencies_hz.size(), [&](std::size_t i) {
        const double f = cfg.frequencies_hz[i];
        const double w = omega_of(f);
        const auto traj = simulate_built(build_system(cfg.system, w), cfg.amplitude, w, cfg.sim);
        const auto rec = steady_state(traj, w, traj.record_periods, cfg.sim.residual_tol);
        const auto check = classify_resets(rec, traj.periods_run);
        const std::string base = "sim_" + freq_tag(f);
        {
            auto os = open_output(cfg, base + ".csv");
            os << "# resetfr " << kVersion << " config_hash=" << cfg.hash << '\n';
            write_trajectory_csv(os, traj, &rec);
        }
        json j = to_json(check);
        j["f_hz"] = f;
        j["window_periods"] = rec.periods;
        write_json(cfg, base + ".json", j);
        return base;
    });
    for (const auto& f : files)
        log << "wrote " << (fs::path(cfg.output_dir) / (f + ".csv")).string() << " and .json\n";
    return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
    const auto entries = for_each_frequency<json>(cfg.frequencies_hz.size(), [&](std::size_t i) {
        const double f = cfg.frequencies_hz[i];
        const double w = omega_of(f);
        const auto built = build_system(cfg.system, w);
        const auto traj = simulate_built(built, cfg.amplitude, w, cfg.sim);
        const auto rec = steady_state(traj, w, traj.record_periods, cfg.sim.residual_tol);
        const auto check = classify_resets(rec, traj.periods_run);

        // Closed loops are judged on e; open chains on y, away from the jumps.
        const Signal sig = built.closed ? Signal::e : Signal::y;
        const std::size_t len = rec.last - rec.first + 1;
        const auto t = std::span(traj.t).subspan(rec.first, len);
        const auto s = std::span(traj.signal(sig)).subspan(rec.first, len);
        const auto centres = built.closed ? std::vector<double>{} : periodic_event_times(traj);
        const double halfwidth = built.closed ? 0.0 : 0.01 * traj.period();
        double peak = 0.0;
        for (double v : s) peak = std::max(peak, std::abs(v));

        json results = json::array();
        for (int nh : cfg.n_harmonics) {
            const auto p = predict_spectra(built, cfg.amplitude, w, nh);
            const auto pre = reconstruct(sig == Signal::e ? p.e : p.y, t);
            const double pe = prediction_error(t, s, t, pre, centres, halfwidth);
            results.push_back({{"n_harmonics", nh}, {"pe", pe}, {"pe_relative", peak > 0 ? pe / peak : 0.0}});
        }
        json j = {{"f_hz", f},
                  {"signal", signal_name(sig)},
                  {"peak", peak},
                  {"resets_per_period", check.resets_per_period},
                  {"two_reset", check.two_reset()},
                  {"regime", regime_name(check.regime)},
                  {"results", results}};
        if (check.regime == ResetRegime::multiple_reset)
            j["warning"] = multiple_reset_warning(f, check.resets_per_period);
        return j;
    });
    json report = {{"frequencies", entries}};
    for (const auto& e : entries)
        if (e.contains("warning")) log << "warning: " << e.at("warning").get<std::string>() << '\n';
    write_json(cfg, "compare.json", report);
    log << "wrote " << (fs::path(cfg.output_dir) / "compare.json").string() << '\n';
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    // The reset controller does not depend on the excitation frequency.
    const double w_ref = cfg.frequencies_hz.empty() ? 1.0 : omega_of(cfg.frequencies_hz.front());
    const auto ref = build_system(cfg.system, w_ref);

    std::vector<double> deltas = cfg.verify.delta_grid_s;
    if (deltas.empty()) deltas = FrequencyGrid::logspace(1e-6, 10.0, 200).values();
    json report = {{"open_loop_condition", to_json(open_loop_condition(ref.rc(), deltas))}};

    if (cfg.verify.beta && cfg.verify.p_nr) {
        const auto& sys = require_closed(ref, "verify (H_beta)");
        const auto check = hbeta_check(sys, Vector::Constant(1, *cfg.verify.beta),
                                       Matrix::Constant(1, 1, *cfg.verify.p_nr),
                                       FrequencyGrid::logspace(0.1, 1e6, 600));
        report["hbeta"] = to_json(check);
    }

    if (ref.closed) {
        const auto checks = for_each_frequency<json>(cfg.frequencies_hz.size(), [&](std::size_t i) {
            const double f = cfg.frequencies_hz[i];
            const double w = omega_of(f);
            const auto built = build_system(cfg.system, w);
            json j = to_json(two_reset_check(*built.closed, cfg.amplitude, w, cfg.sim));
            j["f_hz"] = f;
            if (j.at("regime") == "multiple-reset")
                j["warning"] = multiple_reset_warning(f, j.at("resets_per_period").get<int>());
            return j;
        });
        report["reset_regime"] = checks;
        for (const auto& c : checks)
            if (c.contains("warning")) log << "warning: " << c.at("warning").get<std::string>() << '\n';
    }
    write_json(cfg, "verify.json", report);
    log << "wrote " << (fs::path(cfg.output_dir) / "verify.json").string() << '\n';
    return kOk;
}

int run(const std::string& command, const std::string& config_path, const CliOverrides& overrides,
        Method method, std::ostream& log) {
    try {
        const RunConfig cfg = load_config(config_path, overrides);
        if (command == "bode-open") return cmd_bode_open(cfg, log);
        if (command == "bode-closed") return cmd_bode_closed(cfg, method, log);
        if (command == "predict") return cmd_predict(cfg, log);
        if (command == "simulate") return cmd_simulate(cfg, log);
        if (command == "compare") return cmd_compare(cfg, log);
        if (command == "verify") return cmd_verify(cfg, log);
        log << "error: unknown command " << command << '\n';
        return kConfigError;
    } catch (const ConfigError& e) {
        log << "config error at " << e.path() << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const ConvergenceError& e) {
        log << "not converged (residual " << e.residual() << "): " << e.what() << '\n';
        return kNonConvergence;
    } catch (const AssumptionViolation& e) {
        log << "assumption violated: " << e.what() << '\n';
        return kAssumptionViolation;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace resetfr::cli
