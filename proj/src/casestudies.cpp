#include "resetfr/casestudies.hpp"

#include <cmath>
#include <string>

#include "resetfr/errors.hpp"

namespace resetfr {

namespace {

double unit_scale(const nlohmann::json& j) {
    const std::string units = j.value("units", std::string("rad/s"));
    if (units == "rad/s") return 1.0;
    if (units == "Hz") return 2.0 * kPi;
    throw InvalidArgument("units must be \"rad/s\" or \"Hz\", got \"" + units + "\"");
}

double number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw InvalidArgument(std::string(key) + " must be a number");
    return j.at(key).get<double>();
}

}  // namespace

CaseStudyParams CaseStudyParams::around(double omega_c, double gamma, double kp) {
    CaseStudyParams p;
    p.gamma = gamma;
    p.kp = kp;
    p.omega_c = omega_c;
    p.omega_d = omega_c / 4.8;
    p.omega_t = omega_c * 4.8;
    p.omega_f = omega_c * 10.0;
    p.omega_i = omega_c * 0.1;
    return p;
}

void CaseStudyParams::validate() const {
    for (double w : {omega_c, omega_d, omega_t, omega_f, omega_i, kp})
        if (!(w > 0.0) || !std::isfinite(w))
            throw InvalidArgument("case-study gains and frequencies must be finite and positive");
    if (!(gamma > -1.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (-1, 1]");
}

LinearSystem build_plant() { return TransferFunction({6.615e5}, {83.57, 279.4, 5.837e5}); }

ResetController build_pci(const CaseStudyParams& p) {
    p.validate();
    return {Matrix::Zero(1, 1), Matrix::Constant(1, 1, p.omega_i), Matrix::Ones(1, 1), 1.0, p.gamma};
}

LinearSystem build_pid_part(const CaseStudyParams& p) {
    p.validate();
    const std::vector<double> lead_den{1.0 / p.omega_t, 1.0};
    const std::vector<double> lowpass{1.0 / p.omega_f, 1.0};
    return TransferFunction({p.kp / p.omega_d, p.kp}, poly_multiply(lead_den, lowpass));
}

ClosedLoopSystem build_pci_pid(const CaseStudyParams& p) {
    return {build_pci(p), build_pid_part(p), build_plant()};
}

ClosedLoopSystem build_tpci_pid(const CaseStudyParams& p, const ShapingFilter& sf) {
    return {build_pci(p), build_pid_part(p), build_plant(), sf};
}

ShapingFilter tpci_shaping(double center) { return {center, 1.0, 100.0, 0.05}; }

OpenLoopDemo build_open_loop_demo() {
    OpenLoopDemo ex{{ResetController::fore(300.0 * kPi, 0.0),
                    TransferFunction({1.0 / (75.0 * kPi), 1.0}, {1.0 / (1200.0 * kPi), 1.0}),
                    TransferFunction::gain(1.0)},
                   {1.0, 1, 400.0 * kPi, 0.0}};
    return ex;
}

CaseStudyParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("case-study params must be a JSON object");
    const double k = unit_scale(j);
    const double wc = number(j, "omega_c", 2.0 * kPi * 150.0 / k) * k;
    auto p = CaseStudyParams::around(wc, number(j, "gamma", 0.0), number(j, "K_p", 20.5));
    p.omega_d = number(j, "omega_d", p.omega_d / k) * k;
    p.omega_t = number(j, "omega_t", p.omega_t / k) * k;
    p.omega_f = number(j, "omega_f", p.omega_f / k) * k;
    p.omega_i = number(j, "omega_i", p.omega_i / k) * k;
    p.validate();
    return p;
}

nlohmann::json params_to_json(const CaseStudyParams& p) {
    return {{"units", "rad/s"},     {"gamma", p.gamma},     {"K_p", p.kp},
            {"omega_c", p.omega_c}, {"omega_d", p.omega_d}, {"omega_t", p.omega_t},
            {"omega_f", p.omega_f}, {"omega_i", p.omega_i}};
}

ShapingFilter shaping_from_json(const nlohmann::json& j, double default_center) {
    if (!j.is_object()) throw InvalidArgument("shaping filter must be a JSON object");
    const double k = unit_scale(j);
    ShapingFilter sf = tpci_shaping(default_center);
    if (j.contains("center")) sf.center = number(j, "center", 0.0) * k;
    sf.q1 = number(j, "Q1", sf.q1);
    sf.q2 = number(j, "Q2", sf.q2);
    sf.gain = number(j, "k_cs", sf.gain);
    sf.validate();
    return sf;
}

nlohmann::json shaping_to_json(const ShapingFilter& sf) {
    return {{"units", "rad/s"}, {"center", sf.center}, {"Q1", sf.q1}, {"Q2", sf.q2}, {"k_cs", sf.gain}};
}

}  // namespace resetfr
