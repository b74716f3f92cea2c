#pragma once

#include <json.hpp>

#include "resetfr/hosidf_closed.hpp"
#include "resetfr/hybridsim.hpp"

namespace resetfr {

// PCI-PID tuning. Frequencies in rad/s.
struct CaseStudyParams {
    double gamma = 0.0;
    double kp = 20.5;
    double omega_c = 2.0 * kPi * 150.0;
    double omega_d = 2.0 * kPi * 150.0 / 4.8;
    double omega_t = 2.0 * kPi * 150.0 * 4.8;
    double omega_f = 2.0 * kPi * 150.0 * 10.0;
    double omega_i = 2.0 * kPi * 150.0 * 0.1;

    // Lead, lag and integrator corners placed around a crossover.
    static CaseStudyParams around(double omega_c, double gamma, double kp);
    void validate() const;
};

// Single-mode mass-spring-damper stage.
LinearSystem build_plant();

// Proportional-plus-reset-integrator 1 + omega_i/s with the integrator as the reset state.
ResetController build_pci(const CaseStudyParams& p);
// K_p (s/w_d + 1)/(s/w_t + 1) * 1/(s/w_f + 1)
LinearSystem build_pid_part(const CaseStudyParams& p);

ClosedLoopSystem build_pci_pid(const CaseStudyParams& p);
// Same loop with resets triggered by the shaped error.
ClosedLoopSystem build_tpci_pid(const CaseStudyParams& p, const ShapingFilter& sf);
// Shaping filter used by the T-PCI-PID study, centred at `center` rad/s.
ShapingFilter tpci_shaping(double center);

struct OpenLoopDemo {
    OpenLoopSetup chain;
    SinusoidSpec input;
};
// FORE (corner 300 pi, gamma = 0) -> lead (75 pi, 1200 pi) -> unity plant,
// driven by sin(400 pi t).
OpenLoopDemo build_open_loop_demo();

// JSON mirrors of the parameter sets. Frequencies are read in the unit named
// by the "units" field ("rad/s" or "Hz"); omitted corners follow omega_c.
CaseStudyParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const CaseStudyParams& p);
ShapingFilter shaping_from_json(const nlohmann::json& j, double default_center);
nlohmann::json shaping_to_json(const ShapingFilter& sf);

}  // namespace resetfr
