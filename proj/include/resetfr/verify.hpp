#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "resetfr/hosidf_closed.hpp"
#include "resetfr/hybridsim.hpp"

namespace resetfr {

// Periodic-solution condition of the open-loop reset element:
// spectral radius of A_rho e^{A_R delta} below one for every delta.
struct OpenLoopCondition {
    bool pass = false;
    double worst_radius = 0.0;
    double worst_delta = 0.0;
};
OpenLoopCondition open_loop_condition(const ResetController& rc, std::span<const double> deltas);

// Numeric certificate for quadratic stability with a user-supplied (beta, P):
//   H_beta(s) = [P, 0, beta C_alpha] (sI - A_cl)^{-1} [I; 0; 0]
// must have positive real part on the grid, and A_rho^T P A_rho - P <= 0.
struct HBetaCheck {
    Vector beta;
    Matrix p_nr;
    std::vector<double> omegas;
    double min_real = 0.0;
    double min_real_omega = 0.0;
    double inequality_residual = 0.0;  // largest eigenvalue of A_rho^T P A_rho - P
    bool positive_real = false;
    bool inequality_ok = false;
    bool pass() const { return positive_real && inequality_ok; }
};
HBetaCheck hbeta_check(const ClosedLoopSystem& sys, const Vector& beta, const Matrix& p_nr,
                       const FrequencyGrid& grid);

enum class ResetRegime { no_reset, two_reset, multiple_reset };
const char* regime_name(ResetRegime r);

struct TwoResetCheck {
    ResetRegime regime = ResetRegime::no_reset;
    int resets_per_period = 0;
    double residual = 0.0;
    int periods_run = 0;
    bool two_reset() const { return regime == ResetRegime::two_reset; }
};
TwoResetCheck classify_resets(const SteadyStateRecord& rec, int periods_run);
TwoResetCheck two_reset_check(const ClosedLoopSystem& sys, double amplitude, double omega,
                              const SimConfig& cfg);

nlohmann::json to_json(const OpenLoopCondition& c);
nlohmann::json to_json(const HBetaCheck& c);
nlohmann::json to_json(const TwoResetCheck& c);

}  // namespace resetfr
