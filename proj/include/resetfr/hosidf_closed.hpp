#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "resetfr/hosidf_open.hpp"
#include "resetfr/linsys.hpp"
#include "resetfr/spectrum.hpp"

namespace resetfr {

// Anti-notch trigger filter
//
//   C_s(s) = k ((s/w)^2 + s/(w Q1) + 1) / ((s/w)^2 + s/(w Q2) + 1)
//
// with unity-phase gain k Q2/Q1 at the center frequency w.
struct ShapingFilter {
    double center = 1.0;  // rad/s
    double q1 = 1.0;
    double q2 = 100.0;
    double gain = 0.05;

    void validate() const;
    TransferFunction transfer_function() const;
    Complex at(double omega) const { return transfer_function().at(omega); }
};

// Unity-feedback loop r -> e -> [reset controller] -> v -> C_alpha -> u -> plant -> y.
// The optional shaping filter only changes which signal triggers the resets.
class ClosedLoopSystem {
public:
    ClosedLoopSystem(ResetController rc, LinearSystem c_alpha, LinearSystem plant,
                     std::optional<ShapingFilter> shaping = std::nullopt);

    const ResetController& rc() const { return rc_; }
    const LinearSystem& c_alpha() const { return c_alpha_; }
    const LinearSystem& plant() const { return plant_; }
    const std::optional<ShapingFilter>& shaping() const { return shaping_; }

    // Realizations of the linear blocks; the loop P_alpha is their cascade.
    const StateSpace& c_alpha_ss() const { return c_alpha_ss_; }
    const StateSpace& plant_ss() const { return plant_ss_; }
    const StateSpace& p_alpha_ss() const { return p_alpha_ss_; }

    // Loop with r = 0, state [x_c; x_alpha]:
    //   A_cl = [A_R, -B_R C_a; B_a C_R, A_a - B_a D_R C_a],  C_cl = [0, C_a]
    // and the reset map diag(A_rho, I).
    const Matrix& a_cl() const { return a_cl_; }
    const Matrix& b_cl() const { return b_cl_; }
    const Matrix& c_cl() const { return c_cl_; }
    const Matrix& a_rho_cl() const { return a_rho_cl_; }

    ClosedLoopSystem with_gamma(double gamma) const;
    ClosedLoopSystem with_shaping(std::optional<ShapingFilter> sf) const;

private:
    ResetController rc_;
    LinearSystem c_alpha_;
    LinearSystem plant_;
    std::optional<ShapingFilter> shaping_;
    StateSpace c_alpha_ss_;
    StateSpace plant_ss_;
    StateSpace p_alpha_ss_;
    Matrix a_cl_;
    Matrix b_cl_;
    Matrix c_cl_;
    Matrix a_rho_cl_;
};

// Terms of the harmonic-triggered correction factor at one frequency.
struct GammaResult {
    double omega = 0.0;
    double gamma = 1.0;
    double denominator = 1.0;  // 1 - sum(psi_n dc_n / dc_1)
    int n_max = 1;
    double delta_c1 = 0.0;
    std::map<int, double> psi;      // odd n >= 3
    std::map<int, double> delta_c;  // odd n >= 3, first (reset) component
};

// Singular when |1 - sum| falls below this.
inline constexpr double kGammaSingularTol = 1e-9;

GammaResult gamma(const ClosedLoopSystem& sys, double omega, int n_max);

struct LoopResponse {
    double omega = 0.0;
    int n = 1;
    Complex l_bl;
    Complex l_nl;
    Complex l_o;
};

LoopResponse loop_response(const ClosedLoopSystem& sys, double omega, int n, double gamma_value);

// Per-harmonic closed-loop transfer functions from R_1 to E_n, Y_n, U_n.
class SensitivitySet {
public:
    SensitivitySet() = default;
    SensitivitySet(double omega, int n_max) : omega_(omega), n_max_(n_max) {}

    double omega() const { return omega_; }
    int n_max() const { return n_max_; }

    Complex s(int n) const { return lookup(s_, n); }
    Complex t(int n) const { return lookup(t_, n); }
    Complex cs(int n) const { return lookup(cs_, n); }

    void set(int n, Complex s, Complex t, Complex cs);

    GammaResult gamma;  // left at the default (Gamma = 1) for the baseline methods

private:
    static Complex lookup(const std::map<int, Complex>& m, int n);

    double omega_ = 0.0;
    int n_max_ = 1;
    std::map<int, Complex> s_;
    std::map<int, Complex> t_;
    std::map<int, Complex> cs_;
};

SensitivitySet closed_loop_sensitivities(const ClosedLoopSystem& sys, double omega, int n_max);

struct SensitivityTriple {
    Complex s;
    Complex t;
    Complex cs;
};

// Describing-function baseline: first harmonic of the classical HOSIDF only.
SensitivityTriple method_a(const ClosedLoopSystem& sys, double omega);
// Classical HOSIDF propagated through the base-linear loop, without Gamma.
SensitivityTriple method_b(const ClosedLoopSystem& sys, double omega, int n);
SensitivitySet method_b_set(const ClosedLoopSystem& sys, double omega, int n_max);

struct PredictedSignals {
    HarmonicSpectrum e;
    HarmonicSpectrum y;
    HarmonicSpectrum u;
    std::vector<double> e_t;
    std::vector<double> y_t;
    std::vector<double> u_t;
};

// Steady-state response to r = amplitude sin(omega t).
PredictedSignals predict_signals(const SensitivitySet& sens, double amplitude,
                                 std::span<const double> t_grid);
PredictedSignals predict_signals(const ClosedLoopSystem& sys, double amplitude, double omega,
                                 int n_max, std::span<const double> t_grid);

}  // namespace resetfr
