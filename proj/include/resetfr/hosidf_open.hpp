#pragma once

#include <utility>

#include "resetfr/linsys.hpp"
#include "resetfr/spectrum.hpp"

namespace resetfr {

// Reset controller with a single reset state (the first one):
//
//   dx/dt = A x + B e        between resets
//   x+    = A_rho x          when the trigger crosses zero, A_rho = diag(gamma, I)
//   v     = C x + D e
//
// gamma = 1 is the base-linear controller.
class ResetController {
public:
    ResetController(Matrix A, Matrix B, Matrix C, double D, double gamma);

    // Clegg-type integrator 1/s (generalized when gamma != 0).
    static ResetController clegg(double gamma);
    // First-order reset element 1/(s/omega_r + 1).
    static ResetController fore(double omega_r, double gamma);

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Matrix& C() const { return C_; }
    double D() const { return D_; }
    double gamma() const { return gamma_; }
    int states() const { return static_cast<int>(A_.rows()); }

    Matrix reset_matrix() const;
    StateSpace base_linear() const { return StateSpace(A_, B_, C_, D_); }
    ResetController with_gamma(double gamma) const { return {A_, B_, C_, D_, gamma}; }

private:
    Matrix A_;
    Matrix B_;
    Matrix C_;
    double D_;
    double gamma_;
};

// |E| sin(n omega t + phase)
struct SinusoidSpec {
    double amplitude = 1.0;
    int multiple = 1;
    double omega = 1.0;
    double phase = 0.0;

    void validate() const;
    Complex phasor() const;
};

// Intermediate vectors of the pulse-based chain at one base frequency.
struct CnIntermediates {
    CVector delta_l;   // (j omega I - A)^{-1} B at the input harmonic
    Vector delta_c;    // trigger-aligned sample of the base-linear state
    Vector delta_v;    // state offset right after a reset
    Vector delta_q;    // state jump at a reset
};

// Matrices of the classical HOSIDF.
struct HnIntermediates {
    Matrix lambda;
    Matrix delta;
    Matrix delta_r;
    Matrix gamma_r;
    Matrix theta_d;
};

// Norm bound on the inverse of the reset fixed-point matrix before we refuse.
inline constexpr double kFixedPointInverseBound = 1e12;

// Classical sinusoidal-input describing functions of the reset controller.
HnIntermediates hn_intermediates(const ResetController& rc, double omega);
Complex classical_hosidf(const ResetController& rc, double omega, int n);

// Base-linear response C (j omega I - A)^{-1} B + D.
Complex base_linear_response(const ResetController& rc, double omega);

// Row C (j omega I - A)^{-1} j omega: maps a reset-jump square wave to the output.
CRowVector pulse_output_map(const ResetController& rc, double omega);

// Pulse chain for an input harmonic (n, E_n) reset by a trigger of base
// frequency omega and phase trigger_phase.
CnIntermediates pulse_intermediates(const ResetController& rc, double omega, int n,
                                    double input_phase, double trigger_phase);
// Input and trigger coincide (n = 1, equal phase).
CnIntermediates cn_intermediates(const ResetController& rc, double omega);

// Nonlinear part of the n-th harmonic per unit input, relative to E_1n.
Complex nonlinear_hosidf(const ResetController& rc, double omega, int n);
// Same, reusing a pulse chain already evaluated at omega by cn_intermediates.
Complex nonlinear_hosidf(const ResetController& rc, const CnIntermediates& chain, double omega,
                         int n);
// Full n-th harmonic describing function; exactly zero for even n.
Complex hosidf(const ResetController& rc, double omega, int n);

// Levels of the square wave that separates a generalized Clegg integrator
// from its base-linear integrator, for the first and second half-period.
std::pair<double, double> gci_square_levels(double gamma, double omega, double amplitude);

// Harmonics of the nonlinear output produced by `input` (at n omega) when
// resets are triggered by `trigger` (at omega). Odd harmonics up to n_max.
HarmonicSpectrum pulse_nonlinear_spectrum(const ResetController& rc, const SinusoidSpec& input,
                                          const SinusoidSpec& trigger, int n_max);

// Open-loop chain rc -> c_alpha -> plant.
struct LoopParts {
    Complex linear;     // L_bl
    Complex nonlinear;  // L_nl
};
LoopParts open_loop_parts(const ResetController& rc, const LinearSystem& c_alpha,
                          const LinearSystem& plant, double omega, int n);
Complex open_loop_ln(const ResetController& rc, const LinearSystem& c_alpha,
                     const LinearSystem& plant, double omega, int n);

// Steady-state output spectrum of the open-loop chain driven (and reset)
// by input = |E_1| sin(omega t + phase).
HarmonicSpectrum open_loop_output_spectrum(const ResetController& rc, const LinearSystem& c_alpha,
                                           const LinearSystem& plant, const SinusoidSpec& input,
                                           int n_max);

}  // namespace resetfr
