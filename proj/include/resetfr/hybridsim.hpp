#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resetfr/hosidf_closed.hpp"
#include "resetfr/hosidf_open.hpp"
#include "resetfr/linsys.hpp"
#include "resetfr/spectrum.hpp"

namespace resetfr {

enum class InitialState {
    zero,
    // Sinusoidal steady state of the base-linear system; removes the slow
    // transients that the resets never touch.
    linear_steady_state,
};

struct SimConfig {
    int samples_per_period = 4096;  // recording grid, dt = period / samples_per_period
    int periods = 60;
    int transient_periods = 40;  // the rest is kept as the steady-state window
    double event_tol = 1e-12;    // bisection tolerance, fraction of a period
    // Internal RK4 substeps keep substep * spectral_radius(A) below this.
    double stiffness_limit = 0.05;
    // Keep integrating past `periods` until the periodicity residual drops
    // below residual_tol, up to max_periods.
    bool extend_until_periodic = true;
    double residual_tol = 1e-6;
    int max_periods = 2000;
    InitialState init = InitialState::linear_steady_state;

    void validate() const;
    int record_periods() const { return periods - transient_periods; }
};

// Columns carried by every trajectory.
enum class Signal { r, e, e_s, v, u, y };
inline constexpr std::size_t kSignalCount = 6;
const char* signal_name(Signal s);

struct EventRecord {
    double t = 0.0;
    Vector x_pre;
    Vector x_post;
    bool is_reset = false;  // false when the jump is the identity (gamma = 1)
};

enum class SampleKind : std::uint8_t { grid, event_pre, event_post };

struct Trajectory {
    double omega = 0.0;
    int samples_per_period = 0;
    double gamma = 1.0;
    int periods_run = 0;
    int record_periods = 0;
    double t_start = 0.0;  // start of the kept window, a whole number of periods
    double residual = 0.0;  // worst periodicity residual across the kept window

    std::vector<double> t;
    std::vector<Vector> x;
    std::array<std::vector<double>, kSignalCount> signals;
    std::vector<SampleKind> kind;
    std::vector<EventRecord> events;  // events inside the kept window

    double period() const { return 2.0 * kPi / omega; }
    const std::vector<double>& signal(Signal s) const {
        return signals[static_cast<std::size_t>(s)];
    }
};

struct SteadyStateRecord {
    double t0 = 0.0;
    double t1 = 0.0;
    int periods = 0;
    double residual = 0.0;
    int resets_per_period = 0;
    std::vector<int> resets_in_period;
    std::size_t first = 0;  // sample range [first, last] inside the trajectory
    std::size_t last = 0;
};

// Open-loop chain input -> rc -> c_alpha -> plant, reset by `trigger`
// (the input itself when absent).
struct OpenLoopSetup {
    ResetController rc;
    LinearSystem c_alpha = TransferFunction::gain(1.0);
    LinearSystem plant = TransferFunction::gain(1.0);
};

// Closed loop driven by r = input. Signals: e = r - y, e_s = trigger.
Trajectory simulate(const ClosedLoopSystem& sys, const SinusoidSpec& input, const SimConfig& cfg);
// Open loop driven by e = input; v is the reset-controller output.
Trajectory simulate_open(const OpenLoopSetup& chain, const SinusoidSpec& input,
                         const std::optional<SinusoidSpec>& trigger, const SimConfig& cfg);

// Last `periods` whole periods of the trajectory. Throws ConvergenceError
// when the periodicity residual exceeds `residual_tol`.
SteadyStateRecord steady_state(const Trajectory& traj, double omega, int periods,
                               double residual_tol = 1e-6);

// Periodicity residual between consecutive periods of the kept window.
double periodicity_residual(const Trajectory& traj, int periods);

// Fourier sine-basis coefficients by trapezoidal quadrature over samples
// spanning a whole number of periods. Repeated time stamps (jumps) are allowed.
HarmonicSpectrum harmonics(std::span<const double> t, std::span<const double> f, double omega,
                           int n_max);
HarmonicSpectrum harmonics(const Trajectory& traj, const SteadyStateRecord& window, Signal s,
                           int n_max);

// Event times of the kept window together with their images one period
// earlier and later, so jumps sitting on a window edge are not missed.
std::vector<double> periodic_event_times(const Trajectory& traj);

// max |e_sim - e_pre|. e_pre is linearly interpolated onto t_sim when the
// grids differ. Samples within `exclude_halfwidth` of an exclusion centre
// are skipped.
double prediction_error(std::span<const double> t_sim, std::span<const double> e_sim,
                        std::span<const double> t_pre, std::span<const double> e_pre,
                        std::span<const double> exclude_centres = {},
                        double exclude_halfwidth = 0.0);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const SteadyStateRecord* window = nullptr);

}  // namespace resetfr
