#include "resetfr/verify.hpp"

#include <cmath>
#include <limits>

#include "resetfr/errors.hpp"

namespace resetfr {

OpenLoopCondition open_loop_condition(const ResetController& rc, std::span<const double> deltas) {
    if (deltas.empty()) throw InvalidArgument("open-loop condition needs at least one delta");
    OpenLoopCondition out;
    const Matrix R = rc.reset_matrix();
    for (double d : deltas) {
        if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("delta grid must be positive");
        const double rho = spectral_radius(R * expm(rc.A(), d));
        if (rho >= out.worst_radius) {
            out.worst_radius = rho;
            out.worst_delta = d;
        }
    }
    out.pass = out.worst_radius < 1.0;
    return out;
}

HBetaCheck hbeta_check(const ClosedLoopSystem& sys, const Vector& beta, const Matrix& p_nr,
                       const FrequencyGrid& grid) {
    // One reset state per controller here, so n_r = 1.
    constexpr int nr = 1;
    if (beta.size() != nr || p_nr.rows() != nr || p_nr.cols() != nr)
        throw InvalidArgument("beta and P_nr must be 1x1 for a single reset state");
    if (!(p_nr(0, 0) > 0.0)) throw InvalidArgument("P_nr must be positive definite");
    if (grid.size() == 0) throw InvalidArgument("frequency grid is empty");
    if (!is_hurwitz(sys.a_cl()))
        throw AssumptionViolation("closed-loop base-linear matrix A_cl is not Hurwitz");

    const int n = static_cast<int>(sys.a_cl().rows());
    const int nc = sys.rc().states();
    Matrix left = Matrix::Zero(nr, n);
    left.leftCols(nr) = p_nr;
    left.rightCols(n - nc) = beta * sys.p_alpha_ss().C;
    Matrix right = Matrix::Zero(n, nr);
    right.topRows(nr) = Matrix::Identity(nr, nr);

    HBetaCheck out;
    out.beta = beta;
    out.p_nr = p_nr;
    out.omegas = grid.values();
    out.min_real = std::numeric_limits<double>::infinity();
    for (double w : grid) {
        const Complex h =
            (row_resolvent(sys.a_cl(), left, Complex(0.0, w)) * right.cast<Complex>())(0, 0);
        if (h.real() < out.min_real) {
            out.min_real = h.real();
            out.min_real_omega = w;
        }
    }
    out.positive_real = out.min_real > 0.0;

    const Matrix rr = sys.rc().reset_matrix().topLeftCorner(nr, nr);
    const Matrix ineq = rr.transpose() * p_nr * rr - p_nr;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (ineq + ineq.transpose()));
    out.inequality_residual = es.eigenvalues().maxCoeff();
    out.inequality_ok = out.inequality_residual <= 0.0;
    return out;
}

const char* regime_name(ResetRegime r) {
    switch (r) {
        case ResetRegime::no_reset: return "no-reset";
        case ResetRegime::two_reset: return "two-reset";
        case ResetRegime::multiple_reset: return "multiple-reset";
    }
    return "?";
}

TwoResetCheck classify_resets(const SteadyStateRecord& rec, int periods_run) {
    TwoResetCheck out;
    out.resets_per_period = rec.resets_per_period;
    out.residual = rec.residual;
    out.periods_run = periods_run;
    if (rec.resets_per_period == 0)
        out.regime = ResetRegime::no_reset;
    else if (rec.resets_per_period == 2)
        out.regime = ResetRegime::two_reset;
    else
        out.regime = ResetRegime::multiple_reset;
    return out;
}

TwoResetCheck two_reset_check(const ClosedLoopSystem& sys, double amplitude, double omega,
                              const SimConfig& cfg) {
    const auto traj = simulate(sys, {amplitude, 1, omega, 0.0}, cfg);
    const auto rec = steady_state(traj, omega, traj.record_periods, cfg.residual_tol);
    return classify_resets(rec, traj.periods_run);
}

nlohmann::json to_json(const OpenLoopCondition& c) {
    return {{"pass", c.pass}, {"worst_spectral_radius", c.worst_radius}, {"worst_delta_s", c.worst_delta}};
}

nlohmann::json to_json(const HBetaCheck& c) {
    return {{"pass", c.pass()},
            {"beta", c.beta(0)},
            {"P_nr", c.p_nr(0, 0)},
            {"grid_points", c.omegas.size()},
            {"min_real_part", c.min_real},
            {"min_real_part_omega", c.min_real_omega},
            {"positive_real", c.positive_real},
            {"reset_inequality_residual", c.inequality_residual},
            {"reset_inequality_ok", c.inequality_ok}};
}

nlohmann::json to_json(const TwoResetCheck& c) {
    return {{"regime", regime_name(c.regime)},
            {"two_reset", c.two_reset()},
            {"resets_per_period", c.resets_per_period},
            {"periodicity_residual", c.residual},
            {"periods_simulated", c.periods_run}};
}

}  // namespace resetfr
