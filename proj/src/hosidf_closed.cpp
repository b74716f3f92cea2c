#include "resetfr/hosidf_closed.hpp"

#include <cmath>
#include <string>

#include "resetfr/errors.hpp"

namespace resetfr {

namespace {

void check_args(double omega, int n_max) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw InvalidArgument("frequency must be finite and positive");
    if (n_max < 1) throw InvalidArgument("harmonic truncation must be at least 1");
}

Complex checked_return(Complex l, const char* what, double w) {
    const Complex d = 1.0 + l;
    if (d == 0.0)
        throw SingularityError(std::string(what) + " is marginal at " + std::to_string(w) +
                               " rad/s (1 + L = 0)");
    return d;
}

}  // namespace

void ShapingFilter::validate() const {
    if (!(center > 0.0) || !(q1 > 0.0) || !(q2 > 0.0) || !(gain > 0.0) || !std::isfinite(center) ||
        !std::isfinite(q2) || !std::isfinite(gain))
        throw InvalidArgument("shaping filter parameters must be finite and positive");
    if (!(q1 < q2)) throw InvalidArgument("shaping filter needs Q1 < Q2");
}

TransferFunction ShapingFilter::transfer_function() const {
    validate();
    const double w2 = center * center;
    return TransferFunction({gain / w2, gain / (center * q1), gain},
                            {1.0 / w2, 1.0 / (center * q2), 1.0});
}

ClosedLoopSystem::ClosedLoopSystem(ResetController rc, LinearSystem c_alpha, LinearSystem plant,
                                   std::optional<ShapingFilter> shaping)
    : rc_(std::move(rc)),
      c_alpha_(std::move(c_alpha)),
      plant_(std::move(plant)),
      shaping_(std::move(shaping)) {
    if (!c_alpha_.is_proper()) throw InvalidArgument("C_alpha must be proper");
    if (!plant_.is_strictly_proper())
        throw InvalidArgument("plant must be strictly proper (no algebraic loop)");
    if (shaping_) shaping_->validate();

    c_alpha_ss_ = tf_to_ss(c_alpha_);
    plant_ss_ = tf_to_ss(plant_);
    p_alpha_ss_ = series_ss(c_alpha_ss_, plant_ss_);

    const int nc = rc_.states();
    const int na = p_alpha_ss_.states();
    const Matrix& Aa = p_alpha_ss_.A;
    const Matrix& Ba = p_alpha_ss_.B;
    const Matrix& Ca = p_alpha_ss_.C;
    const double dr = rc_.D();

    a_cl_ = Matrix::Zero(nc + na, nc + na);
    a_cl_.topLeftCorner(nc, nc) = rc_.A();
    a_cl_.topRightCorner(nc, na) = -rc_.B() * Ca;
    a_cl_.bottomLeftCorner(na, nc) = Ba * rc_.C();
    a_cl_.bottomRightCorner(na, na) = Aa - dr * Ba * Ca;

    b_cl_ = Matrix::Zero(nc + na, 1);
    b_cl_.topRows(nc) = rc_.B();
    b_cl_.bottomRows(na) = dr * Ba;

    c_cl_ = Matrix::Zero(1, nc + na);
    c_cl_.rightCols(na) = Ca;

    a_rho_cl_ = Matrix::Identity(nc + na, nc + na);
    a_rho_cl_.topLeftCorner(nc, nc) = rc_.reset_matrix();
}

ClosedLoopSystem ClosedLoopSystem::with_gamma(double g) const {
    return {rc_.with_gamma(g), c_alpha_, plant_, shaping_};
}

ClosedLoopSystem ClosedLoopSystem::with_shaping(std::optional<ShapingFilter> sf) const {
    return {rc_, c_alpha_, plant_, std::move(sf)};
}

GammaResult gamma(const ClosedLoopSystem& sys, double omega, int n_max) {
    check_args(omega, n_max);
    const auto& rc = sys.rc();
    GammaResult g;
    g.omega = omega;
    g.n_max = n_max;

    const CVector dl1 = column_resolvent(rc.A(), rc.B(), Complex(0.0, omega));
    g.delta_c1 = dl1(0).imag();
    if (g.delta_c1 == 0.0)
        throw SingularityError("Gamma singularity: first-harmonic reset-state sample is zero");

    const auto chain = cn_intermediates(rc, omega);
    double sum = 0.0;
    for (int n = 3; n <= n_max; n += 2) {
        const double wn = n * omega;
        const Complex plant = sys.c_alpha().at(wn) * sys.plant().at(wn);
        const Complex l_bl = base_linear_response(rc, wn) * plant;
        const Complex l_nl = nonlinear_hosidf(rc, chain, omega, n) * plant;
        const Complex ret = checked_return(l_bl, "base-linear loop", wn);
        const double psi = std::abs(l_nl) / std::abs(ret);
        double dc = 0.0;
        if (l_nl != 0.0) {
            const CVector dln = column_resolvent(rc.A(), rc.B(), Complex(0.0, wn));
            const double rot = principal_angle(l_nl) - principal_angle(ret);
            dc = -(dln(0) * std::polar(1.0, rot)).imag();
        }
        g.psi[n] = psi;
        g.delta_c[n] = dc;
        sum += psi * dc / g.delta_c1;
    }
    g.denominator = 1.0 - sum;
    if (std::abs(g.denominator) < kGammaSingularTol || !std::isfinite(g.denominator))
        throw SingularityError("Gamma singularity at " + std::to_string(omega) +
                               " rad/s: denominator " + std::to_string(g.denominator));
    g.gamma = 1.0 / g.denominator;
    return g;
}

LoopResponse loop_response(const ClosedLoopSystem& sys, double omega, int n, double gamma_value) {
    const auto parts = open_loop_parts(sys.rc(), sys.c_alpha(), sys.plant(), omega, n);
    return {omega, n, parts.linear, parts.nonlinear, parts.linear + gamma_value * parts.nonlinear};
}

void SensitivitySet::set(int n, Complex s, Complex t, Complex cs) {
    if (n < 1) throw InvalidArgument("harmonic index must be positive");
    s_[n] = s;
    t_[n] = t;
    cs_[n] = cs;
}

Complex SensitivitySet::lookup(const std::map<int, Complex>& m, int n) {
    auto it = m.find(n);
    return it == m.end() ? Complex(0.0) : it->second;
}

SensitivitySet closed_loop_sensitivities(const ClosedLoopSystem& sys, double omega, int n_max) {
    check_args(omega, n_max);
    SensitivitySet out(omega, n_max);
    out.gamma = gamma(sys, omega, n_max);
    const double G = out.gamma.gamma;
    const auto& rc = sys.rc();
    const auto chain = cn_intermediates(rc, omega);

    // Control effort is formed from the controller side so a plant zero on
    // a harmonic does not need a division by P.
    const Complex c1 = (base_linear_response(rc, omega) + G * nonlinear_hosidf(rc, chain, omega, 1)) *
                       sys.c_alpha().at(omega);
    const Complex l_o = c1 * sys.plant().at(omega);
    const Complex s1 = 1.0 / checked_return(l_o, "closed loop", omega);
    const Complex t1 = l_o / (1.0 + l_o);
    out.set(1, s1, t1, c1 * s1);

    const double s1_mag = std::abs(s1);
    const double s1_arg = principal_angle(s1);
    for (int n = 3; n <= n_max; n += 2) {
        const double wn = n * omega;
        const Complex ca = sys.c_alpha().at(wn);
        const Complex p = sys.plant().at(wn);
        const Complex l_bl = base_linear_response(rc, wn) * ca * p;
        const Complex csn = G * nonlinear_hosidf(rc, chain, omega, n) * ca * s1_mag *
                            std::polar(1.0, n * s1_arg) / checked_return(l_bl, "base-linear loop", wn);
        const Complex sn = -csn * p;
        out.set(n, sn, -sn, csn);
    }
    return out;
}

SensitivityTriple method_a(const ClosedLoopSystem& sys, double omega) {
    check_args(omega, 1);
    const Complex c = classical_hosidf(sys.rc(), omega, 1) * sys.c_alpha().at(omega);
    const Complex l = c * sys.plant().at(omega);
    const Complex s = 1.0 / checked_return(l, "describing-function loop", omega);
    const Complex t = l / (1.0 + l);
    return {s, t, c * s};
}

SensitivityTriple method_b(const ClosedLoopSystem& sys, double omega, int n) {
    check_args(omega, n);
    if (n == 1) return method_a(sys, omega);
    if (n % 2 == 0) return {0.0, 0.0, 0.0};
    const auto first = method_a(sys, omega);
    const double wn = n * omega;
    const Complex ca = sys.c_alpha().at(wn);
    const Complex p = sys.plant().at(wn);
    const Complex s_bl =
        1.0 / checked_return(base_linear_response(sys.rc(), wn) * ca * p, "base-linear loop", wn);
    const Complex csn = classical_hosidf(sys.rc(), omega, n) * ca * s_bl * std::abs(first.s) *
                        std::polar(1.0, n * principal_angle(first.s));
    const Complex sn = -csn * p;
    return {sn, -sn, csn};
}

SensitivitySet method_b_set(const ClosedLoopSystem& sys, double omega, int n_max) {
    check_args(omega, n_max);
    SensitivitySet out(omega, n_max);
    for (int n = 1; n <= n_max; n += 2) {
        const auto v = method_b(sys, omega, n);
        out.set(n, v.s, v.t, v.cs);
    }
    return out;
}

PredictedSignals predict_signals(const SensitivitySet& sens, double amplitude,
                                 std::span<const double> t_grid) {
    if (!std::isfinite(amplitude)) throw InvalidArgument("input amplitude must be finite");
    PredictedSignals p{HarmonicSpectrum(sens.omega()), HarmonicSpectrum(sens.omega()),
                       HarmonicSpectrum(sens.omega()), {}, {}, {}};
    for (int n = 1; n <= sens.n_max(); n += 2) {
        p.e.set(n, amplitude * sens.s(n));
        p.y.set(n, amplitude * sens.t(n));
        p.u.set(n, amplitude * sens.cs(n));
    }
    p.e_t = reconstruct(p.e, t_grid);
    p.y_t = reconstruct(p.y, t_grid);
    p.u_t = reconstruct(p.u, t_grid);
    return p;
}

PredictedSignals predict_signals(const ClosedLoopSystem& sys, double amplitude, double omega,
                                 int n_max, std::span<const double> t_grid) {
    return predict_signals(closed_loop_sensitivities(sys, omega, n_max), amplitude, t_grid);
}

}  // namespace resetfr
