#include "resetfr/hosidf_open.hpp"

#include <cmath>
#include <string>

#include "resetfr/errors.hpp"

namespace resetfr {

namespace {

Matrix checked_inverse(const Matrix& M, const char* name) {
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible()) throw SingularityError(std::string(name) + " is singular");
    Matrix inv = lu.inverse();
    if (!inv.allFinite() || inv.lpNorm<Eigen::Infinity>() > kFixedPointInverseBound)
        throw SingularityError(std::string(name) + " is numerically singular");
    return inv;
}

// Inverse of I + A_rho e^{A pi/omega}. In the half-wave antisymmetric steady
// state the post-reset offset z obeys -z = A_rho e^{A pi/omega} z - (A_rho - I) b.
Matrix fixed_point_inverse(const Matrix& reset, const Matrix& half_period_flow) {
    const auto n = reset.rows();
    Matrix F = Matrix::Identity(n, n) + reset * half_period_flow;
    Eigen::FullPivLU<Matrix> lu(F);
    if (!lu.isInvertible())
        throw SingularityError("reset fixed-point singularity: I + A_rho e^{A pi/omega} is singular");
    Matrix inv = lu.inverse();
    if (!inv.allFinite() || inv.lpNorm<Eigen::Infinity>() > kFixedPointInverseBound)
        throw SingularityError("reset fixed-point singularity: ||(I + A_rho e^{A pi/omega})^-1|| > 1e12");
    return inv;
}

void check_omega(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw InvalidArgument("frequency must be finite and positive");
}

void check_order(int n) {
    if (n < 1) throw InvalidArgument("harmonic order must be a positive integer");
}

}  // namespace

ResetController::ResetController(Matrix A, Matrix B, Matrix C, double D, double gamma)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(D), gamma_(gamma) {
    const auto n = A_.rows();
    if (n < 1 || A_.cols() != n || B_.rows() != n || B_.cols() != 1 || C_.rows() != 1 ||
        C_.cols() != n)
        throw InvalidArgument("reset controller dimensions are inconsistent");
    if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !std::isfinite(D_))
        throw InvalidArgument("reset controller entries must be finite");
    if (!(gamma_ > -1.0 && gamma_ <= 1.0))
        throw InvalidArgument("reset ratio gamma must lie in (-1, 1]");
}

ResetController ResetController::clegg(double gamma) {
    return {Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), 0.0, gamma};
}

ResetController ResetController::fore(double omega_r, double gamma) {
    if (!(omega_r > 0.0)) throw InvalidArgument("FORE corner frequency must be positive");
    return {Matrix::Constant(1, 1, -omega_r), Matrix::Constant(1, 1, omega_r), Matrix::Ones(1, 1),
            0.0, gamma};
}

Matrix ResetController::reset_matrix() const {
    Matrix R = Matrix::Identity(states(), states());
    R(0, 0) = gamma_;
    return R;
}

void SinusoidSpec::validate() const {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw InvalidArgument("sinusoid amplitude must be positive");
    if (multiple < 1 || multiple % 2 == 0)
        throw InvalidArgument("sinusoid frequency multiple must be an odd positive integer");
    check_omega(omega);
    if (!(phase > -kPi && phase <= kPi)) throw InvalidArgument("sinusoid phase must lie in (-pi, pi]");
}

Complex SinusoidSpec::phasor() const { return std::polar(amplitude, phase); }

HnIntermediates hn_intermediates(const ResetController& rc, double omega) {
    check_omega(omega);
    const auto n = rc.states();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix E = expm(rc.A(), kPi / omega);
    HnIntermediates h;
    h.lambda = omega * omega * I + rc.A() * rc.A();
    h.delta = I + E;
    h.delta_r = I + rc.reset_matrix() * E;
    const Matrix lambda_inv = checked_inverse(h.lambda, "Lambda(omega) = omega^2 I + A_R^2");
    const Matrix delta_r_inv = checked_inverse(h.delta_r, "Delta_r(omega) = I + A_rho e^{A_R pi/omega}");
    h.gamma_r = delta_r_inv * rc.reset_matrix() * h.delta * lambda_inv;
    h.theta_d = (-2.0 * omega * omega / kPi) * h.delta * (h.gamma_r - lambda_inv);
    return h;
}

Complex classical_hosidf(const ResetController& rc, double omega, int n) {
    check_order(n);
    if (n % 2 == 0) return 0.0;
    const auto h = hn_intermediates(rc, omega);
    const auto ns = rc.states();
    const CMatrix jtheta = Complex(0.0, 1.0) * h.theta_d.cast<Complex>();
    const CRowVector left = row_resolvent(rc.A(), rc.C(), Complex(0.0, n * omega));
    const CVector B = rc.B().cast<Complex>();
    if (n == 1) return (left * (CMatrix::Identity(ns, ns) + jtheta) * B)(0, 0) + rc.D();
    return (left * jtheta * B)(0, 0);
}

Complex base_linear_response(const ResetController& rc, double omega) {
    check_omega(omega);
    return rc.base_linear().at(omega);
}

CRowVector pulse_output_map(const ResetController& rc, double omega) {
    const Complex s(0.0, omega);
    return row_resolvent(rc.A(), rc.C(), s) * s;
}

CnIntermediates pulse_intermediates(const ResetController& rc, double omega, int n,
                                    double input_phase, double trigger_phase) {
    check_omega(omega);
    check_order(n);
    const auto ns = rc.states();
    const Matrix I = Matrix::Identity(ns, ns);
    const Matrix E = expm(rc.A(), kPi / omega);
    const Matrix R = rc.reset_matrix();

    CnIntermediates d;
    d.delta_l = column_resolvent(rc.A(), rc.B(), Complex(0.0, n * omega));
    const Complex rot = std::polar(1.0, input_phase - n * trigger_phase);
    d.delta_c = (d.delta_l * rot).imag();
    d.delta_v = -fixed_point_inverse(R, E) * (I - R) * d.delta_c;
    d.delta_q = (I + E) * d.delta_v;
    return d;
}

CnIntermediates cn_intermediates(const ResetController& rc, double omega) {
    return pulse_intermediates(rc, omega, 1, 0.0, 0.0);
}

Complex nonlinear_hosidf(const ResetController& rc, const CnIntermediates& chain, double omega,
                         int n) {
    check_order(n);
    if (n % 2 == 0) return 0.0;
    const CRowVector dx = pulse_output_map(rc, n * omega);
    return 2.0 * (dx * chain.delta_q.cast<Complex>())(0, 0) / (n * kPi);
}

Complex nonlinear_hosidf(const ResetController& rc, double omega, int n) {
    check_order(n);
    if (n % 2 == 0) return 0.0;
    return nonlinear_hosidf(rc, cn_intermediates(rc, omega), omega, n);
}

Complex hosidf(const ResetController& rc, double omega, int n) {
    check_order(n);
    if (n % 2 == 0) return 0.0;
    if (n == 1) return base_linear_response(rc, omega) + nonlinear_hosidf(rc, omega, 1);
    return nonlinear_hosidf(rc, omega, n);
}

std::pair<double, double> gci_square_levels(double gamma, double omega, double amplitude) {
    if (gamma == -1.0) throw InvalidArgument("gamma = -1 divides by zero in the square-wave levels");
    if (!(gamma > -1.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (-1, 1]");
    check_omega(omega);
    const double scale = 2.0 * std::abs(amplitude) / ((gamma + 1.0) * omega);
    return {-scale * gamma, -scale};
}

HarmonicSpectrum pulse_nonlinear_spectrum(const ResetController& rc, const SinusoidSpec& input,
                                          const SinusoidSpec& trigger, int n_max) {
    input.validate();
    trigger.validate();
    if (trigger.multiple != 1) throw InvalidArgument("trigger must run at the base frequency");
    if (trigger.omega != input.omega)
        throw InvalidArgument("input and trigger must share the base frequency");
    const double w = input.omega;
    const auto d = pulse_intermediates(rc, w, input.multiple, input.phase, trigger.phase);
    const CVector dq = d.delta_q.cast<Complex>();

    HarmonicSpectrum spec(w);
    for (int mu = 1; mu <= n_max; mu += 2) {
        const Complex vq = (pulse_output_map(rc, mu * w) * dq)(0, 0);
        spec.set(mu, input.amplitude * 2.0 * vq / (mu * kPi) * std::polar(1.0, mu * trigger.phase));
    }
    return spec;
}

LoopParts open_loop_parts(const ResetController& rc, const LinearSystem& c_alpha,
                          const LinearSystem& plant, double omega, int n) {
    check_order(n);
    if (n % 2 == 0) return {0.0, 0.0};
    const double w = n * omega;
    const Complex chain = c_alpha.at(w) * plant.at(w);
    return {base_linear_response(rc, w) * chain, nonlinear_hosidf(rc, omega, n) * chain};
}

Complex open_loop_ln(const ResetController& rc, const LinearSystem& c_alpha,
                     const LinearSystem& plant, double omega, int n) {
    const auto parts = open_loop_parts(rc, c_alpha, plant, omega, n);
    return n == 1 ? parts.linear + parts.nonlinear : parts.nonlinear;
}

HarmonicSpectrum open_loop_output_spectrum(const ResetController& rc, const LinearSystem& c_alpha,
                                           const LinearSystem& plant, const SinusoidSpec& input,
                                           int n_max) {
    input.validate();
    if (input.multiple != 1) throw InvalidArgument("open-loop input must run at the base frequency");
    const double w = input.omega;

    // The pulse chain is shared by every harmonic; evaluate it once.
    const auto chain = cn_intermediates(rc, w);
    HarmonicSpectrum spec(w);
    for (int n = 1; n <= n_max; n += 2) {
        const double wn = n * w;
        Complex cn = nonlinear_hosidf(rc, chain, w, n);
        if (n == 1) cn += base_linear_response(rc, w);
        const Complex ln = cn * c_alpha.at(wn) * plant.at(wn);
        spec.set(n, input.amplitude * std::polar(1.0, n * input.phase) * ln);
    }
    return spec;
}

}  // namespace resetfr
