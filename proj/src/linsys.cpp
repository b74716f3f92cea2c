#include "resetfr/linsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "resetfr/errors.hpp"

namespace resetfr {

namespace {

constexpr double kResolventRcond = 1e-14;

std::vector<double> strip_leading_zeros(std::vector<double> p) {
    auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
    if (first == p.end()) return {0.0};
    p.erase(p.begin(), first);
    return p;
}

Complex horner(const std::vector<double>& p, Complex s) {
    Complex acc = 0.0;
    for (double c : p) acc = acc * s + c;
    return acc;
}

bool all_finite(const std::vector<double>& p) {
    return std::all_of(p.begin(), p.end(), [](double c) { return std::isfinite(c); });
}

}  // namespace

double principal_angle(Complex z) {
    double a = std::atan2(z.imag(), z.real());
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double mag_db(Complex z) {
    double m = std::abs(z);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(m);
}

TransferFunction::TransferFunction(std::vector<double> num, std::vector<double> den)
    : num_(strip_leading_zeros(std::move(num))), den_(std::move(den)) {
    if (den_.empty() || den_.front() == 0.0)
        throw InvalidArgument("transfer function denominator leading coefficient must be nonzero");
    if (!all_finite(num_) || !all_finite(den_))
        throw InvalidArgument("transfer function coefficients must be finite");
}

Complex TransferFunction::eval(Complex s) const {
    Complex d = horner(den_, s);
    if (d == 0.0)
        throw SingularityError("transfer function evaluated at a pole (s = " +
                               std::to_string(s.real()) + " + j" + std::to_string(s.imag()) + ")");
    return horner(num_, s) / d;
}

StateSpace::StateSpace(Matrix a, Matrix b, Matrix c, double d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(d) {
    const auto n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != 1 || C.cols() != n || C.rows() != 1)
        throw InvalidArgument("state-space dimensions are inconsistent");
    if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !std::isfinite(D))
        throw InvalidArgument("state-space entries must be finite");
}

Complex StateSpace::at(double omega) const {
    if (states() == 0) return D;
    return (row_resolvent(A, C, Complex(0.0, omega)) * B.cast<Complex>())(0, 0) + D;
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas) : omegas_(std::move(omegas)) {
    for (std::size_t i = 0; i < omegas_.size(); ++i) {
        if (!(omegas_[i] > 0.0) || !std::isfinite(omegas_[i]))
            throw InvalidArgument("frequency grid values must be finite and positive");
        if (i > 0 && !(omegas_[i] > omegas_[i - 1]))
            throw InvalidArgument("frequency grid must be strictly increasing");
    }
}

FrequencyGrid FrequencyGrid::logspace(double omega_lo, double omega_hi, int points) {
    if (points < 2 || !(omega_lo > 0.0) || !(omega_hi > omega_lo))
        throw InvalidArgument("logspace needs 0 < lo < hi and at least two points");
    std::vector<double> w(static_cast<std::size_t>(points));
    const double a = std::log10(omega_lo);
    const double b = std::log10(omega_hi);
    for (int i = 0; i < points; ++i)
        w[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1));
    return FrequencyGrid(std::move(w));
}

Complex freq_eval(const TransferFunction& sys, double omega) {
    if (!std::isfinite(omega)) throw InvalidArgument("frequency must be finite");
    return sys.at(omega);
}

Complex freq_eval(const StateSpace& sys, double omega) {
    if (!std::isfinite(omega)) throw InvalidArgument("frequency must be finite");
    return sys.at(omega);
}

CRowVector row_resolvent(const Matrix& A, const Matrix& C, Complex s) {
    const auto n = A.rows();
    CMatrix M = s * CMatrix::Identity(n, n) - A.cast<Complex>();
    Eigen::PartialPivLU<CMatrix> lu(M.transpose());
    if (lu.rcond() < kResolventRcond)
        throw SingularityError("resolvent (sI - A) is singular at s = j" + std::to_string(s.imag()));
    CVector x = lu.solve(C.transpose().cast<Complex>());
    return x.transpose();
}

CVector column_resolvent(const Matrix& A, const Matrix& B, Complex s) {
    const auto n = A.rows();
    CMatrix M = s * CMatrix::Identity(n, n) - A.cast<Complex>();
    Eigen::PartialPivLU<CMatrix> lu(M);
    if (lu.rcond() < kResolventRcond)
        throw SingularityError("resolvent (sI - A) is singular at s = j" + std::to_string(s.imag()));
    return lu.solve(B.cast<Complex>());
}

Matrix expm(const Matrix& A, double t) {
    if (A.rows() != A.cols()) throw InvalidArgument("expm needs a square matrix");
    if (!A.allFinite() || !std::isfinite(t)) throw InvalidArgument("expm needs finite input");
    if (A.rows() == 0) return A;
    Matrix At = A * t;
    Matrix E = At.exp();
    if (!E.allFinite())
        throw RangeError("matrix exponential overflow (||A t||_1 = " +
                         std::to_string(At.cwiseAbs().colwise().sum().maxCoeff()) + ")");
    return E;
}

std::vector<Complex> poly_roots(std::span<const double> coeffs) {
    std::vector<double> p(coeffs.begin(), coeffs.end());
    p = strip_leading_zeros(std::move(p));
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0) return {};
    Matrix companion = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) companion(0, j) = -p[static_cast<std::size_t>(j + 1)] / p[0];
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Matrix> es(companion, false);
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    return roots;
}

std::vector<double> poly_from_roots(std::span<const Complex> roots, double leading) {
    std::vector<Complex> c{Complex(1.0)};
    for (Complex r : roots) {
        std::vector<Complex> next(c.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= c[i] * r;
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = leading * c[i].real();
    return out;
}

std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
    auto num = poly_multiply(a.num(), b.num());
    auto den = poly_multiply(a.den(), b.den());
    if (num.size() == 1 && num[0] == 0.0) return TransferFunction({0.0}, {1.0});

    auto zeros = poly_roots(num);
    auto poles = poly_roots(den);
    std::vector<bool> zero_used(zeros.size(), false);
    std::vector<bool> pole_used(poles.size(), false);
    bool cancelled = false;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (std::size_t k = 0; k < zeros.size(); ++k) {
            if (zero_used[k]) continue;
            const double scale = std::max(1.0, std::abs(poles[i]));
            if (std::abs(poles[i] - zeros[k]) <= kCancellationTol * scale) {
                zero_used[k] = pole_used[i] = cancelled = true;
                break;
            }
        }
    }
    if (!cancelled) return TransferFunction(std::move(num), std::move(den));

    std::vector<Complex> kept_zeros;
    std::vector<Complex> kept_poles;
    for (std::size_t k = 0; k < zeros.size(); ++k)
        if (!zero_used[k]) kept_zeros.push_back(zeros[k]);
    for (std::size_t i = 0; i < poles.size(); ++i)
        if (!pole_used[i]) kept_poles.push_back(poles[i]);
    return TransferFunction(poly_from_roots(kept_zeros, num.front()),
                            poly_from_roots(kept_poles, den.front()));
}

StateSpace tf_to_ss(const TransferFunction& tf) {
    if (!tf.is_proper()) throw InvalidArgument("tf_to_ss needs a proper transfer function");
    const auto& den = tf.den();
    const int n = tf.den_degree();
    const double lead = den.front();
    std::vector<double> b(static_cast<std::size_t>(n + 1), 0.0);
    const auto& num = tf.num();
    std::copy(num.begin(), num.end(), b.begin() + (n + 1 - static_cast<int>(num.size())));
    for (double& c : b) c /= lead;

    const double d = b[0];
    // State i is scaled by rho^-i, rho the geometric mean of the pole
    // magnitudes, so wide-spread corner frequencies do not wreck conditioning.
    const double an = n > 0 ? std::abs(den.back() / lead) : 0.0;
    const double rho = an > 0.0 ? std::pow(an, 1.0 / n) : 1.0;
    Matrix A = Matrix::Zero(n, n);
    Matrix B = Matrix::Zero(n, 1);
    Matrix C = Matrix::Zero(1, n);
    double scale = 1.0;
    for (int j = 0; j < n; ++j) {
        const double aj = den[static_cast<std::size_t>(j + 1)] / lead;
        A(0, j) = -aj * scale;
        C(0, j) = (b[static_cast<std::size_t>(j + 1)] - d * aj) * scale;
        scale /= rho;
    }
    for (int i = 1; i < n; ++i) A(i, i - 1) = rho;
    if (n > 0) B(0, 0) = 1.0;
    return StateSpace(std::move(A), std::move(B), std::move(C), d);
}

StateSpace series_ss(const StateSpace& first, const StateSpace& second) {
    const int n1 = first.states();
    const int n2 = second.states();
    Matrix A = Matrix::Zero(n1 + n2, n1 + n2);
    Matrix B = Matrix::Zero(n1 + n2, 1);
    Matrix C = Matrix::Zero(1, n1 + n2);
    A.topLeftCorner(n1, n1) = first.A;
    A.bottomRightCorner(n2, n2) = second.A;
    A.bottomLeftCorner(n2, n1) = second.B * first.C;
    B.topRows(n1) = first.B;
    B.bottomRows(n2) = second.B * first.D;
    C.leftCols(n1) = second.D * first.C;
    C.rightCols(n2) = second.C;
    return StateSpace(std::move(A), std::move(B), std::move(C), second.D * first.D);
}

double spectral_radius(const Matrix& A) {
    if (A.rows() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_hurwitz(const Matrix& A) {
    if (A.rows() == 0) return true;
    Eigen::EigenSolver<Matrix> es(A, false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace resetfr
