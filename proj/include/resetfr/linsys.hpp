#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace resetfr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Principal argument in (-pi, pi].
double principal_angle(Complex z);

// Magnitude in dB; -inf for an exact zero.
double mag_db(Complex z);

// SISO rational transfer function, coefficients in descending powers of s.
class TransferFunction {
public:
    TransferFunction() : num_{0.0}, den_{1.0} {}
    TransferFunction(std::vector<double> num, std::vector<double> den);

    static TransferFunction gain(double k) { return TransferFunction({k}, {1.0}); }

    const std::vector<double>& num() const { return num_; }
    const std::vector<double>& den() const { return den_; }

    int num_degree() const { return static_cast<int>(num_.size()) - 1; }
    int den_degree() const { return static_cast<int>(den_.size()) - 1; }
    bool is_proper() const { return num_degree() <= den_degree(); }
    bool is_strictly_proper() const { return num_degree() < den_degree(); }

    // Evaluates at an arbitrary complex s. Throws SingularityError at a pole.
    Complex eval(Complex s) const;
    // Frequency response at s = j*omega.
    Complex at(double omega) const { return eval(Complex(0.0, omega)); }

private:
    std::vector<double> num_;
    std::vector<double> den_;
};

// Single-input single-output state-space realization.
struct StateSpace {
    Matrix A;
    Matrix B;  // n x 1
    Matrix C;  // 1 x n
    double D = 0.0;

    StateSpace() = default;
    StateSpace(Matrix a, Matrix b, Matrix c, double d);

    int states() const { return static_cast<int>(A.rows()); }
    Complex at(double omega) const;
};

using LinearSystem = TransferFunction;

struct ComplexResponse {
    double omega = 0.0;
    Complex value;

    double magnitude() const { return std::abs(value); }
    double angle() const { return principal_angle(value); }
};

// Strictly positive, strictly increasing list of angular frequencies.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> omegas);

    static FrequencyGrid logspace(double omega_lo, double omega_hi, int points);

    const std::vector<double>& values() const { return omegas_; }
    std::size_t size() const { return omegas_.size(); }
    double operator[](std::size_t i) const { return omegas_[i]; }
    auto begin() const { return omegas_.begin(); }
    auto end() const { return omegas_.end(); }

private:
    std::vector<double> omegas_;
};

Complex freq_eval(const TransferFunction& sys, double omega);
Complex freq_eval(const StateSpace& sys, double omega);

// C (jwI - A)^{-1}: the row resolvent used by every describing-function chain.
CRowVector row_resolvent(const Matrix& A, const Matrix& C, Complex s);
// (sI - A)^{-1} B
CVector column_resolvent(const Matrix& A, const Matrix& B, Complex s);

// e^{A t} by scaling and squaring with a degree-13 Pade approximant.
Matrix expm(const Matrix& A, double t);

// Product a*b. Pole/zero pairs closer than kCancellationTol (relative) cancel.
inline constexpr double kCancellationTol = 1e-9;
TransferFunction series(const TransferFunction& a, const TransferFunction& b);

// Controllable canonical realization of a proper transfer function, with
// a diagonal state scaling that balances the companion matrix.
StateSpace tf_to_ss(const TransferFunction& tf);

// Cascade: output of `first` drives `second`. State order [first; second].
StateSpace series_ss(const StateSpace& first, const StateSpace& second);

// Roots of a polynomial with descending coefficients.
std::vector<Complex> poly_roots(std::span<const double> coeffs);
std::vector<double> poly_from_roots(std::span<const Complex> roots, double leading);
std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b);

double spectral_radius(const Matrix& A);
bool is_hurwitz(const Matrix& A);

}  // namespace resetfr
