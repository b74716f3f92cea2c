#include <catch2/catch_amalgamated.hpp>

#include "resetfr/hosidf_open.hpp"
#include "resetfr/errors.hpp"

using namespace resetfr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Steady-state Clegg-integrator output for e = sin(wt), written out by hand:
// half-wave symmetry fixes the post-reset state at -2 gamma / (w (1 + gamma)).
double clegg_output(double gamma, double w, double t) {
    const double T = 2.0 * kPi / w;
    double tau = std::fmod(t, T);
    double sign = 1.0;
    if (tau >= T / 2.0) {
        tau -= T / 2.0;
        sign = -1.0;
    }
    const double x0 = -2.0 * gamma / (w * (1.0 + gamma));
    return sign * (x0 + (1.0 - std::cos(w * tau)) / w);
}

// Sine-basis Fourier coefficient by a dense midpoint rule.
Complex brute_coefficient(double gamma, double w, int n) {
    const int m = 200000;
    const double T = 2.0 * kPi / w;
    double a = 0.0, b = 0.0;
    for (int k = 0; k < m; ++k) {
        const double t = (k + 0.5) * T / m;
        const double v = clegg_output(gamma, w, t);
        a += v * std::sin(n * w * t);
        b += v * std::cos(n * w * t);
    }
    return {2.0 * a / m, 2.0 * b / m};
}

}  // namespace

TEST_CASE("Clegg HOSIDF matches a brute-force Fourier oracle", "[hosidf_open]") {
    for (double gamma : {0.0, 0.5, -0.4}) {
        const auto rc = ResetController::clegg(gamma);
        for (double w : {0.5, 2.0, 40.0}) {
            for (int n = 1; n <= 9; n += 2) {
                const Complex ref = brute_coefficient(gamma, w, n);
                CHECK(std::abs(hosidf(rc, w, n) - ref) <= 1e-7 * std::abs(ref) + 1e-12);
            }
        }
    }
}

TEST_CASE("even harmonics vanish", "[hosidf_open]") {
    const auto rc = ResetController::fore(10.0, 0.2);
    for (int n = 2; n <= 10; n += 2) {
        CHECK(hosidf(rc, 3.0, n) == Complex(0.0, 0.0));
        CHECK(classical_hosidf(rc, 3.0, n) == Complex(0.0, 0.0));
    }
}

TEST_CASE("no reset leaves only the base-linear fundamental", "[hosidf_open]") {
    const auto rc = ResetController::fore(10.0, 1.0);
    const double w = 7.0;
    CHECK(std::abs(hosidf(rc, w, 1) - rc.base_linear().at(w)) < 1e-14);
    for (int n = 3; n <= 9; n += 2) CHECK(std::abs(hosidf(rc, w, n)) < 1e-14);
}

TEST_CASE("Clegg first-harmonic phase lead", "[hosidf_open]") {
    const auto rc = ResetController::clegg(0.0);
    for (double w : {0.1, 1.0, 1000.0}) {
        const double lead = (principal_angle(hosidf(rc, w, 1)) + kPi / 2.0) * 180.0 / kPi;
        CHECK_THAT(lead, WithinAbs(51.85, 0.01));
        // 1.62 / w is the familiar Clegg magnitude
        CHECK_THAT(std::abs(hosidf(rc, w, 1)) * w, WithinRel(std::sqrt(1.0 + 16.0 / (kPi * kPi)), 1e-12));
    }
}

TEST_CASE("square-wave levels of the Clegg nonlinearity", "[hosidf_open]") {
    const auto [hi, lo] = gci_square_levels(0.0, kPi, 1.0);
    CHECK_THAT(hi, WithinAbs(0.0, 1e-15));
    CHECK_THAT(lo, WithinAbs(-2.0 / kPi, 1e-12));
    // q = v_ci - v_i against an integrator started from rest, read off the
    // hand-written waveform a quarter period into each half
    for (double gamma : {-0.5, 0.0, 0.3, 1.0}) {
        const double w = 3.0;
        const double T = 2.0 * kPi / w;
        auto q = [&](double t) { return clegg_output(gamma, w, t) - (1.0 - std::cos(w * t)) / w; };
        const auto [a, b] = gci_square_levels(gamma, w, 1.0);
        CHECK_THAT(a, WithinAbs(q(0.25 * T), 1e-13));
        CHECK_THAT(b, WithinAbs(q(0.75 * T), 1e-13));
    }
    CHECK_THROWS_AS(gci_square_levels(-1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("open-loop output spectrum is the HOSIDF times the linear chain", "[hosidf_open]") {
    const auto rc = ResetController::fore(300.0 * kPi, 0.0);
    const TransferFunction ca({1.0 / (75.0 * kPi), 1.0}, {1.0 / (1200.0 * kPi), 1.0});
    const TransferFunction p({1.0}, {1.0 / 50.0, 1.0});
    const SinusoidSpec in{2.0, 1, 400.0 * kPi, 0.0};
    const auto y = open_loop_output_spectrum(rc, ca, p, in, 9);
    for (int n = 1; n <= 9; n += 2) {
        const double wn = n * in.omega;
        const Complex ref = 2.0 * hosidf(rc, in.omega, n) * ca.at(wn) * p.at(wn);
        CHECK(std::abs(y.at(n) - ref) <= 1e-12 * std::abs(ref));
    }
}

TEST_CASE("input validation", "[hosidf_open]") {
    CHECK_THROWS_AS(ResetController::clegg(1.5), InvalidArgument);
    CHECK_THROWS_AS(ResetController::clegg(-1.0), InvalidArgument);
    CHECK_THROWS_AS(hosidf(ResetController::clegg(0.0), -1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(hosidf(ResetController::clegg(0.0), 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS((SinusoidSpec{1.0, 2, 1.0, 0.0}.validate()), InvalidArgument);
}
