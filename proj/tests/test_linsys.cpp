#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "resetfr/linsys.hpp"
#include "resetfr/errors.hpp"

using namespace resetfr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Plain Taylor series with scaling and squaring, kept deliberately naive.
Matrix taylor_expm(const Matrix& A, double t) {
    Matrix M = A * t;
    int squarings = 0;
    while (M.norm() > 0.25) {
        M /= 2.0;
        ++squarings;
    }
    Matrix term = Matrix::Identity(A.rows(), A.cols());
    Matrix sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * M / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

Matrix random_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = d(rng);
    return m;
}

}  // namespace

TEST_CASE("transfer function evaluation", "[linsys]") {
    const TransferFunction lp({1.0}, {0.01, 1.0});  // 1/(0.01 s + 1)
    const Complex v = lp.at(100.0);
    CHECK_THAT(std::abs(v), WithinRel(1.0 / std::sqrt(2.0), 1e-14));
    CHECK_THAT(principal_angle(v), WithinAbs(-kPi / 4.0, 1e-14));
    CHECK_THAT(mag_db(v), WithinAbs(-3.0102999566, 1e-9));
    CHECK(TransferFunction::gain(3.0).at(5.0) == Complex(3.0, 0.0));
    CHECK(lp.is_strictly_proper());
    CHECK_THROWS_AS(TransferFunction({1.0}, {0.0}), InvalidArgument);
}

TEST_CASE("expm agrees with a Taylor oracle", "[linsys]") {
    std::mt19937 rng(7);
    for (int n : {1, 2, 3, 5, 8}) {
        const Matrix A = random_matrix(n, rng);
        for (double t : {0.0, 0.1, 1.0, 3.0}) {
            const Matrix ref = taylor_expm(A, t);
            const Matrix got = expm(A, t);
            CHECK((got - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
        }
    }
}

TEST_CASE("expm of a rotation generator", "[linsys]") {
    Matrix A(2, 2);
    A << 0.0, -2.0, 2.0, 0.0;
    const Matrix E = expm(A, 0.7);
    CHECK_THAT(E(0, 0), WithinAbs(std::cos(1.4), 1e-14));
    CHECK_THAT(E(1, 0), WithinAbs(std::sin(1.4), 1e-14));
}

TEST_CASE("state-space realization matches its transfer function", "[linsys]") {
    const std::vector<TransferFunction> systems{
        TransferFunction({1.0, 2.0}, {1.0, 3.0, 2.0}),
        TransferFunction({2.0, 0.0, 1.0}, {1.0, 0.4, 4.0}),
        // badly scaled PID-like lead with a far low-pass
        TransferFunction({1.0 / 196.0, 1.0}, {1.0 / 4524.0 / 9424.0, 1.0 / 4524.0 + 1.0 / 9424.0, 1.0}),
        TransferFunction({5.0}, {1.0}),
    };
    for (const auto& tf : systems) {
        const StateSpace ss = tf_to_ss(tf);
        for (double w : FrequencyGrid::logspace(0.01, 1e5, 40)) {
            const Complex a = tf.at(w);
            const Complex b = ss.at(w);
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
        }
    }
    CHECK_THROWS_AS(tf_to_ss(TransferFunction({1.0, 0.0, 0.0}, {1.0, 1.0})), InvalidArgument);
}

TEST_CASE("series connections multiply frequency responses", "[linsys]") {
    const TransferFunction a({1.0}, {0.1, 1.0});
    const TransferFunction b({0.5, 1.0}, {0.05, 1.0});
    const TransferFunction ab = series(a, b);
    const StateSpace ss = series_ss(tf_to_ss(a), tf_to_ss(b));
    CHECK(ss.states() == 2);
    for (double w : {0.3, 3.0, 30.0, 300.0}) {
        const Complex ref = a.at(w) * b.at(w);
        CHECK(std::abs(ab.at(w) - ref) <= 1e-13 * std::abs(ref));
        CHECK(std::abs(ss.at(w) - ref) <= 1e-12 * std::abs(ref));
    }
}

TEST_CASE("polynomial helpers round-trip", "[linsys]") {
    const std::vector<double> p{2.0, -6.0, -8.0, 24.0};  // 2 (s-2)(s+2)(s-3)
    auto roots = poly_roots(p);
    REQUIRE(roots.size() == 3);
    const auto back = poly_from_roots(roots, 2.0);
    REQUIRE(back.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK_THAT(back[i], WithinAbs(p[i], 1e-10));
    const auto prod = poly_multiply(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, -1.0});
    CHECK(prod == std::vector<double>{1.0, 0.0, -1.0});
}

TEST_CASE("stability helpers", "[linsys]") {
    Matrix A(2, 2);
    A << -1.0, 5.0, 0.0, -2.0;
    CHECK(is_hurwitz(A));
    CHECK_THAT(spectral_radius(A), WithinRel(2.0, 1e-14));
    A(1, 1) = 0.0;
    CHECK_FALSE(is_hurwitz(A));
}

TEST_CASE("resolvents agree with a direct solve", "[linsys]") {
    Matrix A(2, 2), B(2, 1), C(1, 2);
    A << 0.0, 1.0, -4.0, -0.5;
    B << 0.0, 1.0;
    C << 1.0, 0.0;
    const Complex s(0.0, 3.0);
    const CMatrix M = s * CMatrix::Identity(2, 2) - A.cast<Complex>();
    const CVector col = M.lu().solve(B.cast<Complex>());
    const CRowVector row = C.cast<Complex>() * M.inverse();
    CHECK((column_resolvent(A, B, s) - col).norm() < 1e-14);
    CHECK((row_resolvent(A, C, s) - row).norm() < 1e-14);
}
