#include <catch2/catch_amalgamated.hpp>

#include "resetfr/casestudies.hpp"
#include "resetfr/hosidf_closed.hpp"
#include "resetfr/errors.hpp"

using namespace resetfr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("S_1 + T_1 = 1 and T_n = P CS_n", "[hosidf_closed]") {
    const auto sys = build_pci_pid(CaseStudyParams{});
    for (double w : FrequencyGrid::logspace(2.0 * kPi * 20.0, 2.0 * kPi * 2000.0, 25)) {
        const auto s = closed_loop_sensitivities(sys, w, 21);
        CHECK(std::abs(s.s(1) + s.t(1) - 1.0) < 1e-13);
        for (int n = 1; n <= 21; n += 2)
            CHECK(rel(s.t(n), sys.plant().at(n * w) * s.cs(n)) < 1e-12);
        for (int n = 3; n <= 21; n += 2) CHECK(std::abs(s.s(n) + s.t(n)) < 1e-15);
        for (int n = 2; n <= 20; n += 2) CHECK(s.s(n) == Complex(0.0, 0.0));
    }
}

TEST_CASE("without resets the loop is the analytic linear one", "[hosidf_closed]") {
    const auto sys = build_pci_pid(CaseStudyParams{}).with_gamma(1.0);
    for (double f : {30.0, 150.0, 700.0}) {
        const double w = 2.0 * kPi * f;
        const auto g = gamma(sys, w, 31);
        CHECK_THAT(g.gamma, WithinAbs(1.0, 1e-12));
        const Complex l = sys.rc().base_linear().at(w) * sys.c_alpha().at(w) * sys.plant().at(w);
        const auto s = closed_loop_sensitivities(sys, w, 31);
        CHECK(rel(s.s(1), 1.0 / (1.0 + l)) < 1e-12);
        CHECK(rel(s.t(1), l / (1.0 + l)) < 1e-12);
        for (int n = 3; n <= 31; n += 2) CHECK(std::abs(s.s(n)) < 1e-14);
        const auto a = method_a(sys, w);
        CHECK(rel(a.s, s.s(1)) < 1e-12);
        for (int n = 1; n <= 9; n += 2) {
            const auto b = method_b(sys, w, n);
            CHECK(std::abs(b.s - s.s(n)) <= 1e-12 * std::max(1.0, std::abs(s.s(n))));
        }
    }
}

TEST_CASE("correction factor stays close to one on the case study", "[hosidf_closed]") {
    const auto sys = build_pci_pid(CaseStudyParams{});
    const auto g = gamma(sys, 2.0 * kPi * 100.0, 501);
    CHECK(g.gamma > 1.0);
    CHECK(g.gamma < 1.02);
    CHECK(g.psi.size() == 250);
    CHECK_FALSE(g.psi.contains(1));
}

TEST_CASE("predicted signals scale with the amplitude", "[hosidf_closed]") {
    const auto sys = build_tpci_pid(CaseStudyParams{}, tpci_shaping(2.0 * kPi * 100.0));
    const double w = 2.0 * kPi * 100.0;
    std::vector<double> t(64);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = k * 0.01 / 64.0;
    const auto p1 = predict_signals(sys, 1.0, w, 51, t);
    const auto p2 = predict_signals(sys, 1e-7, w, 51, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK_THAT(p2.e_t[k], WithinAbs(1e-7 * p1.e_t[k], 1e-20));
        CHECK_THAT(p2.u_t[k], WithinAbs(1e-7 * p1.u_t[k], 1e-18));
    }
    // e is r - y sample by sample
    for (std::size_t k = 0; k < t.size(); ++k)
        CHECK_THAT(p1.e_t[k], WithinAbs(std::sin(w * t[k]) - p1.y_t[k], 1e-12));
}

TEST_CASE("shaping filter shape", "[hosidf_closed]") {
    const ShapingFilter sf{100.0, 1.0, 100.0, 0.05};
    CHECK_THAT(std::abs(sf.at(100.0)), WithinRel(0.05 * 100.0, 1e-12));
    CHECK_THAT(std::abs(sf.at(1e-3)), WithinRel(0.05, 1e-6));
    CHECK_THAT(std::abs(sf.at(1e7)), WithinRel(0.05, 1e-6));
    CHECK_THROWS_AS((ShapingFilter{100.0, -1.0, 100.0, 0.05}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ShapingFilter{0.0, 1.0, 100.0, 0.05}.validate()), InvalidArgument);
}

TEST_CASE("closed-loop construction checks properness", "[hosidf_closed]") {
    const auto rc = ResetController::clegg(0.0);
    CHECK_THROWS_AS(ClosedLoopSystem(rc, TransferFunction::gain(1.0), TransferFunction::gain(1.0)),
                    InvalidArgument);
    const ClosedLoopSystem ok(rc, TransferFunction::gain(1.0), TransferFunction({1.0}, {1.0, 1.0}));
    CHECK(ok.a_cl().rows() == 2);
    CHECK(ok.c_cl()(0, 0) == 0.0);
}

TEST_CASE("a plant zero on a harmonic leaves CS_n defined", "[hosidf_closed]") {
    const double w = 10.0;
    const ClosedLoopSystem sys(ResetController::clegg(0.0), TransferFunction::gain(1.0),
                               TransferFunction({1.0 / (9.0 * w * w), 0.0, 1.0}, {0.01, 0.2, 1.0, 1.0}));
    const auto s = closed_loop_sensitivities(sys, w, 5);
    CHECK(std::abs(s.t(3)) < 1e-12 * std::abs(s.cs(3)));
    CHECK(std::isfinite(std::abs(s.cs(3))));
    CHECK(std::abs(s.cs(3)) > 0.0);
    const auto b = method_b(sys, w, 3);
    CHECK(std::isfinite(std::abs(b.cs)));
}
