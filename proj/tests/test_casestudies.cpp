#include <catch2/catch_amalgamated.hpp>

#include "resetfr/casestudies.hpp"
#include "resetfr/errors.hpp"

using namespace resetfr;
using Catch::Matchers::WithinRel;

TEST_CASE("case-study loop written out by hand", "[casestudies]") {
    const CaseStudyParams p;
    const auto sys = build_pci_pid(p);
    for (double f : {10.0, 150.0, 900.0}) {
        const double w = 2.0 * kPi * f;
        const Complex s(0.0, w);
        const Complex pci = 1.0 + p.omega_i / s;
        const Complex pid = p.kp * (s / p.omega_d + 1.0) / (s / p.omega_t + 1.0) / (s / p.omega_f + 1.0);
        const Complex plant = 6.615e5 / (83.57 * s * s + 279.4 * s + 5.837e5);
        const Complex l = sys.rc().base_linear().at(w) * sys.c_alpha().at(w) * sys.plant().at(w);
        CHECK(std::abs(l - pci * pid * plant) < 1e-12 * std::abs(l));
    }
    CHECK(sys.plant().is_strictly_proper());
    CHECK(sys.rc().gamma() == 0.0);
    CHECK(sys.rc().D() == 1.0);
}

TEST_CASE("design ratios around the crossover", "[casestudies]") {
    const auto p = CaseStudyParams::around(1000.0, 0.2, 3.0);
    CHECK_THAT(p.omega_d, WithinRel(1000.0 / 4.8));
    CHECK_THAT(p.omega_t, WithinRel(4800.0));
    CHECK_THAT(p.omega_f, WithinRel(10000.0));
    CHECK_THAT(p.omega_i, WithinRel(100.0));
    auto bad = p;
    bad.kp = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("parameter JSON round trip and units", "[casestudies]") {
    CaseStudyParams p = CaseStudyParams::around(2.0 * kPi * 80.0, -0.3, 11.0);
    const auto back = params_from_json(params_to_json(p));
    CHECK_THAT(back.omega_f, WithinRel(p.omega_f, 1e-15));
    CHECK(back.gamma == p.gamma);
    const auto hz = params_from_json({{"units", "Hz"}, {"omega_c", 80.0}});
    CHECK_THAT(hz.omega_c, WithinRel(2.0 * kPi * 80.0, 1e-15));
    CHECK_THAT(hz.omega_i, WithinRel(2.0 * kPi * 8.0, 1e-15));
    CHECK_THROWS_AS(params_from_json({{"units", "rpm"}}), InvalidArgument);
    CHECK_THROWS_AS(params_from_json({{"K_p", "big"}}), InvalidArgument);
}

TEST_CASE("shaping filter JSON", "[casestudies]") {
    const auto sf = shaping_from_json({{"Q2", 50.0}}, 123.0);
    CHECK(sf.center == 123.0);
    CHECK(sf.q2 == 50.0);
    CHECK(sf.gain == 0.05);
    const auto back = shaping_from_json(shaping_to_json(sf), 1.0);
    CHECK(back.center == 123.0);
    const auto hz = shaping_from_json({{"units", "Hz"}, {"center", 10.0}}, 1.0);
    CHECK_THAT(hz.center, WithinRel(20.0 * kPi, 1e-15));
}

TEST_CASE("open-loop demonstration chain", "[casestudies]") {
    const auto ex = build_open_loop_demo();
    CHECK(ex.chain.rc.states() == 1);
    CHECK(ex.chain.rc.gamma() == 0.0);
    CHECK_THAT(ex.input.omega, WithinRel(400.0 * kPi));
    CHECK_THAT(std::abs(ex.chain.c_alpha.at(1e9)), WithinRel(16.0, 1e-6));
}
