#include "testing.hpp"

#include "qproc/qmeasures.hpp"

using namespace qproc;

TEST_CASE("quantum measures need two blocks") {
    CHECK(thrownKind([] { quantumMeasures(qgm(M_PI / 2), 1); }) == ErrorKind::Domain);
}

TEST_CASE("maximally mixed iid source") {
    auto t = quantumMeasures(makePreset("iid", {{"state", "mixed"}}), 6);
    CHECK_NEAR(t.sHat, 1.0, 1e-12);
    CHECK_NEAR(t.EqHat, 0.0, 1e-12);
    CHECK_NEAR(t.TqHat, 0.0, 1e-12);
    CHECK(t.order.detected);
    CHECK(t.order.value == 0);
}

TEST_CASE("nonmaximal iid source has no excess entropy") {
    auto t = quantumMeasures(makePreset("iid", {{"p", "0.25"}, {"phi", "pi/3"}}), 6);
    for (int l = 0; l <= 6; ++l) {
        CHECK_NEAR(t.Eq[l], 0.0, 1e-10);
        CHECK_NEAR(t.TqPlain[l], 0.0, 1e-10);
    }
}

TEST_CASE("period-3 orthogonal process") {
    auto t = quantumMeasures(makePreset("period", {{"word", "00f"}, {"phi", "pi"}}), 12);
    CHECK_NEAR(t.sHat, 0.0, 1e-12);
    CHECK_NEAR(t.EqHat, std::log2(3.0), 1e-12);
    CHECK(t.order.detected);
    CHECK(t.order.value == 3);
}

TEST_CASE("curve invariants") {
    for (const auto& name : presetNames()) {
        auto t = quantumMeasures(makePreset(name), 6);
        CHECK_NEAR(t.dS[0], t.logDim, 1e-15);
        CHECK_NEAR(t.Gq, -t.Rq, 1e-15);
        for (int l = 1; l <= 6; ++l) {
            CHECK(t.S[l] >= t.S[l - 1] - 1e-9);
            CHECK(t.d2S[l] <= 1e-9);
        }
    }
}

TEST_CASE("closed-form entropy rate for unifilar sources") {
    const double exact = entropyRateExact(unifilarQubit(1.0 / 3));
    CHECK_NEAR(exact, 0.9184, 0.002);
    CHECK_NEAR(quantumMeasures(unifilarQubit(1.0 / 3), 10).sHat, exact, 1e-3);
    CHECK_NEAR(entropyRateExact(threeSymbolQgm()), 2.0 / 3, 1e-12);
    CHECK(thrownKind([] { entropyRateExact(nonunifilarQubit(1.0 / 3)); }) == ErrorKind::NoClosedForm);
}

TEST_CASE("estimator identities") {
    auto t = quantumMeasures(qgm(M_PI / 2), 8);
    for (int l = 1; l <= 8; ++l) CHECK_NEAR(t.Eq[l], t.S[l] - l * t.s[l], 1e-12);
    for (int l = 1; 2 * l <= 8; ++l) CHECK_NEAR(t.EqMi[l], 2 * t.S[l] - t.S[2 * l], 1e-12);
}
