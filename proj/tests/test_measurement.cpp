#include "testing.hpp"

#include "qproc/measurement.hpp"

using namespace qproc;

namespace {

bool sameElements(const POVM& a, const POVM& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if ((a.elements[i] - b.elements[i]).cwiseAbs().maxCoeff() > 1e-12) return false;
    return true;
}

double nextProb(const MeasuredRecursion& rec, const RVec& belief, int s, int y) { return rec.step(belief, s, y).sum(); }

} // namespace

TEST_CASE("registry instruments are valid") {
    for (int d : {2, 3, 4})
        for (const auto& m : standardInstruments(d)) {
            CHECK_NOTHROW(m.validate());
            CHECK(m.dim == d);
        }
    CHECK(instrumentM01().isPVM());
    CHECK(instrumentMpm2().isPVM());
    CHECK_FALSE(instrumentSIC().isPVM());
    CHECK(instrumentSIC().rankOne());
    CHECK(sameElements(instrumentMtheta(0), instrumentM01()));
    CHECK(sameElements(instrumentMtheta(M_PI / 2), instrumentMpm()));
}

TEST_CASE("SIC elements sum to the identity") {
    Mat sum = Mat::Zero(2, 2);
    for (const auto& e : instrumentSIC().elements) sum += e;
    CHECK((sum - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("instrument validation") {
    POVM m = instrumentM01();
    m.elements[0] *= 0.5;
    CHECK(thrownKind([&] { m.validate(); }) == ErrorKind::Validation);
    CHECK(thrownKind([] { instrumentByName("Mzz"); }) == ErrorKind::Validation);
    CHECK(thrownKind([] { instrumentByName("alphabet"); }) == ErrorKind::Validation);
    CHECK_NEAR(instrumentByName("Mtheta:pi/4").elements[0](0, 1).real(), 0.5 * std::sin(M_PI / 4), 1e-15);
}

TEST_CASE("alphabet instrument") {
    Source s = qgm(M_PI / 2);
    POVM m = alphabetPOVM(s.alphabet);
    CHECK(m.labels == std::vector<std::string>{"0", "+", "n"});
    CHECK_NEAR(m.elements[0](0, 0).real(), 1 / (1 + M_SQRT1_2), 1e-10);
    CHECK(hermitianEigenvalues(m.elements[2]).minCoeff() >= -1e-10);

    POVM o = alphabetPOVM(qgm(M_PI).alphabet);
    CHECK(o.elements[2].cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Born distributions") {
    auto b = blockState(qgm(M_PI / 2), 1, true);
    auto p = bornDistribution(*b.dense, instrumentM01());
    CHECK_NEAR(p[1], 1.0 / 6, 1e-14);
    auto u = bornDistribution(DensityMatrix(Mat::Identity(3, 3) / 3.0), instrumentMpm2());
    for (double x : u) CHECK_NEAR(x, 1.0 / 3, 1e-14);
    auto d = bornDistribution(DensityMatrix::fromPure(PureState(ketPlus())), instrumentMpm());
    CHECK_NEAR(d[0], 1.0, 1e-14);
    CHECK(thrownKind([] { bornDistribution(DensityMatrix(Mat::Identity(3, 3) / 3.0), instrumentM01()); }) ==
          ErrorKind::Domain);
}

TEST_CASE("protocol validation") {
    DQMP p = repeatedProtocol(instrumentM01());
    p.delta[0]["2"] = 0;
    CHECK(thrownKind([&] { p.validate(); }) == ErrorKind::Validation);
    CHECK(thrownKind([] { MeasuredRecursion r(qgm(M_PI / 2), repeatedProtocol(instrumentM012())); }) ==
          ErrorKind::Validation);

    DQMP partial = repeatedProtocol(instrumentM01());
    partial.delta[0].erase("1");
    CHECK(thrownKind([&] { measuredWordDist(qgm(M_PI / 2), partial, 3); }) == ErrorKind::Validation);
}

TEST_CASE("single-state protocol is a repeated measurement") {
    DQMP p = repeatedProtocol(instrumentMpm());
    CHECK(p.numStates() == 1);
    CHECK(p.recurrentStates() == std::vector<bool>{true});
    auto mp = measuredProcess(qgm(M_PI / 2), p, 4);
    CHECK(mp.stationary);
}

TEST_CASE("orthogonal source read with matching projectors reproduces the classical process") {
    Source s = qgm(M_PI);
    for (int l = 1; l <= 6; ++l) {
        auto y = measuredWordDist(s, repeatedProtocol(instrumentM01()), l);
        auto x = hmcWordDistribution(s.hmc, l);
        REQUIRE(y.words.size() == x.words.size());
        for (std::size_t i = 0; i < x.words.size(); ++i) CHECK_NEAR(y.prob(x.words[i]), x.probs[i], 1e-14);
    }
}

TEST_CASE("renewal probability of a '1' after n zeros") {
    Source s = qgm(M_PI / 2);
    DQMP p = repeatedProtocol(instrumentM01());
    MeasuredRecursion rec(s, p);
    RVec belief = rec.step(s.pi, 0, 1);
    belief /= belief.sum();
    // hand Bayes update for '0': A' = a/2 + b, B' = a/4; Pr('1') = a/4
    double a = 0, b = 1;
    for (int n = 0; n <= 20; ++n) {
        CHECK_NEAR(nextProb(rec, belief, 0, 1), a / 4, 1e-12);
        belief = rec.step(belief, 0, 0);
        belief /= belief.sum();
        double na = a / 2 + b, nb = a / 4, z = na + nb;
        a = na / z;
        b = nb / z;
    }
    CHECK_NEAR(nextProb(rec, belief, 0, 1), (3 - std::sqrt(5.0)) / 4, 1e-9);
}

TEST_CASE("golden mean read with M01") {
    auto mp = measuredProcess(qgm(M_PI / 2), repeatedProtocol(instrumentM01()), 14);
    auto t = classicalMeasures(mp.dists, 2);
    CHECK_NEAR(t.H[1], 0.650, 0.002);
    CHECK_NEAR(t.hmuHat, 0.60, 0.005);
    CHECK_NEAR(t.EHat, 0.053, 0.002);
}

TEST_CASE("recursion agrees with the direct trace") {
    for (const auto& name : presetNames()) {
        Source s = makePreset(name);
        std::vector<DQMP> protos{repeatedProtocol(alphabetPOVM(s.alphabet))};
        for (const auto& m : standardInstruments(s.dim())) protos.push_back(repeatedProtocol(m));
        for (const auto& pn : presetProtocolNames(name)) protos.push_back(presetProtocol(pn, s));
        for (const auto& p : protos)
            for (int l = 1; l <= 3; ++l) {
                auto a = measuredWordDist(s, p, l, s.pi);
                auto b = measuredWordDistDirect(s, p, l);
                double diff = 0;
                for (std::size_t i = 0; i < b.words.size(); ++i) diff = std::max(diff, std::abs(a.prob(b.words[i]) - b.probs[i]));
                for (std::size_t i = 0; i < a.words.size(); ++i) diff = std::max(diff, std::abs(b.prob(a.words[i]) - a.probs[i]));
                CHECK(diff < 1e-10);
            }
    }
}

TEST_CASE("adaptive protocols") {
    Source s3 = threeSymbolQgm();
    auto mp3 = measuredProcess(s3, presetProtocol("adaptive", s3), 10);
    REQUIRE(mp3.recurrent.has_value());
    CHECK_NEAR(classicalMeasures(*mp3.recurrent, mp3.outcomes.size(), 1e-9, false).hmuHat, 2.0 / 3, 1e-9);

    Source s5 = makePreset("period5");
    DQMP p5 = presetProtocol("adaptive", s5);
    auto mp5 = measuredProcess(s5, p5, 10);
    REQUIRE(mp5.recurrent.has_value());
    CHECK_NEAR(classicalMeasures(*mp5.recurrent, mp5.outcomes.size(), 1e-9, false).hmuHat, 0.0, 1e-9);
    CHECK(mp5.recurrent->back().words.size() == 5);

    Source u = unifilarQubit(1.0 / 3);
    DQMP pu = presetProtocol("adaptive", u);
    REQUIRE(pu.sourceInit.has_value());
    CHECK_NOTHROW(measuredWordDist(u, pu, 6));

    CHECK(thrownKind([&] { presetProtocol("adaptive", qgm(M_PI / 2)); }) == ErrorKind::Validation);
}
