#include "testing.hpp"

#include "qproc/qmeasures.hpp"
#include "qproc/sync.hpp"

using namespace qproc;

namespace {

double entropyOf(const RVec& b) {
    std::vector<double> p(b.data(), b.data() + b.size());
    return shannonEntropy(p);
}

} // namespace

TEST_CASE("a '1' under M01 synchronizes to B") {
    Source s = qgm(M_PI / 2);
    auto b = beliefFilter(s, repeatedProtocol(instrumentM01()), std::vector<std::string>{"1"});
    CHECK_NEAR(b.dist(0), 0.0, 1e-15);
    CHECK_NEAR(b.dist(1), 1.0, 1e-15);
    CHECK_NEAR(b.prob, 1.0 / 6, 1e-14);
    CHECK(b.entropy() < kSyncEntropy);
}

TEST_CASE("renewal beliefs") {
    Source s = qgm(M_PI / 2);
    DQMP m01 = repeatedProtocol(instrumentM01());
    DQMP mpm = repeatedProtocol(instrumentMpm());
    std::vector<std::string> w{"1"}, v{"-"};
    double a = 0, b = 1;
    for (int n = 0; n <= 20; ++n) {
        CHECK_NEAR(beliefFilter(s, m01, w).dist(1), b, 1e-12);
        double na = a / 2 + b, nb = a / 4, z = na + nb;
        a = na / z;
        b = nb / z;
        w.push_back("0");
    }
    // '+' update: A' = a/4 + b/2, B' = a/2
    a = 1;
    b = 0;
    for (int n = 0; n <= 20; ++n) {
        CHECK_NEAR(beliefFilter(s, mpm, v).dist(0), a, 1e-12);
        double na = a / 4 + b / 2, nb = a / 2, z = na + nb;
        a = na / z;
        b = nb / z;
        v.push_back("+");
    }
    CHECK(beliefFilter(s, mpm, std::vector<std::string>{"-", "+", "+"}).dist(0) == doctest::Approx(5.0 / 7).epsilon(1e-12));
}

TEST_CASE("unrealizable observations") {
    Source s = qgm(M_PI / 2);
    DQMP m01 = repeatedProtocol(instrumentM01());
    CHECK(thrownKind([&] { beliefFilter(s, m01, std::vector<std::string>{"1", "1"}); }) == ErrorKind::Unrealizable);
    CHECK(thrownKind([&] { beliefFilter(s, m01, std::vector<std::string>{"+"}); }) == ErrorKind::Validation);
}

TEST_CASE("belief filter conserves total probability") {
    for (const auto& name : {"qgm", "nonunifilar", "qutrit", "period5"}) {
        Source s = makePreset(name);
        DQMP p = repeatedProtocol(standardInstruments(s.dim()).back());
        for (int l = 1; l <= 5; ++l) {
            auto d = measuredWordDist(s, p, l);
            RVec acc = RVec::Zero(s.hmc.numStates());
            for (std::size_t i = 0; i < d.words.size(); ++i) {
                auto b = beliefFilter(s, p, d.words[i]);
                CHECK_NEAR(b.prob, d.probs[i], 1e-12);
                acc += d.probs[i] * b.dist;
            }
            RVec evolved = s.pi;
            for (int t = 0; t < l; ++t) evolved = (evolved.transpose() * s.hmc.total()).transpose();
            CHECK((acc - evolved).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("uncertainty curve basics") {
    Source s5 = makePreset("period5");
    auto c = stateUncertaintyCurve(s5, repeatedProtocol(instrumentM01()), 12);
    CHECK_NEAR(c.H[0], std::log2(5.0), 1e-12);
    for (double h : c.H) {
        CHECK(h >= -1e-9);
        CHECK(h <= std::log2(5.0) + 1e-9);
    }
    CHECK(c.H.back() < c.H[0]);
    CHECK(c.diverging == (c.cInf > 1e-3));
    CHECK(syncInfo(s5, repeatedProtocol(instrumentM01()), 12).has_value() == !c.diverging);
    Source o5 = makePreset("period5", {{"phi", "pi"}});
    CHECK(syncInfo(o5, repeatedProtocol(alphabetPOVM(o5.alphabet)), 12).has_value());

    Source q = qgm(M_PI / 2);
    auto flat = stateUncertaintyCurve(q, repeatedProtocol(instrumentMtheta(M_PI / 4)), 10);
    const double hpi = entropyOf(q.pi);
    for (double h : flat.H) CHECK_NEAR(h, hpi, 1e-12);
    CHECK(flat.diverging);
    CHECK_FALSE(syncInfo(q, repeatedProtocol(instrumentMtheta(M_PI / 4)), 10).has_value());
}

TEST_CASE("synchronization cost bounds transient information on periodic sources") {
    for (const auto& w : {"0000f", "000ff", "00f0f"}) {
        Source s = makePreset("period5", {{"word", w}});
        const double tq = quantumMeasures(s, 12).TqHat;
        for (const auto& m : {instrumentM01(), instrumentMtheta(3 * M_PI / 4)})
            CHECK(stateUncertaintyCurve(s, repeatedProtocol(m), 12).syncInfo >= tq - 1e-9);
    }
}

TEST_CASE("synchronized beliefs stay synchronized under the unifilar witness protocol") {
    Source s = unifilarQubit(1.0 / 3);
    DQMP p = presetProtocol("adaptive", s);
    MeasuredRecursion rec(s, p);
    struct Node {
        RVec b;
        int st;
        bool synced;
    };
    std::vector<Node> cur{{s.pi, p.start, false}};
    for (int l = 0; l < 8; ++l) {
        std::vector<Node> next;
        for (const auto& n : cur)
            for (int y = 0; y < p.povm[n.st].size(); ++y) {
                RVec a = rec.step(n.b, n.st, y);
                if (a.sum() < 1e-14) continue;
                a /= a.sum();
                const double h = entropyOf(a);
                if (n.synced) CHECK(h < 1e-9);
                next.push_back({a, rec.next(n.st, y), n.synced || h < kSyncEntropy});
            }
        cur = std::move(next);
    }
}

TEST_CASE("belief machine for the golden mean under M01") {
    Source s = qgm(M_PI / 2);
    auto bm = beliefMachine(s, repeatedProtocol(instrumentM01()), 12);
    CHECK_FALSE(bm.closed);
    int synced = -1;
    for (std::size_t i = 0; i < bm.nodes.size(); ++i)
        if (std::abs(bm.nodes[i].belief(1) - 1) < 1e-12) synced = static_cast<int>(i);
    REQUIRE(synced >= 0);
    int node = synced;
    double a = 0, b = 1;
    for (int n = 0; n <= 8; ++n) {
        double pOne = 0;
        int zero = -1;
        for (const auto& e : bm.edges)
            if (e.from == node) {
                if (e.label == "1") pOne = e.prob;
                if (e.label == "0") zero = e.to;
            }
        CHECK_NEAR(pOne, a / 4, 1e-12);
        double na = a / 2 + b, nb = a / 4, z = na + nb;
        a = na / z;
        b = nb / z;
        REQUIRE(zero >= 0);
        node = zero;
    }
}

TEST_CASE("belief machine for an orthogonal period-2 source") {
    Source s = makePreset("period", {{"word", "0f"}, {"phi", "pi"}});
    auto bm = beliefMachine(s, repeatedProtocol(alphabetPOVM(s.alphabet)), 6);
    CHECK(bm.closed);
    int rec = 0;
    for (const auto& n : bm.nodes) rec += n.recurrent;
    CHECK(rec == 2);
    CHECK_FALSE(bm.nodes[0].recurrent);
}

TEST_CASE("belief machine without merging grows with depth") {
    Source s = qgm(M_PI / 2);
    auto a = beliefMachine(s, repeatedProtocol(instrumentMtheta(3 * M_PI / 4)), 6);
    auto b = beliefMachine(s, repeatedProtocol(instrumentMtheta(3 * M_PI / 4)), 8);
    CHECK_FALSE(b.closed);
    CHECK(b.nodes.size() > a.nodes.size());
    CHECK_FALSE(b.warning.empty());
}

TEST_CASE("theta sweep maximum") {
    Source s = qgm(M_PI / 2);
    auto sw = thetaSweep(s, uniformGrid(0, M_PI, 9), 12);
    CHECK_NEAR(sw.argmax, M_PI / 4, 1e-12);
    CHECK_NEAR(sw.max, entropyOf(s.pi), 1e-9);
    CHECK(thrownKind([] { thetaSweep(unifilarQutrit(), {0.0}, 4); }) == ErrorKind::Domain);
}
