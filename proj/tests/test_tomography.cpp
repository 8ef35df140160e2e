#include "testing.hpp"

#include <sstream>

#include "qproc/qmeasures.hpp"
#include "qproc/tomography.hpp"

using namespace qproc;

namespace {

double maxDiff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

QuantumAlphabet alphabetOf(std::vector<Vec> kets) {
    QuantumAlphabet q;
    q.dim = static_cast<int>(kets[0].size());
    for (std::size_t i = 0; i < kets.size(); ++i) q.names.push_back("q" + std::to_string(i));
    q.states = std::move(kets);
    return q;
}

} // namespace

TEST_CASE("qubit reconstruction from unbiased bases") {
    CHECK(maxDiff(reconstructQubit(0.5, 0.5, 0.5).matrix(), Mat::Identity(2, 2) / 2.0) < 1e-15);
    CHECK(maxDiff(reconstructQubit(1, 0.5, 0.5).matrix(), ketPlus() * ketPlus().adjoint()) < 1e-15);
    auto rho0 = *blockState(qgm(M_PI / 2), 1, true).dense;
    auto p = mubProbabilities(rho0);
    CHECK(maxDiff(reconstructQubit(p[0], p[1], p[2]).matrix(), rho0.matrix()) < 1e-12);
    auto outside = reconstructQubit(1, 1, 0.5);
    CHECK(hermitianEigenvalues(outside.matrix()).minCoeff() >= -1e-12);
    CHECK(thrownKind([] { reconstructQubit(1.2, 0.5, 0.5); }) == ErrorKind::Domain);
}

TEST_CASE("pair reconstruction from Pauli correlations") {
    CHECK(maxDiff(reconstructPair(PairExpectations{}).matrix(), Mat::Identity(4, 4) / 4.0) < 1e-15);
    auto rho2 = *blockState(qgm(M_PI / 2), 2, true).dense;
    CHECK(maxDiff(reconstructPair(pauliExpectations(rho2)).matrix(), rho2.matrix()) < 1e-10);

    auto rho0 = *blockState(qgm(M_PI / 2), 1, true).dense;
    auto product = tensor(rho0, rho0);
    auto e = pauliExpectations(product);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK_NEAR(e.corr[a][b], e.single[a] * e.single[b], 1e-12);
    CHECK(maxDiff(reconstructPair(e).matrix(), product.matrix()) < 1e-10);
}

TEST_CASE("physicality projection clips negative eigenvalues") {
    Mat m(2, 2);
    m << 1.1, 0, 0, -0.1;
    auto r = physicalProjection(m);
    CHECK_NEAR(r.matrix()(0, 0).real(), 1.0, 1e-15);
}

TEST_CASE("known-alphabet inference on the golden mean") {
    Source s = qgm(M_PI / 2);
    DQMP p = repeatedProtocol(instrumentMpm());
    auto f = measuredWordDist(s, p, 2);
    CHECK_NEAR(4 * f.prob({1, 1}), 1.0 / 3, 1e-12);
    auto rep = knownAlphabetInfer(f, p.outcomes(), instrumentMpm(), s.alphabet, 2);
    CHECK(rep.unique);
    auto truth = hmcWordDistribution(s.hmc, 2);
    for (std::size_t i = 0; i < rep.words.size(); ++i) CHECK_NEAR(rep.probs[i], truth.prob(rep.words[i]), 1e-9);
    CHECK(rep.residual < 1e-12);
}

TEST_CASE("known-alphabet inference with a redundant alphabet is ambiguous") {
    auto q = alphabetOf({basisKet(2, 0), basisKet(2, 1), ketPlus(), ketMinus()});
    POVM sic = instrumentSIC();
    DQMP p = repeatedProtocol(sic);
    auto mixed = DensityMatrix(Mat::Identity(2, 2) / 2.0);
    auto born = bornDistribution(mixed, sic);
    WordDistribution f;
    f.length = 1;
    for (int y = 0; y < 4; ++y) {
        f.words.push_back({y});
        f.probs.push_back(born[y]);
    }
    auto rep = knownAlphabetInfer(f, p.outcomes(), sic, q, 1);
    CHECK_FALSE(rep.unique);
    CHECK(rep.rank == 3);
    CHECK(rep.residual < 1e-8);

    auto q3 = alphabetOf({basisKet(2, 0), ketPlus(), ketPsi(2 * M_PI / 3)});
    auto rep3 = knownAlphabetInfer(f, p.outcomes(), sic, q3, 1);
    CHECK(rep3.unique);
}

TEST_CASE("infeasible frequencies report a residual") {
    Source s = qgm(M_PI / 2);
    POVM m = instrumentM01();
    WordDistribution f;
    f.length = 1;
    f.words = {{1}};
    f.probs = {1.0};
    auto rep = knownAlphabetInfer(f, Alphabet{{"0", "1"}}, m, s.alphabet, 1);
    CHECK(rep.residual > 0.1);
    double total = 0;
    for (double p : rep.probs) {
        CHECK(p >= 0);
        total += p;
    }
    CHECK_NEAR(total, 1.0, 1e-12);
}

TEST_CASE("source reconstruction") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 0.75;
    d(1, 1) = 0.25;
    Source e = sourceFromEigendecomposition(DensityMatrix(d));
    CHECK(e.hmc.numStates() == 1);
    CHECK_NEAR(e.hmc.T[0](0, 0), 0.75, 1e-15);
    CHECK_NEAR(blockEntropy(e, 1), shannonEntropy({0.75, 0.25}), 1e-12);

    Source g = qgm(M_PI / 2);
    Source r = sourceFromWordDistribution(hmcWordDistribution(g.hmc, 2), g.alphabet);
    REQUIRE(r.hmc.numStates() == 2);
    CHECK_NEAR(r.hmc.T[0](0, 0), 0.5, 1e-14);
    CHECK_NEAR(r.hmc.T[1](0, 1), 0.5, 1e-14);
    CHECK_NEAR(r.hmc.T[0](1, 0), 1.0, 1e-14);
    for (int l = 1; l <= 6; ++l) CHECK_NEAR(blockEntropy(r, l), blockEntropy(g, l), 1e-10);

    Source p3 = makePreset("period", {{"word", "00f"}, {"phi", "pi"}});
    Source r3 = sourceFromWordDistribution(hmcWordDistribution(p3.hmc, 3), p3.alphabet);
    CHECK(r3.hmc.numStates() == 3);
    auto t = quantumMeasures(r3, 8);
    CHECK_NEAR(t.EqHat, std::log2(3.0), 1e-12);
}

TEST_CASE("minimal predictive measurement") {
    auto rho0 = *blockState(qgm(M_PI / 2), 1, true).dense;
    auto product = tensor(rho0, rho0);
    auto pm = minPredictiveMeasurement(product, 19, 36);
    CHECK_NEAR(pm.value, vonNeumannEntropy(rho0), 1e-9);

    Mat cc = Mat::Zero(4, 4);
    cc(0, 0) = cc(3, 3) = 0.5;
    auto c = minPredictiveMeasurement(DensityMatrix(cc, {2, 2}), 19, 36);
    CHECK_NEAR(c.value, 0.0, 1e-12);
    CHECK_NEAR(c.theta, 0.0, 1e-12);

    auto q = minPredictiveMeasurement(*blockState(qgm(M_PI / 2), 2, true).dense, 19, 36);
    CHECK(q.value <= q.marginal + 1e-9);
}

TEST_CASE("i.i.d. cost of the nonunifilar source") {
    auto c = iidCost(nonunifilarQubit(0.3), 8);
    CHECK_NEAR(c.s1, 1.0, 1e-12);
    CHECK(c.gap > 0.05);
}

TEST_CASE("sampling is deterministic and consistent") {
    Source s = makePreset("iid", {{"state", "mixed"}});
    DQMP p = repeatedProtocol(instrumentM01());
    auto a = sampleRealizations(s, p, 1, 100000, 7);
    auto b = sampleRealizations(s, p, 1, 100000, 7);
    CHECK(a.runs == b.runs);
    CHECK_NEAR(empiricalDistribution(a, 1).prob({0}), 0.5, 0.01);
    auto c = sampleRealizations(s, p, 1, 1000, 8);
    CHECK_FALSE(std::equal(c.runs.begin(), c.runs.end(), a.runs.begin()));
}

TEST_CASE("orthogonal periodic source gives cyclic outputs") {
    Source s = makePreset("period", {{"word", "00f"}, {"phi", "pi"}});
    auto rec = sampleRealizations(s, repeatedProtocol(alphabetPOVM(s.alphabet)), 9, 20, 3, true);
    for (const auto& w : rec.runs)
        for (int t = 3; t < 9; ++t) CHECK(w[t] == w[t - 3]);
    REQUIRE(rec.hidden.size() == 20);
    CHECK(rec.hidden[0].size() == 10);
}

TEST_CASE("sample record round trip") {
    Source s = qgm(M_PI / 2);
    auto rec = sampleRealizations(s, repeatedProtocol(instrumentMpm()), 4, 25, 99);
    std::stringstream ss;
    writeSampleRecord(ss, rec);
    auto back = readSampleRecord(ss);
    CHECK(back.seed == 99);
    CHECK(back.runs == rec.runs);
    CHECK(back.outcomes.symbols == rec.outcomes.symbols);

    std::stringstream bad("{\"seed\":1,\"protocol\":\"p\",\"source\":\"s\",\"length\":2,\"outcomes\":[\"0\",\"1\"]}\n0 2\n");
    CHECK(thrownKind([&] { readSampleRecord(bad); }) == ErrorKind::Validation);
}
