#include "testing.hpp"

#include <random>

#include "qproc/qcore.hpp"

using namespace qproc;

namespace {

Mat bellProjector() {
    Vec b = Vec::Zero(4);
    b(0) = b(3) = M_SQRT1_2;
    return b * b.adjoint();
}

} // namespace

TEST_CASE("pure states must be normalized") {
    CHECK_NOTHROW(PureState(basisKet(3, 1)));
    Vec v(2);
    v << 1, 1;
    CHECK(thrownKind([&] { PureState p(v); }) == ErrorKind::Validation);
}

TEST_CASE("density matrix validation") {
    Mat m = Mat::Identity(2, 2) * 0.5;
    CHECK_NOTHROW(DensityMatrix(m));

    Mat badTrace = Mat::Identity(2, 2);
    CHECK(thrownKind([&] { DensityMatrix d(badTrace); }) == ErrorKind::Validation);

    Mat notHermitian = m;
    notHermitian(0, 1) = 0.3;
    CHECK(thrownKind([&] { DensityMatrix d(notHermitian); }) == ErrorKind::Validation);

    Mat negative(2, 2);
    negative << 1.2, 0, 0, -0.2;
    CHECK(thrownKind([&] { DensityMatrix d(negative); }) == ErrorKind::Validation);

    CHECK(thrownKind([&] { DensityMatrix d(m, {3}); }) == ErrorKind::Validation);
}

TEST_CASE("entropies of simple states") {
    CHECK_NEAR(shannonEntropy({0.5, 0.5}), 1.0, 1e-15);
    CHECK_NEAR(shannonEntropy({1.0, 0.0}), 0.0, 1e-15);
    CHECK_NEAR(vonNeumannEntropy(DensityMatrix(Mat::Identity(4, 4) / 4.0)), 2.0, 1e-12);
    CHECK_NEAR(vonNeumannEntropy(DensityMatrix::fromPure(PureState(ketPlus()))), 0.0, 1e-12);
}

TEST_CASE("tensor and partial trace") {
    DensityMatrix bell(bellProjector(), {2, 2});
    DensityMatrix half = partialTrace(bell, {0});
    CHECK((half.matrix() - Mat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-14);

    DensityMatrix a = DensityMatrix::fromPure(PureState(basisKet(2, 0)));
    DensityMatrix b(Mat::Identity(3, 3) / 3.0);
    DensityMatrix ab = tensor(a, b);
    CHECK(ab.dims() == std::vector<int>{2, 3});
    CHECK((partialTrace(ab, {1}).matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((partialTrace(ab, {0}).matrix() - a.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("relative entropy, conditional entropy and mutual information") {
    DensityMatrix mixed(Mat::Identity(2, 2) / 2.0);
    DensityMatrix zero = DensityMatrix::fromPure(PureState(basisKet(2, 0)));
    CHECK_NEAR(quantumRelativeEntropy(mixed, mixed), 0.0, 1e-12);
    CHECK_NEAR(quantumRelativeEntropy(zero, mixed), 1.0, 1e-12);
    CHECK(std::isinf(quantumRelativeEntropy(mixed, zero)));

    DensityMatrix bell(bellProjector(), {2, 2});
    CHECK_NEAR(conditionalQuantumEntropy(bell, {0}, {1}), -1.0, 1e-12);
    CHECK_NEAR(quantumMutualInformation(bell, {0}, {1}), 2.0, 1e-12);
    CHECK(thrownKind([&] { quantumMutualInformation(bell, {0}, {0}); }) == ErrorKind::Domain);
}

TEST_CASE("ensemble spectrum matches dense eigenvalues") {
    std::mt19937_64 g(11);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 5; ++trial) {
        WeightedEnsemble e;
        const int d = 8;
        for (int k = 0; k < 5; ++k) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v(i) = cplx(n(g), n(g));
            e.states.push_back(v / v.norm());
            e.probs.push_back(0.2);
        }
        RVec gram = ensembleSpectrum(e);
        RVec dense = hermitianEigenvalues(e.density());
        CHECK_NEAR(entropyOfSpectrum(gram), entropyOfSpectrum(dense), 1e-10);
        CHECK_NEAR(gram.sum(), 1.0, 1e-12);
    }
}

TEST_CASE("kets") {
    CHECK((ketPsi(0) - basisKet(2, 0)).norm() < 1e-15);
    CHECK((ketPsi(M_PI / 2) - ketPlus()).norm() < 1e-15);
    CHECK(std::abs(ketPlus().dot(ketMinus())) < 1e-15);
}
