#include "qproc/qcore.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qproc {

Caps& caps() {
    static Caps c;
    return c;
}

PureState::PureState(Vec a) : amp(std::move(a)) {
    if (amp.size() == 0) throw validationError("pure state must have positive dimension");
    if (std::abs(amp.squaredNorm() - 1.0) > kStateTol)
        throw validationError("pure state is not normalized (|psi|^2 = " +
                              std::to_string(amp.squaredNorm()) + ")");
}

namespace {

long long product(const std::vector<int>& dims) {
    long long p = 1;
    for (int d : dims) p *= d;
    return p;
}

double maxAbs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

DensityMatrix::DensityMatrix(const Mat& m, std::vector<int> dims) : dims_(std::move(dims)) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw validationError("density matrix must be square and nonempty");
    if (product(dims_) != m.rows())
        throw validationError("subsystem dimensions do not multiply to matrix size");
    if (maxAbs(m - m.adjoint()) > kStateTol) throw validationError("density matrix is not Hermitian");
    m_ = 0.5 * (m + m.adjoint());
    if (std::abs(m_.trace().real() - 1.0) > kStateTol)
        throw validationError("density matrix trace is not 1");
    RVec ev = hermitianEigenvalues(m_);
    if (ev.minCoeff() < -kStateTol) throw validationError("density matrix is not positive semidefinite");
}

DensityMatrix::DensityMatrix(const Mat& m) : DensityMatrix(m, {static_cast<int>(m.rows())}) {}

DensityMatrix DensityMatrix::fromPure(const PureState& psi) {
    return DensityMatrix(psi.projector(), {psi.dim()});
}

void WeightedEnsemble::validate() const {
    if (probs.empty()) throw domainError("empty ensemble");
    if (probs.size() != states.size()) throw validationError("ensemble size mismatch");
    double total = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] > 0)) throw validationError("ensemble weights must be positive");
        if (states[i].size() != states[0].size()) throw validationError("ensemble dims differ");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw validationError("ensemble weights do not sum to 1");
}

Mat WeightedEnsemble::density() const {
    const int d = dim();
    Mat psi(d, static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) psi.col(i) = std::sqrt(probs[i]) * states[i];
    return psi * psi.adjoint();
}

Vec basisKet(int d, int i) {
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    return v;
}

Vec ketPsi(double phi) {
    Vec v(2);
    v << std::cos(phi / 2), std::sin(phi / 2);
    return v;
}

Vec ketPlus() { return ketPsi(M_PI / 2); }
Vec ketMinus() {
    Vec v(2);
    v << M_SQRT1_2, -M_SQRT1_2;
    return v;
}

PureState tensor(const PureState& a, const PureState& b) {
    Vec out(a.amp.size() * b.amp.size());
    for (Eigen::Index i = 0; i < a.amp.size(); ++i)
        out.segment(i * b.amp.size(), b.amp.size()) = a.amp(i) * b.amp;
    return PureState(out);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    const Mat& x = a.matrix();
    const Mat& y = b.matrix();
    Mat out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return DensityMatrix(out, dims);
}

DensityMatrix partialTrace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const auto& dims = rho.dims();
    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw domainError("partial trace index out of range");
        if (kept[k]) throw domainError("duplicate partial trace index");
        kept[k] = true;
    }
    std::vector<int> keptDims;
    for (int k = 0; k < n; ++k)
        if (kept[k]) keptDims.push_back(dims[k]);
    if (keptDims.empty()) throw domainError("partial trace must keep at least one subsystem");

    const long long D = rho.size();
    std::vector<long long> keepIdx(D), traceIdx(D);
    for (long long i = 0; i < D; ++i) {
        long long rem = i, ki = 0, ti = 0, kstride = 1, tstride = 1;
        for (int k = n - 1; k >= 0; --k) {
            const long long digit = rem % dims[k];
            rem /= dims[k];
            if (kept[k]) {
                ki += digit * kstride;
                kstride *= dims[k];
            } else {
                ti += digit * tstride;
                tstride *= dims[k];
            }
        }
        keepIdx[i] = ki;
        traceIdx[i] = ti;
    }
    const long long Dk = product(keptDims);
    Mat out = Mat::Zero(Dk, Dk);
    const Mat& m = rho.matrix();
    for (long long i = 0; i < D; ++i)
        for (long long j = 0; j < D; ++j)
            if (traceIdx[i] == traceIdx[j]) out(keepIdx[i], keepIdx[j]) += m(i, j);
    return DensityMatrix(out, keptDims);
}

RVec hermitianEigenvalues(const Mat& m) {
    bool real = true;
    for (Eigen::Index i = 0; i < m.size() && real; ++i)
        if (m.data()[i].imag() != 0.0) real = false;
    if (real) {
        Eigen::SelfAdjointEigenSolver<RMat> es(m.real(), Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double shannonEntropy(const std::vector<double>& p) {
    double h = 0;
    for (double x : p)
        if (x > 0) h -= x * std::log2(x);
    return h;
}

double entropyOfSpectrum(const RVec& lambda) {
    double h = 0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double x = lambda(i);
        if (x > kEigClamp) h -= x * std::log2(x);
    }
    return h;
}

double vonNeumannEntropy(const DensityMatrix& rho) {
    return entropyOfSpectrum(hermitianEigenvalues(rho.matrix()));
}

double quantumRelativeEntropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.size() != sigma.size()) throw domainError("relative entropy dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> er(rho.matrix());
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma.matrix());
    const RVec& lr = er.eigenvalues();
    const RVec& ls = es.eigenvalues();
    // overlap(i,j) = |<r_i|s_j>|^2
    const RMat overlap = (er.eigenvectors().adjoint() * es.eigenvectors()).cwiseAbs2();
    double value = 0;
    for (Eigen::Index i = 0; i < lr.size(); ++i) {
        if (lr(i) <= kEigClamp) continue;
        value += lr(i) * std::log2(lr(i));
        for (Eigen::Index j = 0; j < ls.size(); ++j) {
            if (overlap(i, j) <= kSupportTol) continue;
            if (ls(j) <= kSupportTol) return std::numeric_limits<double>::infinity();
            value -= lr(i) * overlap(i, j) * std::log2(ls(j));
        }
    }
    return value;
}

namespace {

void checkPartition(const DensityMatrix& rho, const std::vector<int>& a, const std::vector<int>& b) {
    const int n = static_cast<int>(rho.dims().size());
    std::vector<int> seen(n, 0);
    for (int i : a) {
        if (i < 0 || i >= n) throw domainError("partition index out of range");
        ++seen[i];
    }
    for (int i : b) {
        if (i < 0 || i >= n) throw domainError("partition index out of range");
        ++seen[i];
    }
    for (int s : seen)
        if (s != 1) throw domainError("partition must cover subsystems disjointly");
    if (a.empty() || b.empty()) throw domainError("partition parts must be nonempty");
}

} // namespace

double conditionalQuantumEntropy(const DensityMatrix& rhoAB, const std::vector<int>& a,
                                 const std::vector<int>& b) {
    checkPartition(rhoAB, a, b);
    return vonNeumannEntropy(rhoAB) - vonNeumannEntropy(partialTrace(rhoAB, b));
}

double quantumMutualInformation(const DensityMatrix& rhoAB, const std::vector<int>& a,
                                const std::vector<int>& b) {
    checkPartition(rhoAB, a, b);
    return vonNeumannEntropy(partialTrace(rhoAB, a)) + vonNeumannEntropy(partialTrace(rhoAB, b)) -
           vonNeumannEntropy(rhoAB);
}

RVec gramSpectrum(const Mat& gram) {
    RVec ev = hermitianEigenvalues(gram);
    std::vector<double> kept;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > kEigClamp) kept.push_back(ev(i));
    std::sort(kept.begin(), kept.end(), std::greater<>());
    return Eigen::Map<RVec>(kept.data(), static_cast<Eigen::Index>(kept.size()));
}

RVec ensembleSpectrum(const WeightedEnsemble& ens) {
    ens.validate();
    const auto n = static_cast<Eigen::Index>(ens.probs.size());
    Mat g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const cplx v = std::sqrt(ens.probs[i] * ens.probs[j]) * ens.states[i].dot(ens.states[j]);
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
    return gramSpectrum(g);
}

} // namespace qproc
