#include "qproc/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qproc/qmeasures.hpp"

namespace qproc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// 53-bit uniform in [0, 1); identical on every platform for a given mt19937_64 stream
double uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

template <class F>
int drawIndex(std::mt19937_64& g, int n, F weight) {
    double total = 0;
    for (int i = 0; i < n; ++i) total += weight(i);
    double u = uniform(g) * total;
    int last = -1;
    for (int i = 0; i < n; ++i) {
        const double w = weight(i);
        if (w <= 0) continue;
        last = i;
        if (u < w) return i;
        u -= w;
    }
    return last;
}

const Mat& pauli(int a) {
    static const Mat sx = (Mat(2, 2) << 0, 1, 1, 0).finished();
    static const Mat sy = (Mat(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished();
    static const Mat sz = (Mat(2, 2) << 1, 0, 0, -1).finished();
    static const Mat id = Mat::Identity(2, 2);
    switch (a) {
    case 0: return sx;
    case 1: return sy;
    case 2: return sz;
    default: return id;
    }
}

Mat kron(const Mat& a, const Mat& b) {
    Mat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

RVec projectSimplex(const RVec& v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0, tau = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1) / static_cast<double>(i + 1);
        if (u[i] - t > 0) tau = t;
    }
    return (v.array() - tau).max(0.0).matrix();
}

// Accelerated projected gradient for min ||A p - f||^2 over the probability simplex.
RVec simplexLeastSquares(const RMat& A, const RVec& f, RVec p, int maxIter = 20000) {
    const double lip = std::max(1e-12, Eigen::JacobiSVD<RMat>(A).singularValues()(0));
    const double step = 1.0 / (lip * lip);
    p = projectSimplex(p);
    RVec y = p;
    double t = 1;
    for (int it = 0; it < maxIter; ++it) {
        RVec next = projectSimplex(y - step * A.transpose() * (A * y - f));
        const double tn = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
        y = next + ((t - 1) / tn) * (next - p);
        const double change = (next - p).cwiseAbs().maxCoeff();
        p = std::move(next);
        t = tn;
        if (change < 1e-15) break;
    }
    return p;
}

std::vector<Word> allWords(int base, int length) {
    std::vector<Word> out{Word{}};
    for (int t = 0; t < length; ++t) {
        std::vector<Word> next;
        for (const auto& w : out)
            for (int x = 0; x < base; ++x) {
                Word v = w;
                v.push_back(x);
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

} // namespace

SampleRecord sampleRealizations(const Source& src, const DQMP& proto, int length, int count, std::uint64_t seed,
                                bool keepHidden, const std::optional<RVec>& init) {
    if (length < 0 || count < 0) throw domainError("length and count must be nonnegative");
    MeasuredRecursion rec(src, proto);
    const RVec start = protocolInit(src, proto, init);
    const int n = src.hmc.numStates(), X = src.hmc.alphabet.size();
    SampleRecord out;
    out.seed = seed;
    out.protocol = proto.name;
    out.source = src.name;
    out.length = length;
    out.outcomes = rec.outcomes();
    out.runs.reserve(count);
    for (int r = 0; r < count; ++r) {
        std::mt19937_64 g(splitmix64(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r)));
        int i = drawIndex(g, n, [&](int k) { return start(k); });
        int s = proto.start;
        Word w;
        std::vector<int> path{i};
        for (int t = 0; t < length; ++t) {
            const int pick = drawIndex(g, X * n, [&](int k) { return src.hmc.T[k / n](i, k % n); });
            const int x = pick / n;
            i = pick % n;
            const int y = drawIndex(g, proto.povm[s].size(), [&](int k) { return rec.weight(s, k, x); });
            w.push_back(rec.outcomeIndex(s, y));
            s = rec.next(s, y);
            path.push_back(i);
        }
        out.runs.push_back(std::move(w));
        if (keepHidden) out.hidden.push_back(std::move(path));
    }
    return out;
}

void writeSampleRecord(std::ostream& out, const SampleRecord& rec) {
    nlohmann::ordered_json h;
    h["seed"] = rec.seed;
    h["protocol"] = rec.protocol;
    h["source"] = rec.source;
    h["length"] = rec.length;
    h["count"] = rec.runs.size();
    h["outcomes"] = rec.outcomes.symbols;
    out << h.dump() << '\n';
    for (const auto& w : rec.runs) {
        for (std::size_t t = 0; t < w.size(); ++t) out << (t ? " " : "") << rec.outcomes.symbols[w[t]];
        out << '\n';
    }
}

SampleRecord readSampleRecord(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw validationError("sample record is empty");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw validationError(std::string("sample record header, line 1: ") + e.what());
    }
    SampleRecord rec;
    try {
        rec.seed = h.at("seed").get<std::uint64_t>();
        rec.protocol = h.at("protocol").get<std::string>();
        rec.source = h.at("source").get<std::string>();
        rec.length = h.at("length").get<int>();
        rec.outcomes.symbols = h.at("outcomes").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw validationError(std::string("sample record header, line 1: ") + e.what());
    }
    int lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        std::istringstream ss(line);
        Word w;
        std::string tok;
        while (ss >> tok) {
            const int i = rec.outcomes.index(tok);
            if (i < 0) throw validationError("sample record line " + std::to_string(lineNo) + ": unknown outcome '" + tok + "'");
            w.push_back(i);
        }
        if (static_cast<int>(w.size()) != rec.length)
            throw validationError("sample record line " + std::to_string(lineNo) + ": expected " +
                                  std::to_string(rec.length) + " outcomes");
        rec.runs.push_back(std::move(w));
    }
    return rec;
}

WordDistribution empiricalDistribution(const SampleRecord& rec, int length) {
    if (length < 0 || length > rec.length) throw domainError("length exceeds the recorded run length");
    if (rec.runs.empty()) throw domainError("sample record has no runs");
    std::map<Word, long long> counts;
    for (const auto& w : rec.runs) ++counts[Word(w.begin(), w.begin() + length)];
    WordDistribution d;
    d.length = length;
    for (const auto& [w, c] : counts) {
        d.words.push_back(w);
        d.probs.push_back(static_cast<double>(c) / static_cast<double>(rec.runs.size()));
    }
    return d;
}

DensityMatrix physicalProjection(const Mat& m, std::vector<int> dims) {
    const Mat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    if (ev.sum() <= 0) throw domainError("projection of a matrix with no positive spectrum");
    ev /= ev.sum();
    Mat r = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    if (dims.empty()) dims = {static_cast<int>(m.rows())};
    return DensityMatrix(r, dims);
}

DensityMatrix reconstructQubit(double pxPlus, double pyPlus, double pzPlus) {
    for (double p : {pxPlus, pyPlus, pzPlus})
        if (p < 0 || p > 1) throw domainError("probabilities must lie in [0, 1]");
    Eigen::Vector3d r(2 * pxPlus - 1, 2 * pyPlus - 1, 2 * pzPlus - 1);
    if (r.norm() > 1) r /= r.norm();
    Mat m = 0.5 * (Mat::Identity(2, 2) + r(0) * pauli(0) + r(1) * pauli(1) + r(2) * pauli(2));
    return DensityMatrix(m, {2});
}

std::array<double, 3> mubProbabilities(const DensityMatrix& rho) {
    if (rho.size() != 2) throw domainError("mutually unbiased bases are defined here for qubits");
    std::array<double, 3> p{};
    for (int a = 0; a < 3; ++a) p[a] = 0.5 * (1 + (pauli(a) * rho.matrix()).trace().real());
    return p;
}

PairExpectations pauliExpectations(const DensityMatrix& rho2) {
    if (rho2.size() != 4) throw domainError("pair expectations need a two-qubit state");
    PairExpectations e;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) e.corr[a][b] = (kron(pauli(a), pauli(b)) * rho2.matrix()).trace().real();
        const double left = (kron(pauli(a), pauli(3)) * rho2.matrix()).trace().real();
        const double right = (kron(pauli(3), pauli(a)) * rho2.matrix()).trace().real();
        e.single[a] = 0.5 * (left + right);
    }
    return e;
}

DensityMatrix reconstructPair(const PairExpectations& e) {
    Mat m = kron(pauli(3), pauli(3));
    for (int a = 0; a < 3; ++a) {
        if (std::abs(e.single[a]) > 1 + 1e-12) throw domainError("expectations must lie in [-1, 1]");
        m += e.single[a] * (kron(pauli(a), pauli(3)) + kron(pauli(3), pauli(a)));
        for (int b = 0; b < 3; ++b) {
            if (std::abs(e.corr[a][b]) > 1 + 1e-12) throw domainError("expectations must lie in [-1, 1]");
            m += e.corr[a][b] * kron(pauli(a), pauli(b));
        }
    }
    return physicalProjection(0.25 * m, {2, 2});
}

ReconstructionReport knownAlphabetInfer(const WordDistribution& freqs, const Alphabet& outcomeAlphabet, const POVM& m,
                                        const QuantumAlphabet& q, int length) {
    if (length < 1) throw domainError("word length must be at least 1");
    if (freqs.length != length) throw validationError("frequency words have the wrong length");
    if (m.dim != q.dim) throw validationError("instrument and alphabet dimensions differ");
    double total = 0;
    for (double p : freqs.probs) {
        if (p < 0) throw validationError("frequencies must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1) > 1e-6) throw validationError("frequencies must sum to 1");
    const int Y = m.size(), Q = static_cast<int>(q.states.size());
    if (std::pow(static_cast<double>(Y) * Q, length) > 1e8) throw capError("design matrix exceeds the size cap");
    RMat A1(Y, Q);
    for (int y = 0; y < Y; ++y)
        for (int x = 0; x < Q; ++x) A1(y, x) = (q.states[x].adjoint() * m.elements[y] * q.states[x])(0, 0).real();
    const auto ys = allWords(Y, length), xs = allWords(Q, length);
    RMat A(ys.size(), xs.size());
    for (std::size_t r = 0; r < ys.size(); ++r)
        for (std::size_t c = 0; c < xs.size(); ++c) {
            double v = 1;
            for (int t = 0; t < length; ++t) v *= A1(ys[r][t], xs[c][t]);
            A(r, c) = v;
        }
    RVec f(ys.size());
    for (std::size_t r = 0; r < ys.size(); ++r) {
        Word w;
        for (int y : ys[r]) {
            const int i = outcomeAlphabet.index(m.labels[y]);
            if (i < 0) throw validationError("outcome '" + m.labels[y] + "' missing from the frequency alphabet");
            w.push_back(i);
        }
        f(r) = freqs.prob(w);
    }
    ReconstructionReport rep;
    rep.unknowns = static_cast<int>(xs.size());
    Eigen::ColPivHouseholderQR<RMat> qr(A);
    qr.setThreshold(1e-10);
    rep.rank = static_cast<int>(qr.rank());
    rep.unique = rep.rank == rep.unknowns;
    RVec p;
    bool done = false;
    if (rep.unique) {
        p = qr.solve(f);
        if (p.minCoeff() > -1e-10 && std::abs(p.sum() - 1) < 1e-8) {
            p = p.cwiseMax(0.0);
            done = true;
        } else {
            p = simplexLeastSquares(A, f, p);
        }
    } else {
        p = simplexLeastSquares(A, f, RVec::Constant(xs.size(), 1.0 / xs.size()));
        rep.note = "solution not unique: design rank " + std::to_string(rep.rank) + " < " + std::to_string(rep.unknowns);
    }
    if (!done && rep.note.empty()) rep.note = "simplex-constrained least squares";
    rep.words = xs;
    rep.probs.assign(p.data(), p.data() + p.size());
    rep.residual = (A * p - f).norm();
    return rep;
}

Source sourceFromEigendecomposition(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
    HMC hmc;
    hmc.states = {"s"};
    QuantumAlphabet q;
    q.dim = rho.size();
    for (int i = rho.size() - 1; i >= 0; --i) {
        const double lambda = es.eigenvalues()(i);
        if (lambda < 1e-12) continue;
        const std::string name = "e" + std::to_string(q.names.size());
        q.names.push_back(name);
        q.states.push_back(es.eigenvectors().col(i));
        hmc.alphabet.symbols.push_back(name);
        hmc.T.push_back(RMat::Constant(1, 1, lambda));
    }
    double total = 0;
    for (const auto& t : hmc.T) total += t(0, 0);
    for (auto& t : hmc.T) t /= total;
    return buildSource(hmc, q, "eigen");
}

Source sourceFromWordDistribution(const WordDistribution& words, const QuantumAlphabet& q) {
    words.validate();
    const int l = words.length;
    if (l < 1) throw domainError("need words of length at least 1");
    const int X = static_cast<int>(q.states.size());
    HMC hmc;
    hmc.alphabet.symbols = q.names;
    if (l == 1) {
        hmc.states = {"s"};
        for (int x = 0; x < X; ++x) hmc.T.push_back(RMat::Constant(1, 1, words.prob(Word{x})));
        return buildSource(hmc, q, "order-0");
    }
    const WordDistribution head = words.dropLast(), tail = words.dropFirst();
    for (std::size_t i = 0; i < head.words.size(); ++i)
        if (std::abs(head.probs[i] - tail.prob(head.words[i])) > 1e-9)
            throw validationError("word distribution marginals are inconsistent (not stationary)");
    std::map<Word, int> index;
    for (std::size_t i = 0; i < head.words.size(); ++i)
        if (head.probs[i] > 1e-14) {
            index[head.words[i]] = static_cast<int>(hmc.states.size());
            std::string name;
            for (int x : head.words[i]) name += (name.empty() ? "" : ".") + q.names[x];
            hmc.states.push_back(name);
        }
    const int n = static_cast<int>(hmc.states.size());
    hmc.T.assign(X, RMat::Zero(n, n));
    for (std::size_t i = 0; i < words.words.size(); ++i) {
        const Word& w = words.words[i];
        if (words.probs[i] <= 1e-14) continue;
        const Word from(w.begin(), w.end() - 1), to(w.begin() + 1, w.end());
        const int a = index.at(from);
        auto it = index.find(to);
        if (it == index.end()) throw validationError("word distribution marginals are inconsistent (not stationary)");
        hmc.T[w.back()](a, it->second) += words.probs[i] / head.prob(from);
    }
    return buildSource(hmc, q, "order-" + std::to_string(l - 1));
}

PredictiveMeasurement minPredictiveMeasurement(const DensityMatrix& rho2, int thetaPoints, int phiPoints) {
    if (rho2.size() != 4) throw domainError("predictive measurement search needs a two-qubit state");
    if (thetaPoints < 2 || phiPoints < 1) throw domainError("grid too small");
    const Mat& r = rho2.matrix();
    auto conditioned = [&](const Vec& k, double& prob) {
        const Mat P = kron(k * k.adjoint(), Mat::Identity(2, 2));
        const Mat m = P * r * P;
        Mat out = Mat::Zero(2, 2);
        for (int a = 0; a < 2; ++a) out += m.block(2 * a, 2 * a, 2, 2);
        prob = out.trace().real();
        return out;
    };
    auto value = [&](const Vec& k0, const Vec& k1) {
        double v = 0;
        for (const Vec* k : {&k0, &k1}) {
            double p = 0;
            Mat c = conditioned(*k, p);
            if (p > 1e-14) v += p * entropyOfSpectrum(hermitianEigenvalues(c / p));
        }
        return v;
    };
    PredictiveMeasurement best;
    best.value = INFINITY;
    for (int i = 0; i < thetaPoints; ++i) {
        const double th = 0.5 * M_PI * i / (thetaPoints - 1);
        for (int j = 0; j < phiPoints; ++j) {
            const double ph = 2 * M_PI * j / phiPoints;
            Vec k0(2), k1(2);
            k0 << std::cos(th / 2), std::polar(std::sin(th / 2), ph);
            k1 << -std::sin(th / 2), std::polar(std::cos(th / 2), ph);
            const double v = value(k0, k1);
            if (v < best.value - 1e-15) {
                best.value = v;
                best.theta = th;
                best.phi = ph;
            }
            if (i == 0) break;
        }
    }
    Vec k0(2), k1(2);
    k0 << std::cos(best.theta / 2), std::polar(std::sin(best.theta / 2), best.phi);
    k1 << -std::sin(best.theta / 2), std::polar(std::cos(best.theta / 2), best.phi);
    best.pvm = pvmFromKets("Mmin", {"n", "-n"}, {k0, k1});
    best.marginal = vonNeumannEntropy(partialTrace(rho2, {1}));
    return best;
}

IidCost iidCost(const Source& src, int L) {
    IidCost c;
    c.s1 = blockEntropy(src, 1);
    c.rate = quantumMeasures(src, L).sHat;
    c.gap = c.s1 - c.rate;
    return c;
}

} // namespace qproc
