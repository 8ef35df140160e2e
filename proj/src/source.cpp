#include "qproc/source.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <set>

namespace qproc {

void QuantumAlphabet::validate() const {
    if (dim < 1) throw validationError("alphabet dimension must be positive");
    if (names.size() != states.size() || names.empty())
        throw validationError("alphabet needs one state per name");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw validationError("alphabet state names must be distinct");
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != dim)
            throw validationError("alphabet state '" + names[i] + "' has the wrong dimension");
        PureState check(states[i]);
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(states[i].dot(states[j])) > 1 - 1e-10)
                throw validationError("alphabet states '" + names[j] + "' and '" + names[i] +
                                      "' are the same ray");
    }
}

Mat QuantumAlphabet::overlaps() const {
    const auto n = static_cast<Eigen::Index>(states.size());
    Mat o(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) o(i, j) = states[i].dot(states[j]);
    return o;
}

bool QuantumAlphabet::orthogonal(double tol) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(states[i].dot(states[j])) > tol) return false;
    return true;
}

Source buildSource(const HMC& hmc, const QuantumAlphabet& alphabet, std::string name) {
    hmc.validate();
    alphabet.validate();
    if (hmc.alphabet.symbols != alphabet.names)
        throw validationError("HMC symbols and quantum alphabet names do not match");
    Source s;
    s.name = std::move(name);
    s.hmc = hmc;
    s.alphabet = alphabet;
    s.pi = hmcStationary(hmc);
    return s;
}

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
        if (r > (1LL << 40)) return r;
    }
    return r;
}

Vec wordKet(const Source& src, const Word& w) {
    Vec v = Vec::Ones(1);
    for (int x : w) {
        const Vec& k = src.ket(x);
        Vec out(v.size() * k.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) out.segment(i * k.size(), k.size()) = v(i) * k;
        v = std::move(out);
    }
    return v;
}

} // namespace

BlockState blockState(const Source& src, int length, bool materialize) {
    BlockState b;
    b.length = length;
    b.words = hmcWordDistribution(src.hmc, length, src.pi);
    for (std::size_t i = 0; i < b.words.words.size(); ++i) {
        b.ensemble.probs.push_back(b.words.probs[i]);
        b.ensemble.states.push_back(wordKet(src, b.words.words[i]));
    }
    const long long D = ipow(src.dim(), length);
    if (materialize && D <= caps().denseDim) {
        std::vector<int> dims(length, src.dim());
        if (dims.empty()) dims.push_back(1);
        b.dense = DensityMatrix(b.ensemble.density(), dims);
    }
    return b;
}

double blockEntropy(const Source& src, const WordDistribution& words) {
    const int length = words.length;
    if (src.alphabet.orthogonal()) return words.entropy();
    const auto N = static_cast<Eigen::Index>(words.words.size());
    const long long D = ipow(src.dim(), length);

    if (N > D && D <= caps().denseDim) {
        Mat psi(D, N);
        for (Eigen::Index i = 0; i < N; ++i)
            psi.col(i) = std::sqrt(words.probs[i]) * wordKet(src, words.words[i]);
        return entropyOfSpectrum(hermitianEigenvalues(psi * psi.adjoint()));
    }

    if (N > 8192)
        throw capError("block of length " + std::to_string(length) + " has " + std::to_string(N) +
                       " support words; Gram matrix exceeds 8192 and d^l exceeds the dense cap");
    const Mat O = src.alphabet.overlaps();
    std::vector<int> parent(N);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    Mat G(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        G(i, i) = words.probs[i];
        for (Eigen::Index j = 0; j < i; ++j) {
            cplx v = std::sqrt(words.probs[i] * words.probs[j]);
            for (int t = 0; t < length && v != 0.0; ++t) {
                const cplx o = O(words.words[i][t], words.words[j][t]);
                v = std::abs(o) < 1e-15 ? 0.0 : v * o;
            }
            G(i, j) = v;
            G(j, i) = std::conj(v);
            if (v != 0.0) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
    }
    std::map<int, std::vector<Eigen::Index>> comps;
    for (Eigen::Index i = 0; i < N; ++i) comps[find(static_cast<int>(i))].push_back(i);
    double h = 0;
    for (const auto& [root, idx] : comps) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        Mat g(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index c = 0; c < n; ++c) g(a, c) = G(idx[a], idx[c]);
        h += entropyOfSpectrum(hermitianEigenvalues(g));
    }
    return h;
}

double blockEntropy(const Source& src, int length) {
    return blockEntropy(src, hmcWordDistribution(src.hmc, length, src.pi));
}

UnifilarityReport isQuantumUnifilar(const Source& src, double tol) {
    UnifilarityReport r;
    const int n = src.hmc.numStates();
    const int d = src.dim();
    r.witness.resize(n);
    for (int i = 0; i < n; ++i) {
        std::map<int, std::vector<int>> bySucc;
        for (int x = 0; x < src.hmc.alphabet.size(); ++x)
            for (int j = 0; j < n; ++j)
                if (src.hmc.T[x](i, j) > 0) bySucc[j].push_back(x);
        for (auto a = bySucc.begin(); a != bySucc.end(); ++a)
            for (auto b = std::next(a); b != bySucc.end(); ++b)
                for (int x : a->second)
                    for (int y : b->second)
                        if (std::abs(src.ket(x).dot(src.ket(y))) > tol) {
                            r.unifilar = false;
                            if (r.counterexample.empty())
                                r.counterexample = "state " + src.hmc.states[i] + " emits '" +
                                                   src.hmc.alphabet.symbols[x] + "' toward " +
                                                   src.hmc.states[a->first] + " and '" +
                                                   src.hmc.alphabet.symbols[y] + "' toward " +
                                                   src.hmc.states[b->first] +
                                                   ", which are not orthogonal";
                        }
        if (!r.unifilar) continue;
        Mat rest = Mat::Identity(d, d);
        for (const auto& [j, xs] : bySucc) {
            Mat K(d, static_cast<Eigen::Index>(xs.size()));
            for (std::size_t c = 0; c < xs.size(); ++c) K.col(c) = src.ket(xs[c]);
            Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeThinU);
            Mat P = Mat::Zero(d, d);
            for (Eigen::Index c = 0; c < svd.singularValues().size(); ++c)
                if (svd.singularValues()(c) > 1e-9) P += svd.matrixU().col(c) * svd.matrixU().col(c).adjoint();
            r.witness[i][j] = P;
            rest -= P;
        }
        if (rest.norm() > 1e-9) r.witness[i][-1] = rest;
    }
    if (!r.unifilar) r.witness.clear();
    return r;
}

double parseAngle(const std::string& text) {
    auto number = [&](const std::string& t) {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    };
    try {
        const auto pos = text.find("pi");
        if (pos == std::string::npos) return number(text);
        std::string head = text.substr(0, pos);
        std::string tail = text.substr(pos + 2);
        if (!head.empty() && head.back() == '*') head.pop_back();
        double k = head.empty() ? 1.0 : number(head);
        double m = 1.0;
        if (!tail.empty()) {
            if (tail[0] != '/') throw std::invalid_argument(text);
            m = number(tail.substr(1));
        }
        return k * M_PI / m;
    } catch (const std::exception&) {
        throw validationError("not an angle: '" + text + "'");
    }
}

Vec namedKet(const std::string& name, int dim, double phi) {
    if (name == "+" || name == "-") {
        if (dim < 2) throw validationError("'" + name + "' needs dimension >= 2");
        Vec v = Vec::Zero(dim);
        v(0) = M_SQRT1_2;
        v(1) = name == "+" ? M_SQRT1_2 : -M_SQRT1_2;
        return v;
    }
    if (name == "f") {
        if (dim != 2) throw validationError("psi(phi) is a qubit state");
        return ketPsi(phi);
    }
    if (name.size() == 1 && name[0] >= '0' && name[0] <= '9') {
        int i = name[0] - '0';
        if (i >= dim) throw validationError("basis state |" + name + "> exceeds dimension");
        return basisKet(dim, i);
    }
    throw validationError("unknown state name '" + name + "'");
}

namespace {

std::string angleSymbol(double phi) {
    if (std::abs(phi - M_PI / 2) < 1e-12) return "+";
    if (std::abs(phi - M_PI) < 1e-12) return "1";
    return "f";
}

RMat zeros(int n) { return RMat::Zero(n, n); }

void checkUnit(double v, const char* what) {
    if (!(v >= 0 && v <= 1)) throw validationError(std::string(what) + " must lie in [0, 1]");
}

void checkAngle(double v) {
    if (!(v >= 0 && v <= M_PI)) throw validationError("phi must lie in [0, pi]");
}

} // namespace

Source qgm(double phi) {
    checkAngle(phi);
    HMC h;
    h.states = {"A", "B"};
    const std::string f = angleSymbol(phi);
    h.alphabet.symbols = {"0", f};
    RMat t0 = zeros(2), t1 = zeros(2);
    t0(0, 0) = 0.5;
    t0(1, 0) = 1.0;
    t1(0, 1) = 0.5;
    h.T = {t0, t1};
    QuantumAlphabet q{2, {"0", f}, {basisKet(2, 0), ketPsi(phi)}};
    return buildSource(h, q, "qgm");
}

Source threeSymbolQgm() {
    HMC h;
    h.states = {"A", "B"};
    h.alphabet.symbols = {"0", "1", "+"};
    RMat t0 = zeros(2), t1 = zeros(2), tp = zeros(2);
    t0(0, 0) = 0.5;
    t1(0, 1) = 0.5;
    tp(1, 0) = 1.0;
    h.T = {t0, t1, tp};
    QuantumAlphabet q{2, {"0", "1", "+"}, {basisKet(2, 0), basisKet(2, 1), ketPlus()}};
    return buildSource(h, q, "3symbol-qgm");
}

Source iidSource(const std::vector<std::pair<double, Vec>>& ensemble, const std::vector<std::string>& names) {
    HMC h;
    h.states = {"A"};
    QuantumAlphabet q;
    q.dim = static_cast<int>(ensemble.front().second.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        if (ensemble[i].first <= 0) continue;
        h.alphabet.symbols.push_back(names[i]);
        RMat t(1, 1);
        t(0, 0) = ensemble[i].first;
        h.T.push_back(t);
        q.names.push_back(names[i]);
        q.states.push_back(ensemble[i].second);
    }
    return buildSource(h, q, "iid");
}

Source periodicSource(const std::string& word, double phi) {
    checkAngle(phi);
    if (word.empty()) throw validationError("periodic word must be nonempty");
    const int p = static_cast<int>(word.size());
    HMC h;
    QuantumAlphabet q;
    q.dim = 2;
    for (int i = 0; i < p; ++i) h.states.push_back("s" + std::to_string(i));
    for (char c : word) {
        std::string s(1, c);
        if (h.alphabet.index(s) < 0) {
            h.alphabet.symbols.push_back(s);
            h.T.push_back(zeros(p));
            q.names.push_back(s);
            q.states.push_back(namedKet(s, 2, phi));
        }
    }
    for (int i = 0; i < p; ++i) h.T[h.alphabet.index(std::string(1, word[i]))](i, (i + 1) % p) = 1.0;
    return buildSource(h, q, "period");
}

Source unifilarQubit(double p) {
    checkUnit(p, "p");
    HMC h;
    h.states = {"A", "B"};
    h.alphabet.symbols = {"0", "1", "+", "-"};
    RMat t0 = zeros(2), t1 = zeros(2), tp = zeros(2), tm = zeros(2);
    t0(0, 1) = 1 - p;
    t1(0, 0) = p;
    tp(1, 0) = 1 - p;
    tm(1, 1) = p;
    h.T = {t0, t1, tp, tm};
    QuantumAlphabet q{2, {"0", "1", "+", "-"}, {basisKet(2, 0), basisKet(2, 1), ketPlus(), ketMinus()}};
    return buildSource(h, q, "unifilar");
}

Source nonunifilarQubit(double p) {
    checkUnit(p, "p");
    HMC h;
    h.states = {"A", "B"};
    h.alphabet.symbols = {"0", "1", "+", "-"};
    RMat t0 = zeros(2), t1 = zeros(2), tp = zeros(2), tm = zeros(2);
    t0(0, 1) = 1 - p;
    tp(0, 0) = p;
    t1(1, 0) = 1 - p;
    tm(1, 1) = p;
    h.T = {t0, t1, tp, tm};
    QuantumAlphabet q{2, {"0", "1", "+", "-"}, {basisKet(2, 0), basisKet(2, 1), ketPlus(), ketMinus()}};
    return buildSource(h, q, "nonunifilar");
}

Source unifilarQutrit() {
    HMC h;
    h.states = {"A", "B", "C"};
    h.alphabet.symbols = {"0", "1", "+", "-", "2"};
    RMat t0 = zeros(3), t1 = zeros(3), tp = zeros(3), tm = zeros(3), t2 = zeros(3);
    t0(0, 0) = 0.5;
    t1(0, 1) = 0.5;
    tp(1, 1) = 0.5;
    tm(1, 2) = 0.5;
    t2(2, 0) = 1.0;
    h.T = {t0, t1, tp, tm, t2};
    QuantumAlphabet q{3, h.alphabet.symbols, {}};
    for (const auto& s : q.names) q.states.push_back(namedKet(s, 3, 0));
    return buildSource(h, q, "qutrit");
}

namespace {

double num(const Params& p, const std::string& key, double def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    if (key == "phi") return parseAngle(it->second);
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw validationError("parameter '" + key + "' is not a number: " + it->second);
    }
}

std::string str(const Params& p, const std::string& key, const std::string& def) {
    auto it = p.find(key);
    return it == p.end() ? def : it->second;
}

void allowOnly(const Params& p, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* a : keys) ok = ok || k == a;
        if (!ok) throw validationError("unknown preset parameter '" + k + "'");
    }
}

} // namespace

std::vector<std::string> presetNames() {
    return {"iid", "period", "period5", "qgm", "3symbol-qgm", "unifilar", "nonunifilar", "qutrit"};
}

Source makePreset(const std::string& name, const Params& params) {
    if (name == "qgm") {
        allowOnly(params, {"phi"});
        return qgm(num(params, "phi", M_PI / 2));
    }
    if (name == "3symbol-qgm") {
        allowOnly(params, {});
        return threeSymbolQgm();
    }
    if (name == "iid") {
        allowOnly(params, {"state", "p", "phi"});
        const std::string state = str(params, "state", "");
        if (!state.empty()) {
            if (params.count("p") || params.count("phi"))
                throw validationError("iid state=... takes no p or phi");
            if (state == "mixed") return iidSource({{0.5, basisKet(2, 0)}, {0.5, basisKet(2, 1)}}, {"0", "1"});
            if (state == "pure") return iidSource({{1.0, basisKet(2, 0)}}, {"0"});
            throw validationError("iid state must be mixed or pure");
        }
        const double p = num(params, "p", 0.5);
        const double phi = num(params, "phi", M_PI);
        checkUnit(p, "p");
        checkAngle(phi);
        if (p == 0) return iidSource({{1.0, basisKet(2, 0)}}, {"0"});
        if (p == 1) return iidSource({{1.0, ketPsi(phi)}}, {angleSymbol(phi)});
        return iidSource({{1 - p, basisKet(2, 0)}, {p, ketPsi(phi)}}, {"0", angleSymbol(phi)});
    }
    if (name == "period" || name == "period5") {
        allowOnly(params, {"word", "phi"});
        const bool five = name == "period5";
        const std::string word = str(params, "word", five ? "0000f" : "00f");
        if (five && word.size() != 5) throw validationError("period5 word must have length 5");
        return periodicSource(word, num(params, "phi", five ? 3 * M_PI / 4 : M_PI));
    }
    if (name == "unifilar") {
        allowOnly(params, {"p"});
        return unifilarQubit(num(params, "p", 1.0 / 3));
    }
    if (name == "nonunifilar") {
        allowOnly(params, {"p"});
        return nonunifilarQubit(num(params, "p", 1.0 / 3));
    }
    if (name == "qutrit") {
        allowOnly(params, {});
        return unifilarQutrit();
    }
    throw validationError("unknown preset '" + name + "'");
}

} // namespace qproc
