#include "qproc/classical.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qproc {

void Alphabet::validate() const {
    if (symbols.empty()) throw validationError("alphabet must be nonempty");
    std::set<std::string> seen(symbols.begin(), symbols.end());
    if (seen.size() != symbols.size()) throw validationError("alphabet has duplicate symbols");
}

int Alphabet::index(const std::string& s) const {
    auto it = std::find(symbols.begin(), symbols.end(), s);
    return it == symbols.end() ? -1 : static_cast<int>(it - symbols.begin());
}

std::string Alphabet::render(const Word& w) const {
    bool single = std::all_of(symbols.begin(), symbols.end(),
                              [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i) out += ' ';
        out += symbols[w[i]];
    }
    return out;
}

double WordDistribution::prob(const Word& w) const {
    auto it = std::lower_bound(words.begin(), words.end(), w);
    if (it == words.end() || *it != w) return 0.0;
    return probs[it - words.begin()];
}

namespace {

WordDistribution collapse(std::map<Word, double>& acc, int length) {
    WordDistribution out;
    out.length = length;
    for (auto& [w, p] : acc) {
        out.words.push_back(w);
        out.probs.push_back(p);
    }
    return out;
}

} // namespace

WordDistribution WordDistribution::dropLast() const {
    if (length == 0) throw domainError("cannot marginalize an empty word");
    std::map<Word, double> acc;
    for (std::size_t i = 0; i < words.size(); ++i)
        acc[Word(words[i].begin(), words[i].end() - 1)] += probs[i];
    return collapse(acc, length - 1);
}

WordDistribution WordDistribution::dropFirst() const {
    if (length == 0) throw domainError("cannot marginalize an empty word");
    std::map<Word, double> acc;
    for (std::size_t i = 0; i < words.size(); ++i)
        acc[Word(words[i].begin() + 1, words[i].end())] += probs[i];
    return collapse(acc, length - 1);
}

void WordDistribution::validate() const {
    double total = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < 0) throw validationError("negative word probability");
        if (static_cast<int>(words[i].size()) != length) throw validationError("word length mismatch");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw validationError("word probabilities do not sum to 1");
}

RMat HMC::total() const {
    RMat m = RMat::Zero(numStates(), numStates());
    for (const auto& t : T) m += t;
    return m;
}

void HMC::validate() const {
    alphabet.validate();
    if (states.empty()) throw validationError("HMC needs at least one state");
    if (static_cast<int>(T.size()) != alphabet.size())
        throw validationError("one transition matrix per symbol is required");
    for (const auto& t : T) {
        if (t.rows() != numStates() || t.cols() != numStates())
            throw validationError("transition matrix has wrong shape");
        if (t.minCoeff() < 0) throw validationError("transition probabilities must be nonnegative");
    }
    RVec rows = total().rowwise().sum();
    for (int i = 0; i < numStates(); ++i)
        if (std::abs(rows(i) - 1.0) > 1e-10)
            throw validationError("transition matrices are not row-stochastic at state " + states[i]);
}

RVec hmcStationary(const HMC& m) {
    const RMat P = m.total();
    const int n = m.numStates();
    Eigen::EigenSolver<RMat> es(P.transpose());
    int unit = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0)) < 1e-8) ++unit;
    if (unit != 1) throw validationError("non-ergodic source: stationary distribution is not unique");
    RMat A(n + 1, n);
    A.topRows(n) = P.transpose() - RMat::Identity(n, n);
    A.row(n).setOnes();
    RVec b = RVec::Zero(n + 1);
    b(n) = 1.0;
    RVec pi = A.colPivHouseholderQr().solve(b);
    for (int i = 0; i < n; ++i)
        if (pi(i) < 0) pi(i) = 0;
    return pi / pi.sum();
}

namespace {

void checkWordCap(int alphabetSize, int length) {
    double count = std::pow(static_cast<double>(alphabetSize), length);
    if (count > static_cast<double>(caps().wordCount))
        throw capError("word enumeration |X|^l = " + std::to_string(static_cast<long long>(count)) +
                       " exceeds cap " + std::to_string(caps().wordCount));
}

} // namespace

WordDistribution hmcWordDistribution(const HMC& m, int length, const std::optional<RVec>& init) {
    if (length < 0) throw domainError("word length must be nonnegative");
    checkWordCap(m.alphabet.size(), length);
    const RVec start = init ? *init : hmcStationary(m);
    std::vector<std::pair<Word, RVec>> cur{{Word{}, start.transpose()}};
    for (int t = 0; t < length; ++t) {
        std::vector<std::pair<Word, RVec>> next;
        for (const auto& [w, a] : cur)
            for (int x = 0; x < m.alphabet.size(); ++x) {
                RVec b = (a.transpose() * m.T[x]).transpose();
                if (b.sum() < 1e-14) continue;
                Word w2 = w;
                w2.push_back(x);
                next.emplace_back(std::move(w2), std::move(b));
            }
        cur = std::move(next);
    }
    WordDistribution out;
    out.length = length;
    for (auto& [w, a] : cur) {
        out.words.push_back(w);
        out.probs.push_back(a.sum());
    }
    return out;
}

std::vector<WordDistribution> hmcWordDistributions(const HMC& m, int L) {
    std::vector<WordDistribution> out;
    for (int l = 0; l <= L; ++l) out.push_back(hmcWordDistribution(m, l));
    return out;
}

std::string MarkovOrder::describe() const {
    return detected ? std::to_string(value) : "> " + std::to_string(value);
}

MarkovOrder detectMarkovOrder(const std::vector<double>& rate, double eps) {
    const int L = static_cast<int>(rate.size()) - 1;
    MarkovOrder mo;
    for (int R = 0; R + 1 <= L; ++R) {
        bool ok = true;
        for (int m = R; m <= L && ok; ++m) ok = std::abs(rate[m] - rate[L]) < eps;
        if (ok) {
            mo.detected = true;
            mo.value = R;
            return mo;
        }
    }
    mo.value = std::max(L - 1, 0);
    return mo;
}

EntropyCurveMeasures entropyCurveMeasures(const std::vector<double>& B, double logBase) {
    const int L = static_cast<int>(B.size()) - 1;
    EntropyCurveMeasures c;
    c.d.assign(L + 1, 0.0);
    c.d2.assign(L + 1, 0.0);
    c.rate.assign(L + 1, 0.0);
    c.E.assign(L + 1, 0.0);
    c.T.assign(L + 1, 0.0);
    c.Tplain.assign(L + 1, 0.0);
    c.d[0] = logBase;
    for (int l = 1; l <= L; ++l) {
        c.d[l] = B[l] - B[l - 1];
        c.d2[l] = c.d[l] - c.d[l - 1];
    }
    c.rate = c.d;
    for (int l = 1; l <= L; ++l) {
        c.E[l] = B[l] - l * c.rate[l];
        double plain = 0;
        for (int m = 1; m < l; ++m) plain += m * (c.rate[m] - c.rate[l]);
        c.Tplain[l] = plain;
        // boundary rate d(0) stands in for d(1) in the m = 1 term
        c.T[l] = l >= 2 ? plain + (c.d[0] - c.d[1]) : 0.0;
    }
    for (int l = 0; 2 * l <= L; ++l) c.Emi.push_back(2 * B[l] - B[2 * l]);
    return c;
}

ClassicalMeasureTable classicalMeasures(const std::vector<WordDistribution>& dists, int alphabetSize,
                                        double eps, bool checkConsistency) {
    if (dists.size() < 2) throw domainError("classical measures need L >= 1");
    if (alphabetSize < 1) throw domainError("alphabet size must be positive");
    const int L = static_cast<int>(dists.size()) - 1;
    ClassicalMeasureTable t;
    t.L = L;
    t.logAlphabet = std::log2(static_cast<double>(alphabetSize));
    for (int l = 0; l <= L; ++l) {
        if (dists[l].length != l) throw validationError("distribution family is not indexed by length");
        dists[l].validate();
        if (checkConsistency && l >= 1) {
            WordDistribution m = dists[l].dropLast();
            for (std::size_t i = 0; i < m.words.size(); ++i)
                if (std::abs(m.probs[i] - dists[l - 1].prob(m.words[i])) > 1e-9)
                    throw validationError("inconsistent marginals at length " + std::to_string(l));
        }
        t.H.push_back(dists[l].entropy());
    }
    auto c = entropyCurveMeasures(t.H, t.logAlphabet);
    t.dH = c.d;
    t.d2H = c.d2;
    t.hmu = c.rate;
    t.E = c.E;
    t.T = c.T;
    t.Tplain = c.Tplain;
    t.Emi = c.Emi;
    t.hmuHat = t.hmu[L];
    t.EHat = t.E[L];
    t.THat = t.T[L];
    t.R = t.logAlphabet - t.hmuHat;
    t.G = -t.R;
    t.order = detectMarkovOrder(t.hmu, eps);
    return t;
}

} // namespace qproc
