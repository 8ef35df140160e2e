#include "qproc/measurement.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace qproc {

void POVM::validate() const {
    if (elements.empty()) throw validationError("instrument " + name + " has no elements");
    if (labels.size() != elements.size()) throw validationError("instrument " + name + " needs one label per element");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw validationError("instrument " + name + " has duplicate labels");
    Mat sum = Mat::Zero(dim, dim);
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const Mat& e = elements[i];
        if (e.rows() != dim || e.cols() != dim)
            throw validationError("instrument " + name + " element " + labels[i] + " has the wrong size");
        if ((e - e.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw validationError("instrument " + name + " element " + labels[i] + " is not Hermitian");
        if (hermitianEigenvalues(0.5 * (e + e.adjoint())).minCoeff() < -1e-10)
            throw validationError("instrument " + name + " element " + labels[i] + " is not PSD");
        sum += e;
    }
    if ((sum - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-9)
        throw validationError("instrument " + name + " elements do not sum to the identity");
}

bool POVM::isPVM(double tol) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if ((elements[i] * elements[i] - elements[i]).cwiseAbs().maxCoeff() > tol) return false;
        for (std::size_t j = 0; j < i; ++j)
            if ((elements[i] * elements[j]).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

bool POVM::rankOne(double tol) const {
    for (const auto& e : elements) {
        RVec ev = hermitianEigenvalues(e);
        int rank = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) rank += ev(i) > tol;
        if (rank != 1) return false;
    }
    return true;
}

POVM pvmFromKets(const std::string& name, const std::vector<std::string>& labels, const std::vector<Vec>& kets) {
    POVM m;
    m.name = name;
    m.dim = static_cast<int>(kets.front().size());
    m.labels = labels;
    for (const auto& k : kets) m.elements.push_back(k * k.adjoint());
    m.validate();
    return m;
}

POVM instrumentM01() { return pvmFromKets("M01", {"0", "1"}, {basisKet(2, 0), basisKet(2, 1)}); }

POVM instrumentMpm() { return pvmFromKets("Mpm", {"+", "-"}, {ketPlus(), ketMinus()}); }

POVM instrumentMy() {
    Vec a(2), b(2);
    a << M_SQRT1_2, cplx(0, M_SQRT1_2);
    b << M_SQRT1_2, cplx(0, -M_SQRT1_2);
    return pvmFromKets("My", {"+i", "-i"}, {a, b});
}

POVM instrumentMtheta(double theta) {
    POVM m = pvmFromKets("Mtheta", {"psi", "psi+pi"}, {ketPsi(theta), ketPsi(theta + M_PI)});
    char buf[64];
    std::snprintf(buf, sizeof buf, "Mtheta:%.17g", theta);
    m.name = buf;
    return m;
}

POVM instrumentM012() {
    return pvmFromKets("M012", {"0", "1", "2"}, {basisKet(3, 0), basisKet(3, 1), basisKet(3, 2)});
}

POVM instrumentMpm2() {
    return pvmFromKets("Mpm2", {"+", "-", "2"}, {namedKet("+", 3, 0), namedKet("-", 3, 0), basisKet(3, 2)});
}

POVM instrumentSIC() {
    POVM m;
    m.name = "SIC";
    m.dim = 2;
    const double a = 1 / std::sqrt(3.0), b = std::sqrt(2.0 / 3.0);
    std::vector<Vec> phis(4, Vec(2));
    phis[0] << 1, 0;
    phis[1] << a, b;
    phis[2] << a, b * std::polar(1.0, 2 * M_PI / 3);
    phis[3] << a, b * std::polar(1.0, 4 * M_PI / 3);
    for (int i = 0; i < 4; ++i) {
        m.labels.push_back("s" + std::to_string(i + 1));
        m.elements.push_back(0.5 * phis[i] * phis[i].adjoint());
    }
    m.validate();
    return m;
}

POVM alphabetPOVM(const QuantumAlphabet& q) {
    const int d = q.dim;
    Mat sum = Mat::Zero(d, d);
    for (const auto& k : q.states) sum += k * k.adjoint();
    const double top = hermitianEigenvalues(sum).maxCoeff();
    const double c = 1.0 / top - 1e-12;
    POVM m;
    m.name = "alphabet";
    m.dim = d;
    for (std::size_t i = 0; i < q.states.size(); ++i) {
        m.labels.push_back(q.names[i]);
        m.elements.push_back(c * q.states[i] * q.states[i].adjoint());
    }
    m.labels.push_back("n");
    m.elements.push_back(Mat::Identity(d, d) - c * sum);
    m.validate();
    return m;
}

std::vector<std::string> standardInstrumentNames() {
    return {"M01", "Mpm", "My", "M012", "Mpm2", "SIC", "Mtheta:<angle>", "alphabet"};
}

POVM instrumentByName(const std::string& ref, const Source* src) {
    if (ref == "M01") return instrumentM01();
    if (ref == "Mpm" || ref == "M+-") return instrumentMpm();
    if (ref == "My") return instrumentMy();
    if (ref == "M012") return instrumentM012();
    if (ref == "Mpm2") return instrumentMpm2();
    if (ref == "SIC") return instrumentSIC();
    if (ref.rfind("Mtheta:", 0) == 0) return instrumentMtheta(parseAngle(ref.substr(7)));
    if (ref == "alphabet") {
        if (!src) throw validationError("instrument 'alphabet' needs a source");
        return alphabetPOVM(src->alphabet);
    }
    throw validationError("unknown instrument '" + ref + "'");
}

std::vector<POVM> standardInstruments(int d) {
    if (d == 2)
        return {instrumentM01(), instrumentMpm(), instrumentMy(), instrumentSIC(),
                instrumentMtheta(M_PI / 8), instrumentMtheta(M_PI / 4), instrumentMtheta(3 * M_PI / 8),
                instrumentMtheta(3 * M_PI / 4)};
    if (d == 3) return {instrumentM012(), instrumentMpm2()};
    std::vector<Vec> kets;
    std::vector<std::string> labels;
    for (int i = 0; i < d; ++i) {
        kets.push_back(basisKet(d, i));
        labels.push_back(std::to_string(i));
    }
    return {pvmFromKets("Mbasis", labels, kets)};
}

std::vector<double> bornDistribution(const DensityMatrix& rho, const POVM& m) {
    if (rho.size() != m.dim) throw domainError("instrument dimension does not match the state");
    std::vector<double> p;
    for (const auto& e : m.elements) p.push_back(std::max(0.0, (e * rho.matrix()).trace().real()));
    return p;
}

void DQMP::validate() const {
    if (states.empty()) throw validationError("protocol needs at least one state");
    if (povm.size() != states.size() || delta.size() != states.size())
        throw validationError("protocol needs one instrument and one transition map per state");
    if (start < 0 || start >= numStates()) throw validationError("protocol start state is invalid");
    std::set<std::string> seen(states.begin(), states.end());
    if (seen.size() != states.size()) throw validationError("protocol state names must be distinct");
    for (int s = 0; s < numStates(); ++s) {
        povm[s].validate();
        if (povm[s].dim != povm[0].dim) throw validationError("protocol instruments differ in dimension");
        for (const auto& [y, t] : delta[s]) {
            if (std::find(povm[s].labels.begin(), povm[s].labels.end(), y) == povm[s].labels.end())
                throw validationError("protocol state " + states[s] + " has a transition on unknown outcome '" + y + "'");
            if (t < 0 || t >= numStates()) throw validationError("protocol transition target is invalid");
        }
    }
}

int DQMP::stateIndex(const std::string& s) const {
    auto it = std::find(states.begin(), states.end(), s);
    return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

Alphabet DQMP::outcomes() const {
    Alphabet a;
    for (const auto& m : povm)
        for (const auto& l : m.labels)
            if (a.index(l) < 0) a.symbols.push_back(l);
    return a;
}

std::vector<bool> DQMP::recurrentStates() const {
    const int n = numStates();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) {
        reach[s][s] = true;
        for (const auto& [y, t] : delta[s]) reach[s][t] = true;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    std::vector<bool> rec(n, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (reach[i][j] && !reach[j][i]) rec[i] = false;
    return rec;
}

DQMP repeatedProtocol(const POVM& m) {
    DQMP p;
    p.name = "repeated:" + m.name;
    p.states = {"S0"};
    p.povm = {m};
    p.delta.resize(1);
    for (const auto& l : m.labels) p.delta[0][l] = 0;
    p.validate();
    return p;
}

namespace {

struct ProtoBuilder {
    DQMP p;
    int add(const std::string& name, const POVM& m) {
        p.states.push_back(name);
        p.povm.push_back(m);
        p.delta.emplace_back();
        return static_cast<int>(p.states.size()) - 1;
    }
    void on(const std::string& from, const std::string& y, const std::string& to) {
        p.delta[p.stateIndex(from)][y] = p.stateIndex(to);
    }
};

DQMP qutritProtocol(const std::string& name) {
    ProtoBuilder b;
    b.p.name = "preset:" + name;
    const POVM m012 = instrumentM012(), mpm2 = instrumentMpm2();
    if (name == "adaptive") {
        b.add("T0", m012);
        b.add("T1", m012);
        b.add("T2", mpm2);
    } else if (name == "012-sync") {
        b.add("T", m012);
    } else {
        b.add("T", mpm2);
    }
    b.add("A", m012);
    b.add("B", mpm2);
    b.add("C", m012);
    if (name == "adaptive") {
        for (const char* t : {"T0", "T1"}) {
            b.on(t, "0", "T1");
            b.on(t, "1", "T2");
            b.on(t, "2", "A");
        }
        b.on("T2", "+", "B");
        b.on("T2", "-", "C");
        b.on("T2", "2", "A");
    } else {
        for (const auto& l : b.p.povm[0].labels) b.on("T", l, l == "2" ? "A" : "T");
    }
    b.on("A", "0", "A");
    b.on("A", "1", "B");
    b.on("B", "+", "B");
    b.on("B", "-", "C");
    b.on("C", "2", "A");
    b.p.start = 0;
    b.p.validate();
    return b.p;
}

} // namespace

DQMP supportTrackingProtocol(const Source& src, const POVM& transient, const std::vector<POVM>& recurrent,
                             const std::string& name) {
    const int n = src.hmc.numStates();
    const int X = src.hmc.alphabet.size();
    if (static_cast<int>(recurrent.size()) != n) throw validationError("one recurrent instrument per source state");
    using Set = std::vector<int>;
    auto successors = [&](const Set& from, const POVM& m, int y) {
        std::set<int> out;
        for (int i : from)
            for (int x = 0; x < X; ++x) {
                const double w = (src.ket(x).adjoint() * m.elements[y] * src.ket(x))(0, 0).real();
                if (w < 1e-14) continue;
                for (int j = 0; j < n; ++j)
                    if (src.hmc.T[x](i, j) > 0) out.insert(j);
            }
        return Set(out.begin(), out.end());
    };
    auto label = [&](const Set& s) {
        if (s.size() == 1) return src.hmc.states[s[0]];
        std::string l = "T{";
        for (std::size_t i = 0; i < s.size(); ++i) l += (i ? "," : "") + src.hmc.states[s[i]];
        return l + "}";
    };
    ProtoBuilder b;
    b.p.name = name;
    std::map<Set, int> index;
    std::vector<Set> queue;
    auto intern = [&](const Set& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        const int id = b.add(label(s), s.size() == 1 ? recurrent[s[0]] : transient);
        index[s] = id;
        queue.push_back(s);
        return id;
    };
    Set all;
    for (int i = 0; i < n; ++i)
        if (src.pi(i) > 0) all.push_back(i);
    b.p.start = intern(all);
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const Set s = queue[q];
        const int id = index[s];
        const POVM m = b.p.povm[id];
        for (int y = 0; y < m.size(); ++y) {
            Set next = successors(s, m, y);
            if (next.empty()) continue;
            const int to = intern(next);
            b.p.delta[id][m.labels[y]] = to;
        }
    }
    b.p.validate();
    return b.p;
}

DQMP presetProtocol(const std::string& name, const Source& src, const Params& sourceParams) {
    if (src.name == "qutrit" && (name == "adaptive" || name == "012-sync" || name == "pm2-sync"))
        return qutritProtocol(name);
    if (src.name == "3symbol-qgm" && name == "adaptive") {
        ProtoBuilder b;
        b.p.name = "preset:adaptive";
        b.add("T0", instrumentM01());
        b.add("A", instrumentM01());
        b.add("B", instrumentMpm());
        b.on("T0", "0", "A");
        b.on("T0", "1", "T0");
        b.on("A", "0", "A");
        b.on("A", "1", "B");
        b.on("B", "+", "A");
        b.p.validate();
        return b.p;
    }
    if (src.name == "unifilar" && name == "adaptive") {
        ProtoBuilder b;
        b.p.name = "preset:adaptive";
        b.add("A", instrumentM01());
        b.add("B", instrumentMpm());
        b.on("A", "0", "B");
        b.on("A", "1", "A");
        b.on("B", "+", "A");
        b.on("B", "-", "B");
        b.p.sourceInit = RVec::Unit(2, 0);
        b.p.validate();
        return b.p;
    }
    if (src.name == "period" && name == "adaptive") {
        auto it = sourceParams.find("phi");
        const double phi = it == sourceParams.end() ? std::nan("") : parseAngle(it->second);
        std::vector<POVM> rec;
        for (int i = 0; i < src.hmc.numStates(); ++i) {
            int x = 0;
            for (; x < src.hmc.alphabet.size(); ++x)
                if (src.hmc.T[x].row(i).sum() > 0) break;
            const std::string& sym = src.hmc.alphabet.symbols[x];
            if (sym == "0" || sym == "1") {
                rec.push_back(instrumentM01());
            } else if (sym == "+" || sym == "-") {
                rec.push_back(instrumentMpm());
            } else {
                // psi(phi) recovered from the emitted ket when phi is not given explicitly
                const Vec& k = src.ket(x);
                const double angle = std::isnan(phi) ? 2 * std::atan2(k(1).real(), k(0).real()) : phi;
                rec.push_back(instrumentMtheta(angle));
            }
        }
        return supportTrackingProtocol(src, instrumentM01(), rec, "preset:adaptive");
    }
    throw validationError("no preset protocol '" + name + "' for source '" + src.name + "'");
}

std::vector<std::string> presetProtocolNames(const std::string& sourcePreset) {
    if (sourcePreset == "qutrit") return {"adaptive", "012-sync", "pm2-sync"};
    if (sourcePreset == "3symbol-qgm" || sourcePreset == "unifilar" || sourcePreset == "period" ||
        sourcePreset == "period5")
        return {"adaptive"};
    return {};
}

MeasuredRecursion::MeasuredRecursion(const Source& src, const DQMP& proto)
    : src_(src), proto_(proto), outcomes_(proto.outcomes()) {
    proto.validate();
    if (proto.povm[0].dim != src.dim())
        throw validationError("protocol instruments act on dimension " + std::to_string(proto.povm[0].dim) +
                              " but the source emits dimension " + std::to_string(src.dim()));
    const int X = src.hmc.alphabet.size();
    for (int s = 0; s < proto.numStates(); ++s) {
        const POVM& m = proto.povm[s];
        std::vector<std::vector<double>> ws;
        std::vector<int> yi;
        for (int y = 0; y < m.size(); ++y) {
            std::vector<double> wx(X);
            for (int x = 0; x < X; ++x)
                wx[x] = std::max(0.0, (src.ket(x).adjoint() * m.elements[y] * src.ket(x))(0, 0).real());
            ws.push_back(std::move(wx));
            yi.push_back(outcomes_.index(m.labels[y]));
        }
        w_.push_back(std::move(ws));
        yIndex_.push_back(std::move(yi));
    }
}

int MeasuredRecursion::next(int s, int y) const {
    const auto& label = proto_.povm[s].labels[y];
    auto it = proto_.delta[s].find(label);
    if (it == proto_.delta[s].end())
        throw validationError("protocol state " + proto_.states[s] + " has no transition for realizable outcome '" +
                              label + "'");
    return it->second;
}

RVec MeasuredRecursion::step(const RVec& alpha, int s, int y) const {
    const int n = src_.hmc.numStates();
    RVec out = RVec::Zero(n);
    for (int x = 0; x < src_.hmc.alphabet.size(); ++x) {
        const double w = w_[s][y][x];
        if (w <= 0) continue;
        out += w * (alpha.transpose() * src_.hmc.T[x]).transpose();
    }
    return out;
}

std::vector<JointBranch> MeasuredRecursion::expand(const std::vector<JointBranch>& cur, bool keepWords) const {
    std::vector<JointBranch> out;
    for (const auto& b : cur)
        for (int y = 0; y < proto_.povm[b.protoState].size(); ++y) {
            RVec a = step(b.alpha, b.protoState, y);
            if (a.sum() < 1e-14) continue;
            JointBranch nb;
            if (keepWords) {
                nb.word = b.word;
                nb.word.push_back(yIndex_[b.protoState][y]);
            }
            nb.protoState = next(b.protoState, y);
            nb.alpha = std::move(a);
            out.push_back(std::move(nb));
        }
    if (static_cast<long long>(out.size()) > caps().wordCount)
        throw capError("measured word enumeration exceeds " + std::to_string(caps().wordCount) + " branches");
    return out;
}

namespace {

WordDistribution toDistribution(std::vector<std::pair<Word, double>> items, int length) {
    std::sort(items.begin(), items.end());
    WordDistribution d;
    d.length = length;
    for (auto& [w, p] : items) {
        if (!d.words.empty() && d.words.back() == w) {
            d.probs.back() += p;
            continue;
        }
        d.words.push_back(w);
        d.probs.push_back(p);
    }
    return d;
}

std::vector<WordDistribution> runFamily(const MeasuredRecursion& rec, std::vector<JointBranch> cur, int L) {
    std::vector<WordDistribution> out;
    for (int l = 0; l <= L; ++l) {
        if (l > 0) cur = rec.expand(cur);
        std::vector<std::pair<Word, double>> items;
        for (const auto& b : cur) items.emplace_back(b.word, b.alpha.sum());
        out.push_back(toDistribution(std::move(items), l));
    }
    return out;
}

} // namespace

RVec protocolInit(const Source& src, const DQMP& proto, const std::optional<RVec>& init) {
    RVec v = init ? *init : (proto.sourceInit ? *proto.sourceInit : src.pi);
    if (v.size() != src.hmc.numStates()) throw validationError("initial distribution has the wrong size");
    if (v.minCoeff() < 0 || std::abs(v.sum() - 1) > 1e-9)
        throw validationError("initial distribution is not a probability vector");
    return v;
}

WordDistribution measuredWordDist(const Source& src, const DQMP& proto, int length, const std::optional<RVec>& init) {
    if (length < 0) throw domainError("word length must be nonnegative");
    MeasuredRecursion rec(src, proto);
    std::vector<JointBranch> cur{{Word{}, proto.start, protocolInit(src, proto, init)}};
    for (int l = 0; l < length; ++l) cur = rec.expand(cur);
    std::vector<std::pair<Word, double>> items;
    for (const auto& b : cur) items.emplace_back(b.word, b.alpha.sum());
    return toDistribution(std::move(items), length);
}

WordDistribution measuredWordDistDirect(const Source& src, const DQMP& proto, int length) {
    BlockState block = blockState(src, length, true);
    if (!block.dense) throw capError("dense block state exceeds the dimension cap");
    const Alphabet outs = proto.outcomes();
    const int d = src.dim();
    std::vector<std::pair<Word, double>> items;
    // R is the operator left on the unmeasured tail after contracting the leading
    // qudits with their effects: R' = tr_1[(E (x) I) R].
    std::function<void(int, int, Word&, const Mat&)> walk = [&](int t, int s, Word& w, const Mat& R) {
        if (t == length) {
            const double p = R(0, 0).real();
            if (p > 1e-14) items.emplace_back(w, p);
            return;
        }
        const POVM& m = proto.povm[s];
        const Eigen::Index rest = R.rows() / d;
        for (int y = 0; y < m.size(); ++y) {
            const Mat& E = m.elements[y];
            Mat next = Mat::Zero(rest, rest);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (E(a, b) != cplx(0, 0)) next += E(a, b) * R.block(b * rest, a * rest, rest, rest);
            auto it = proto.delta[s].find(m.labels[y]);
            w.push_back(outs.index(m.labels[y]));
            if (it != proto.delta[s].end()) {
                walk(t + 1, it->second, w, next);
            } else if (t + 1 == length) {
                walk(t + 1, s, w, next);
            } else if (next.trace().real() > 1e-14) {
                throw validationError("protocol has no transition for a realizable outcome");
            }
            w.pop_back();
        }
    };
    Word w;
    walk(0, proto.start, w, block.dense->matrix());
    return toDistribution(std::move(items), length);
}

MeasuredProcess measuredProcess(const Source& src, const DQMP& proto, int L, const std::optional<RVec>& init) {
    MeasuredRecursion rec(src, proto);
    MeasuredProcess mp;
    mp.outcomes = rec.outcomes();
    const RVec start = protocolInit(src, proto, init);
    mp.stationary = proto.numStates() == 1 && (start - src.pi).cwiseAbs().maxCoeff() < 1e-12;
    mp.dists = runFamily(rec, {{Word{}, proto.start, start}}, L);

    // joint chain over (source state, protocol state), index i * P + s
    const int n = src.hmc.numStates(), P = proto.numStates(), N = n * P;
    RMat J = RMat::Zero(N, N);
    for (int s = 0; s < P; ++s)
        for (int y = 0; y < proto.povm[s].size(); ++y) {
            auto it = proto.delta[s].find(proto.povm[s].labels[y]);
            for (int x = 0; x < src.hmc.alphabet.size(); ++x) {
                const double w = rec.weight(s, y, x);
                if (w <= 0) continue;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double t = src.hmc.T[x](i, j) * w;
                        if (t <= 0) continue;
                        if (it == proto.delta[s].end()) continue;
                        J(i * P + s, j * P + it->second) += t;
                    }
            }
        }
    const std::vector<bool> recurrent = proto.recurrentStates();
    RVec mu = RVec::Zero(N);
    for (int i = 0; i < n; ++i) mu(i * P + proto.start) = start(i);
    for (int t = 0; t <= 512; ++t) {
        double mass = 0;
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < P; ++s)
                if (recurrent[s]) mass += mu(i * P + s);
        if (mass >= 1 - 1e-12) {
            mp.syncDepth = t;
            break;
        }
        mu = (mu.transpose() * J).transpose();
    }
    if (mp.syncDepth < 0) return mp;

    // stationary joint distribution on the states reachable from mu
    std::vector<int> reach;
    {
        std::vector<bool> seen(N, false);
        std::vector<int> stack;
        for (int k = 0; k < N; ++k)
            if (mu(k) > 1e-15) {
                seen[k] = true;
                stack.push_back(k);
            }
        while (!stack.empty()) {
            int k = stack.back();
            stack.pop_back();
            reach.push_back(k);
            for (int m = 0; m < N; ++m)
                if (J(k, m) > 0 && !seen[m]) {
                    seen[m] = true;
                    stack.push_back(m);
                }
        }
        std::sort(reach.begin(), reach.end());
    }
    const int R = static_cast<int>(reach.size());
    RMat A(R, R);
    for (int a = 0; a < R; ++a)
        for (int b = 0; b < R; ++b) A(a, b) = J(reach[b], reach[a]) - (a == b ? 1.0 : 0.0);
    Eigen::FullPivLU<RMat> lu(A);
    RVec v = RVec::Zero(N);
    if (lu.dimensionOfKernel() == 1) {
        RVec k = lu.kernel().col(0);
        k /= k.sum();
        for (int a = 0; a < R; ++a) v(reach[a]) = std::max(0.0, k(a));
    } else {
        RVec acc = RVec::Zero(N), cur = mu;
        const int K = 4096;
        for (int t = 0; t < K; ++t) {
            acc += cur;
            cur = (cur.transpose() * J).transpose();
        }
        v = acc / K;
    }
    v /= v.sum();
    std::vector<JointBranch> init0;
    for (int s = 0; s < P; ++s) {
        RVec a(n);
        for (int i = 0; i < n; ++i) a(i) = v(i * P + s);
        if (a.sum() > 1e-15) init0.push_back({Word{}, s, a});
    }
    mp.recurrent = runFamily(rec, init0, L);
    return mp;
}

} // namespace qproc
