#include "qproc/sync.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace qproc {

namespace {

double beliefEntropy(const RVec& b) {
    std::vector<double> p(b.data(), b.data() + b.size());
    return std::max(0.0, shannonEntropy(p));
}

} // namespace

double BeliefState::entropy() const { return beliefEntropy(dist); }

BeliefState beliefFilter(const Source& src, const DQMP& proto, const Word& outcomes, const std::optional<RVec>& init) {
    MeasuredRecursion rec(src, proto);
    BeliefState b;
    b.protoState = proto.start;
    RVec alpha = protocolInit(src, proto, init);
    for (int y : outcomes) {
        if (y < 0 || y >= rec.outcomes().size()) throw validationError("outcome index out of range");
        const POVM& m = proto.povm[b.protoState];
        const std::string& label = rec.outcomes().symbols[y];
        auto it = std::find(m.labels.begin(), m.labels.end(), label);
        if (it == m.labels.end())
            throw Error(ErrorKind::Unrealizable, "unrealizable observation: outcome '" + label +
                                                     "' is not produced by the instrument in protocol state " +
                                                     proto.states[b.protoState]);
        const int yi = static_cast<int>(it - m.labels.begin());
        alpha = rec.step(alpha, b.protoState, yi);
        if (alpha.sum() < 1e-300)
            throw Error(ErrorKind::Unrealizable, "unrealizable observation: word has probability zero");
        b.protoState = rec.next(b.protoState, yi);
        b.word.push_back(y);
    }
    b.prob = alpha.sum();
    if (b.prob < 1e-14) throw Error(ErrorKind::Unrealizable, "unrealizable observation: word has probability zero");
    b.dist = alpha / b.prob;
    return b;
}

BeliefState beliefFilter(const Source& src, const DQMP& proto, const std::vector<std::string>& labels,
                         const std::optional<RVec>& init) {
    const Alphabet outs = proto.outcomes();
    Word w;
    for (const auto& l : labels) {
        const int i = outs.index(l);
        if (i < 0) throw validationError("unknown outcome '" + l + "'");
        w.push_back(i);
    }
    return beliefFilter(src, proto, w, init);
}

UncertaintyCurve stateUncertaintyCurve(const Source& src, const DQMP& proto, int L, const std::optional<RVec>& init) {
    if (L < 0) throw domainError("L must be nonnegative");
    MeasuredRecursion rec(src, proto);
    UncertaintyCurve c;
    std::vector<JointBranch> cur{{Word{}, proto.start, protocolInit(src, proto, init)}};
    c.H.push_back(beliefEntropy(cur[0].alpha));
    for (int l = 1; l <= L; ++l) {
        auto next = rec.expand(cur, false);
        // branches with equal protocol state and belief carry identical futures
        std::map<std::pair<int, std::vector<long long>>, int> index;
        cur.clear();
        for (auto& b : next) {
            const double p = b.alpha.sum();
            std::vector<long long> key(b.alpha.size());
            for (Eigen::Index i = 0; i < b.alpha.size(); ++i) key[i] = std::llround(b.alpha(i) / p * 1e12);
            auto [it, fresh] = index.try_emplace({b.protoState, std::move(key)}, static_cast<int>(cur.size()));
            if (fresh)
                cur.push_back(std::move(b));
            else
                cur[it->second].alpha += b.alpha;
        }
        double h = 0;
        for (const auto& b : cur) {
            const double p = b.alpha.sum();
            h += p * beliefEntropy(b.alpha / p);
        }
        c.H.push_back(h);
    }
    c.cInf = c.H.back();
    c.converged = L >= 1 && std::abs(c.H[L] - c.H[L - 1]) < 1e-4;
    for (double h : c.H) c.syncInfo += h;
    c.diverging = c.cInf > 1e-3;
    return c;
}

std::optional<double> syncInfo(const Source& src, const DQMP& proto, int L) {
    auto c = stateUncertaintyCurve(src, proto, L);
    if (c.diverging) return std::nullopt;
    return c.syncInfo;
}

std::vector<double> uniformGrid(double lo, double hi, int points) {
    if (points < 2) throw domainError("a grid needs at least two points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
    return g;
}

ThetaSweep thetaSweep(const Source& src, const std::vector<double>& thetas, int L) {
    if (src.dim() != 2) throw domainError("theta sweeps need a qubit source");
    if (thetas.empty()) throw domainError("empty theta grid");
    ThetaSweep s;
    s.theta = thetas;
    for (double t : thetas) s.cInf.push_back(stateUncertaintyCurve(src, repeatedProtocol(instrumentMtheta(t)), L).cInf);
    const auto lo = std::min_element(s.cInf.begin(), s.cInf.end());
    const auto hi = std::max_element(s.cInf.begin(), s.cInf.end());
    s.min = *lo;
    s.argmin = thetas[lo - s.cInf.begin()];
    s.max = *hi;
    s.argmax = thetas[hi - s.cInf.begin()];
    return s;
}

BeliefMachine beliefMachine(const Source& src, const DQMP& proto, int depth, double mergeTol,
                            const std::optional<RVec>& init) {
    if (depth < 0) throw domainError("depth must be nonnegative");
    MeasuredRecursion rec(src, proto);
    const Alphabet& outs = rec.outcomes();
    const long long nodeCap = std::min<long long>(caps().branches, 1 << 16);
    BeliefMachine bm;
    bm.nodes.push_back({protocolInit(src, proto, init), proto.start, 0});
    auto find = [&](const RVec& b, int s) {
        for (std::size_t i = 0; i < bm.nodes.size(); ++i)
            if (bm.nodes[i].protoState == s && (bm.nodes[i].belief - b).cwiseAbs().maxCoeff() < mergeTol)
                return static_cast<int>(i);
        return -1;
    };
    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int id = queue.front();
        queue.pop_front();
        if (bm.nodes[id].depth >= depth) {
            bm.closed = false;
            continue;
        }
        const int s = bm.nodes[id].protoState;
        std::vector<BeliefEdge> out;
        bool full = true;
        for (int y = 0; y < proto.povm[s].size(); ++y) {
            RVec a = rec.step(bm.nodes[id].belief, s, y);
            const double p = a.sum();
            if (p < 1e-14) continue;
            a /= p;
            const int t = rec.next(s, y);
            int to = find(a, t);
            if (to < 0) {
                if (static_cast<long long>(bm.nodes.size()) >= nodeCap) {
                    full = false;
                    break;
                }
                to = static_cast<int>(bm.nodes.size());
                bm.nodes.push_back({a, t, bm.nodes[id].depth + 1});
                queue.push_back(to);
            }
            out.push_back({id, to, outs.symbols[rec.outcomeIndex(s, y)], p});
        }
        if (!full) {
            bm.closed = false;
            bm.warning = "belief machine truncated at " + std::to_string(nodeCap) + " nodes";
            break;
        }
        bm.nodes[id].expanded = true;
        bm.edges.insert(bm.edges.end(), out.begin(), out.end());
    }
    if (!bm.closed && bm.warning.empty())
        bm.warning = "belief machine does not close within depth " + std::to_string(depth);

    // recurrent nodes: closed strongly connected classes among fully expanded nodes
    const int n = static_cast<int>(bm.nodes.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : bm.edges) adj[e.from].push_back(e.to);
    std::vector<std::vector<int>> radj(n);
    for (const auto& e : bm.edges) radj[e.to].push_back(e.from);
    std::vector<int> order;
    std::vector<char> seen(n, 0);
    for (int r = 0; r < n; ++r) {
        if (seen[r]) continue;
        std::vector<std::pair<int, std::size_t>> stack{{r, 0}};
        seen[r] = 1;
        while (!stack.empty()) {
            auto& [k, i] = stack.back();
            if (i < adj[k].size()) {
                const int j = adj[k][i++];
                if (!seen[j]) {
                    seen[j] = 1;
                    stack.push_back({j, 0});
                }
            } else {
                order.push_back(k);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] >= 0) continue;
        std::vector<int> stack{*it};
        comp[*it] = ncomp;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            for (int j : radj[k])
                if (comp[j] < 0) {
                    comp[j] = ncomp;
                    stack.push_back(j);
                }
        }
        ++ncomp;
    }
    std::vector<char> closedComp(ncomp, 1);
    for (int i = 0; i < n; ++i) {
        if (!bm.nodes[i].expanded) closedComp[comp[i]] = 0;
        for (int j : adj[i])
            if (comp[j] != comp[i]) closedComp[comp[i]] = 0;
    }
    for (int i = 0; i < n; ++i) bm.nodes[i].recurrent = closedComp[comp[i]];
    return bm;
}

} // namespace qproc
