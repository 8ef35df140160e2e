#include "qproc/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qproc {

namespace {

using nlohmann::json;

std::string lineContext(const std::string& text, std::size_t byte) {
    const std::size_t end = std::min(byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
    return "line " + std::to_string(line);
}

cplx amplitude(const json& a, const std::string& where) {
    if (a.is_number()) return {a.get<double>(), 0.0};
    if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
        return {a[0].get<double>(), a[1].get<double>()};
    throw validationError(where + ": amplitude must be a number or [re, im]");
}

Vec ketFromJson(const json& k, int dim, double phi, const std::string& where) {
    if (k.is_string()) return namedKet(k.get<std::string>(), dim, phi);
    if (!k.is_array() || static_cast<int>(k.size()) != dim)
        throw validationError(where + ": ket needs " + std::to_string(dim) + " amplitudes");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = amplitude(k[i], where);
    if (v.norm() < 1e-12) throw validationError(where + ": zero ket");
    return v / v.norm();
}

Mat matrixFromJson(const json& m, int dim, const std::string& where) {
    if (!m.is_array() || static_cast<int>(m.size()) != dim)
        throw validationError(where + ": matrix needs " + std::to_string(dim) + " rows");
    Mat out(dim, dim);
    for (int i = 0; i < dim; ++i) {
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != dim)
            throw validationError(where + ": matrix row " + std::to_string(i) + " needs " + std::to_string(dim) + " entries");
        for (int j = 0; j < dim; ++j) out(i, j) = amplitude(m[i][j], where);
    }
    return out;
}

Json complexJson(cplx z) { return Json::array({z.real(), z.imag()}); }

Json matrixJson(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complexJson(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

std::string renderWord(const std::vector<std::string>& names, const Word& w) {
    Alphabet a{names};
    return a.render(w);
}

Params parseQuery(const std::string& q) {
    Params p;
    std::stringstream ss(q);
    std::string item;
    while (std::getline(ss, item, '&')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw validationError("malformed preset parameter '" + item + "'");
        p[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return p;
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw validationError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw validationError(where + ": field '" + key + "' has the wrong type");
    }
}

} // namespace

json parseJsonText(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw validationError(origin + ", " + lineContext(text, e.byte) + ": " + e.what());
    }
}

json readJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validationError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseJsonText(ss.str(), path);
}

Source sourceFromJson(const json& j) {
    if (!j.is_object()) throw validationError("source: expected an object");
    const int dim = field<int>(j, "dim", "source");
    if (dim < 1) throw validationError("source: dim must be positive");
    const double phi = j.contains("phi") ? (j["phi"].is_string() ? parseAngle(j["phi"].get<std::string>())
                                                                  : field<double>(j, "phi", "source"))
                                         : M_PI / 2;
    QuantumAlphabet q;
    q.dim = dim;
    HMC hmc;
    const json& alpha = j.contains("alphabet") ? j["alphabet"] : json();
    if (!alpha.is_array() || alpha.empty()) throw validationError("source: alphabet must be a nonempty array");
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const std::string where = "source alphabet[" + std::to_string(i) + "]";
        const auto sym = field<std::string>(alpha[i], "symbol", where);
        if (!alpha[i].contains("ket")) throw validationError(where + ": missing field 'ket'");
        q.names.push_back(sym);
        q.states.push_back(ketFromJson(alpha[i]["ket"], dim, phi, where));
    }
    hmc.alphabet.symbols = q.names;
    hmc.states = field<std::vector<std::string>>(j, "states", "source");
    const int n = static_cast<int>(hmc.states.size());
    hmc.T.assign(q.names.size(), RMat::Zero(n, n));
    const json& tr = j.contains("transitions") ? j["transitions"] : json();
    if (!tr.is_array()) throw validationError("source: transitions must be an array");
    auto stateIdx = [&](const std::string& s, const std::string& where) {
        auto it = std::find(hmc.states.begin(), hmc.states.end(), s);
        if (it == hmc.states.end()) throw validationError(where + ": unknown state '" + s + "'");
        return static_cast<int>(it - hmc.states.begin());
    };
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const std::string where = "source transitions[" + std::to_string(i) + "]";
        const int a = stateIdx(field<std::string>(tr[i], "from", where), where);
        const int b = stateIdx(field<std::string>(tr[i], "to", where), where);
        const int x = hmc.alphabet.index(field<std::string>(tr[i], "symbol", where));
        if (x < 0) throw validationError(where + ": unknown symbol");
        hmc.T[x](a, b) += field<double>(tr[i], "prob", where);
    }
    return buildSource(hmc, q, j.value("name", std::string("file")));
}

Json sourceToJson(const Source& src) {
    Json j;
    j["name"] = src.name;
    j["dim"] = src.dim();
    Json alpha = Json::array();
    for (std::size_t x = 0; x < src.alphabet.names.size(); ++x) {
        Json ket = Json::array();
        for (Eigen::Index i = 0; i < src.alphabet.states[x].size(); ++i) ket.push_back(complexJson(src.alphabet.states[x](i)));
        alpha.push_back({{"symbol", src.alphabet.names[x]}, {"ket", ket}});
    }
    j["alphabet"] = alpha;
    j["states"] = src.hmc.states;
    Json tr = Json::array();
    for (int x = 0; x < src.hmc.alphabet.size(); ++x)
        for (int a = 0; a < src.hmc.numStates(); ++a)
            for (int b = 0; b < src.hmc.numStates(); ++b)
                if (src.hmc.T[x](a, b) > 0)
                    tr.push_back({{"from", src.hmc.states[a]},
                                  {"symbol", src.hmc.alphabet.symbols[x]},
                                  {"to", src.hmc.states[b]},
                                  {"prob", src.hmc.T[x](a, b)}});
    j["transitions"] = tr;
    return j;
}

LoadedSource loadSource(const std::string& ref) {
    LoadedSource ls;
    ls.ref = ref;
    if (ref.rfind("preset:", 0) == 0) {
        const std::string rest = ref.substr(7);
        const auto q = rest.find('?');
        ls.preset = rest.substr(0, q);
        if (q != std::string::npos) ls.params = parseQuery(rest.substr(q + 1));
        ls.source = makePreset(ls.preset, ls.params);
        return ls;
    }
    ls.source = sourceFromJson(readJsonFile(ref));
    return ls;
}

POVM instrumentFromJson(const json& j, const Source* src) {
    if (j.is_string()) return instrumentByName(j.get<std::string>(), src);
    if (!j.is_object()) throw validationError("instrument: expected a registry name or an object");
    POVM m;
    m.name = j.value("name", std::string("inline"));
    m.labels = field<std::vector<std::string>>(j, "labels", "instrument");
    const json& el = j.contains("elements") ? j["elements"] : json();
    if (!el.is_array() || el.size() != m.labels.size())
        throw validationError("instrument: elements must be an array with one matrix per label");
    m.dim = static_cast<int>(el[0].size());
    for (std::size_t i = 0; i < el.size(); ++i)
        m.elements.push_back(matrixFromJson(el[i], m.dim, "instrument element " + m.labels[i]));
    m.validate();
    return m;
}

DQMP protocolFromJson(const json& j, const Source* src) {
    if (!j.is_object()) throw validationError("protocol: expected an object");
    DQMP p;
    p.name = j.value("name", std::string("file"));
    p.states = field<std::vector<std::string>>(j, "states", "protocol");
    const auto start = field<std::string>(j, "start", "protocol");
    p.start = p.stateIndex(start);
    if (p.start < 0) throw validationError("protocol: unknown start state '" + start + "'");
    const json& povm = j.contains("povm") ? j["povm"] : json();
    const json& delta = j.contains("delta") ? j["delta"] : json();
    if (!povm.is_object() || !delta.is_object()) throw validationError("protocol: povm and delta must be objects");
    p.delta.resize(p.states.size());
    for (const auto& s : p.states) {
        if (!povm.contains(s)) throw validationError("protocol: no instrument for state '" + s + "'");
        p.povm.push_back(instrumentFromJson(povm[s], src));
    }
    for (const auto& [s, moves] : delta.items()) {
        const int a = p.stateIndex(s);
        if (a < 0) throw validationError("protocol delta: unknown state '" + s + "'");
        for (const auto& [y, t] : moves.items()) {
            if (!t.is_string()) throw validationError("protocol delta: targets must be state names");
            const int b = p.stateIndex(t.get<std::string>());
            if (b < 0) throw validationError("protocol delta: unknown state '" + t.get<std::string>() + "'");
            p.delta[a][y] = b;
        }
    }
    if (j.contains("init")) {
        const auto v = field<std::vector<double>>(j, "init", "protocol");
        p.sourceInit = Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    p.validate();
    return p;
}

DQMP loadProtocol(const std::string& ref, const LoadedSource& src) {
    if (ref.rfind("repeated:", 0) == 0) return repeatedProtocol(instrumentByName(ref.substr(9), &src.source));
    if (ref.rfind("preset:", 0) == 0) return presetProtocol(ref.substr(7), src.source, src.params);
    return protocolFromJson(readJsonFile(ref), &src.source);
}

Json toJson(const MarkovOrder& o) {
    return {{"value", o.value}, {"detected", o.detected}, {"text", o.describe()}};
}

Json toJson(const QuantumMeasureTable& t) {
    Json j;
    j["L"] = t.L;
    j["log2_dim"] = t.logDim;
    j["S"] = t.S;
    j["dS"] = t.dS;
    j["d2S"] = t.d2S;
    j["s"] = t.s;
    j["E_q"] = t.Eq;
    j["T_q"] = t.Tq;
    j["T_q_plain"] = t.TqPlain;
    j["E_q_mi"] = t.EqMi;
    j["s_hat"] = t.sHat;
    j["E_q_hat"] = t.EqHat;
    j["T_q_hat"] = t.TqHat;
    j["T_q_plain_hat"] = t.TqPlainHat;
    j["G_q"] = t.Gq;
    j["R_q_redundancy"] = t.Rq;
    j["markov_order"] = toJson(t.order);
    return j;
}

Json toJson(const ClassicalMeasureTable& t) {
    Json j;
    j["L"] = t.L;
    j["log2_alphabet"] = t.logAlphabet;
    j["H"] = t.H;
    j["dH"] = t.dH;
    j["d2H"] = t.d2H;
    j["h_mu"] = t.hmu;
    j["E"] = t.E;
    j["T"] = t.T;
    j["T_plain"] = t.Tplain;
    j["E_mi"] = t.Emi;
    j["h_mu_hat"] = t.hmuHat;
    j["E_hat"] = t.EHat;
    j["T_hat"] = t.THat;
    j["R"] = t.R;
    j["G"] = t.G;
    j["markov_order"] = toJson(t.order);
    return j;
}

Json toJson(const UncertaintyCurve& c) {
    Json j;
    j["H"] = c.H;
    j["C_inf"] = c.cInf;
    j["converged"] = c.converged;
    j["sync_info"] = c.syncInfo;
    j["diverging"] = c.diverging;
    return j;
}

Json toJson(const BeliefMachine& m, const Source& src) {
    Json nodes = Json::array();
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const auto& n = m.nodes[i];
        Json belief;
        for (int k = 0; k < src.hmc.numStates(); ++k) belief[src.hmc.states[k]] = n.belief(k);
        nodes.push_back({{"id", i},
                         {"belief", belief},
                         {"protocol_state", n.protoState},
                         {"depth", n.depth},
                         {"expanded", n.expanded},
                         {"recurrent", n.recurrent}});
    }
    Json edges = Json::array();
    for (const auto& e : m.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}, {"prob", e.prob}});
    Json j;
    j["closed"] = m.closed;
    if (!m.warning.empty()) j["warning"] = m.warning;
    j["nodes"] = nodes;
    j["edges"] = edges;
    return j;
}

Json toJson(const DensityMatrix& rho) { return {{"dims", rho.dims()}, {"matrix", matrixJson(rho.matrix())}}; }

Json toJson(const ReconstructionReport& r, const QuantumAlphabet* q) {
    Json j;
    if (r.rho) j["rho"] = toJson(*r.rho);
    if (!r.words.empty()) {
        Json p;
        for (std::size_t i = 0; i < r.words.size(); ++i)
            p[q ? renderWord(q->names, r.words[i]) : std::to_string(i)] = r.probs[i];
        j["word_probs"] = p;
    }
    j["samples"] = r.samples;
    j["residual"] = r.residual;
    j["unique"] = r.unique;
    j["rank"] = r.rank;
    j["unknowns"] = r.unknowns;
    j["projected"] = r.projected;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

} // namespace qproc
