// qproc: command-line front end for source analysis, measured processes,
// synchronization and tomography.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qproc/io.hpp"

using namespace qproc;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitCap = 3;
constexpr int kExitUnrealizable = 4;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void printCsvCurve(const std::vector<double>& v) {
    std::cout << "ell,value\n";
    for (std::size_t l = 0; l < v.size(); ++l) std::cout << l << ',' << num(v[l]) << '\n';
}

void printJson(const Json& j) { std::cout << j.dump(2) << '\n'; }

const std::vector<double>& pickCurve(const QuantumMeasureTable& q, const ClassicalMeasureTable& c,
                                     const std::string& name) {
    if (name == "S") return q.S;
    if (name == "dS") return q.dS;
    if (name == "d2S") return q.d2S;
    if (name == "s") return q.s;
    if (name == "E_q") return q.Eq;
    if (name == "T_q") return q.Tq;
    if (name == "H") return c.H;
    if (name == "h_mu") return c.hmu;
    if (name == "E") return c.E;
    if (name == "T") return c.T;
    throw validationError("unknown curve '" + name + "'");
}

struct Common {
    std::string source;
    int L = 0;
    std::string format = "json";
    double eps = 1e-9;
};

void addCommon(CLI::App* cmd, Common& c, int defaultL) {
    c.L = defaultL;
    cmd->add_option("source", c.source, "preset:<name>?k=v&... or a source JSON file")->required();
    cmd->add_option("--L", c.L, "maximum block length")->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--eps", c.eps, "Markov order tolerance");
}

int runAnalyze(const Common& c, const std::string& curve) {
    const LoadedSource ls = loadSource(c.source);
    const Source& src = ls.source;
    const auto q = quantumMeasures(src, c.L, c.eps);
    const auto cl = classicalMeasures(hmcWordDistributions(src.hmc, c.L), src.hmc.alphabet.size(), c.eps);
    if (c.format == "csv") {
        printCsvCurve(pickCurve(q, cl, curve));
        return 0;
    }
    Json j;
    j["schema"] = "qproc.analyze/1";
    j["source"] = ls.ref;
    j["L"] = c.L;
    j["tolerances"] = {{"markov_order_eps", c.eps}, {"eigenvalue_clamp", kEigClamp}};
    const auto u = isQuantumUnifilar(src);
    j["quantum_unifilar"] = u.unifilar;
    if (u.unifilar)
        j["entropy_rate_exact"] = entropyRateExact(src);
    else
        j["entropy_rate_exact"] = nullptr;
    j["quantum"] = toJson(q);
    j["classical"] = toJson(cl);
    printJson(j);
    return 0;
}

int runSweep(const Common& c, const std::string& sweep, int grid) {
    if (sweep != "phi,theta") throw validationError("only --sweep phi,theta is supported");
    const LoadedSource base = loadSource(c.source);
    if (base.preset.empty()) throw validationError("--sweep needs a preset source with a phi parameter");
    if (base.source.dim() != 2) throw validationError("--sweep needs a qubit source");
    const auto phis = uniformGrid(0, M_PI, grid), thetas = uniformGrid(0, M_PI, grid);
    Json rows = Json::array();
    if (c.format == "csv") std::cout << "phi,theta,h_mu_y,E_y,s_q,E_q\n";
    for (double phi : phis) {
        Params p = base.params;
        p["phi"] = num(phi);
        const Source src = makePreset(base.preset, p);
        const auto q = quantumMeasures(src, c.L, c.eps);
        for (double th : thetas) {
            const auto mp = measuredProcess(src, repeatedProtocol(instrumentMtheta(th)), c.L);
            const auto t = classicalMeasures(mp.dists, mp.outcomes.size(), c.eps);
            if (c.format == "csv")
                std::cout << num(phi) << ',' << num(th) << ',' << num(t.hmuHat) << ',' << num(t.EHat) << ','
                          << num(q.sHat) << ',' << num(q.EqHat) << '\n';
            else
                rows.push_back({{"phi", phi}, {"theta", th}, {"h_mu_y", t.hmuHat}, {"E_y", t.EHat},
                                {"s_q", q.sHat}, {"E_q", q.EqHat}});
        }
    }
    if (c.format == "json") printJson({{"schema", "qproc.sweep/1"}, {"source", base.ref}, {"L", c.L}, {"grid", rows}});
    return 0;
}

int runMeasure(const Common& c, const std::string& protoRef, const std::string& curve) {
    const LoadedSource ls = loadSource(c.source);
    const DQMP proto = loadProtocol(protoRef, ls);
    const auto mp = measuredProcess(ls.source, proto, c.L);
    const auto t = classicalMeasures(mp.dists, mp.outcomes.size(), c.eps, mp.stationary);
    std::optional<ClassicalMeasureTable> r;
    if (mp.recurrent) r = classicalMeasures(*mp.recurrent, mp.outcomes.size(), c.eps, false);
    if (c.format == "csv") {
        const auto& tab = r && curve.rfind("recurrent:", 0) == 0 ? *r : t;
        const std::string name = curve.rfind("recurrent:", 0) == 0 ? curve.substr(10) : curve;
        if (name == "H") printCsvCurve(tab.H);
        else if (name == "h_mu") printCsvCurve(tab.hmu);
        else if (name == "E") printCsvCurve(tab.E);
        else if (name == "T") printCsvCurve(tab.T);
        else throw validationError("unknown curve '" + curve + "'");
        return 0;
    }
    Json j;
    j["schema"] = "qproc.measure/1";
    j["source"] = ls.ref;
    j["protocol"] = proto.name;
    j["L"] = c.L;
    j["outcomes"] = mp.outcomes.symbols;
    j["stationary"] = mp.stationary;
    j["transient_inclusive"] = toJson(t);
    if (r) {
        j["recurrent"] = toJson(*r);
        j["sync_depth"] = mp.syncDepth;
    } else {
        j["recurrent"] = nullptr;
    }
    printJson(j);
    return 0;
}

int runSync(const Common& c, const std::string& protoRef, int machineDepth, double mergeTol, int sweepPoints) {
    const LoadedSource ls = loadSource(c.source);
    const DQMP proto = loadProtocol(protoRef, ls);
    const auto curve = stateUncertaintyCurve(ls.source, proto, c.L);
    if (c.format == "csv") {
        printCsvCurve(curve.H);
        return 0;
    }
    Json j;
    j["schema"] = "qproc.sync/1";
    j["source"] = ls.ref;
    j["protocol"] = proto.name;
    j["L"] = c.L;
    j["curve"] = toJson(curve);
    if (machineDepth > 0) j["belief_machine"] = toJson(beliefMachine(ls.source, proto, machineDepth, mergeTol), ls.source);
    if (sweepPoints > 0) {
        const auto s = thetaSweep(ls.source, uniformGrid(0, M_PI, sweepPoints), c.L);
        j["theta_sweep"] = {{"theta", s.theta}, {"C_inf", s.cInf}, {"argmin", s.argmin}, {"min", s.min},
                            {"argmax", s.argmax}, {"max", s.max}};
    }
    printJson(j);
    return 0;
}

struct TomoOptions {
    bool knownAlphabet = false, iid = false, pair = false, exact = false, model = false;
    int l = 2;
    long long samples = 0;
    std::uint64_t seed = 1;
    std::string povm = "alphabet";
    std::string record;
};

std::array<double, 3> sampledMub(const Source& src, long long n, std::uint64_t seed) {
    const POVM ms[3] = {instrumentMpm(), instrumentMy(), instrumentM01()};
    std::array<double, 3> p{};
    for (int a = 0; a < 3; ++a) {
        const auto rec = sampleRealizations(src, repeatedProtocol(ms[a]), 1, static_cast<int>(n), seed + a);
        p[a] = empiricalDistribution(rec, 1).prob(Word{rec.outcomes.index(ms[a].labels[0])});
    }
    return p;
}

PairExpectations sampledPair(const Source& src, long long n, std::uint64_t seed) {
    const POVM ms[3] = {instrumentMpm(), instrumentMy(), instrumentM01()};
    PairExpectations e;
    double single[3] = {}, count[3] = {};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            DQMP p;
            p.name = "pair";
            p.states = {"first", "second"};
            p.povm = {ms[a], ms[b]};
            p.delta.resize(2);
            for (const auto& y : ms[a].labels) p.delta[0][y] = 1;
            for (const auto& y : ms[b].labels) p.delta[1][y] = 0;
            const auto rec = sampleRealizations(src, p, 2, static_cast<int>(n), seed + 3 * a + b);
            double corr = 0;
            for (const auto& w : rec.runs) {
                const double s0 = rec.outcomes.symbols[w[0]] == ms[a].labels[0] ? 1 : -1;
                const double s1 = rec.outcomes.symbols[w[1]] == ms[b].labels[0] ? 1 : -1;
                corr += s0 * s1;
                single[a] += s0;
                single[b] += s1;
                count[a] += 1;
                count[b] += 1;
            }
            e.corr[a][b] = corr / static_cast<double>(n);
        }
    for (int a = 0; a < 3; ++a) e.single[a] = single[a] / count[a];
    return e;
}

int runTomo(const Common& c, const TomoOptions& o) {
    const LoadedSource ls = loadSource(c.source);
    const Source& src = ls.source;
    if (!o.exact && o.samples <= 0) throw validationError("tomo needs --exact or --samples N");
    Json j;
    j["schema"] = "qproc.tomo/1";
    j["source"] = ls.ref;
    j["mode"] = o.exact ? "exact" : "sampled";
    if (!o.exact) {
        j["samples"] = o.samples;
        j["seed"] = o.seed;
    }
    Json warnings = Json::array();
    const bool iid = o.iid || (!o.knownAlphabet && !o.pair);
    if (iid) {
        if (src.dim() != 2) throw domainError("i.i.d. tomography is implemented for qubit sources");
        const auto p = o.exact ? mubProbabilities(*blockState(src, 1, true).dense)
                               : sampledMub(src, o.samples, o.seed);
        const DensityMatrix rho = reconstructQubit(p[0], p[1], p[2]);
        const IidCost cost = iidCost(src, std::max(2, c.L));
        j["iid"] = {{"mub_probabilities", {{"+x", p[0]}, {"+y", p[1]}, {"+z", p[2]}}},
                    {"rho", toJson(rho)},
                    {"S_rho", vonNeumannEntropy(rho)},
                    {"cost", {{"S1", cost.s1}, {"rate", cost.rate}, {"gap", cost.gap}, {"L", std::max(2, c.L)}}}};
        if (cost.gap > 1e-6) warnings.push_back("i.i.d. assumption hides correlations");
    }
    if (o.pair) {
        if (src.dim() != 2) throw domainError("pair tomography is implemented for qubit sources");
        const auto e = o.exact ? pauliExpectations(*blockState(src, 2, true).dense) : sampledPair(src, o.samples, o.seed);
        const DensityMatrix rho = reconstructPair(e);
        const auto pm = minPredictiveMeasurement(rho);
        j["pair"] = {{"rho", toJson(rho)},
                     {"S_pair", vonNeumannEntropy(rho)},
                     {"min_predictive",
                      {{"theta", pm.theta}, {"phi", pm.phi}, {"S_min", pm.value}, {"S_marginal", pm.marginal}}}};
    }
    if (o.knownAlphabet) {
        const POVM m = o.povm == "sic" ? instrumentSIC() : alphabetPOVM(src.alphabet);
        const DQMP proto = repeatedProtocol(m);
        WordDistribution freqs;
        Alphabet outs = proto.outcomes();
        if (o.exact) {
            freqs = measuredWordDist(src, proto, o.l);
        } else {
            const auto rec = sampleRealizations(src, proto, o.l, static_cast<int>(o.samples), o.seed);
            freqs = empiricalDistribution(rec, o.l);
            if (!o.record.empty()) {
                std::ofstream out(o.record);
                if (!out) throw validationError("cannot write '" + o.record + "'");
                writeSampleRecord(out, rec);
            }
        }
        auto rep = knownAlphabetInfer(freqs, outs, m, src.alphabet, o.l);
        rep.samples = o.exact ? 0 : o.samples;
        j["known_alphabet"] = toJson(rep, &src.alphabet);
        j["known_alphabet"]["instrument"] = m.name;
        j["known_alphabet"]["l"] = o.l;
        if (!rep.unique) warnings.push_back("word probabilities are not uniquely determined");
        if (o.model) {
            WordDistribution wd;
            wd.length = o.l;
            for (std::size_t i = 0; i < rep.words.size(); ++i)
                if (rep.probs[i] > 1e-12) {
                    wd.words.push_back(rep.words[i]);
                    wd.probs.push_back(rep.probs[i]);
                }
            double tot = 0;
            for (double p : wd.probs) tot += p;
            for (double& p : wd.probs) p /= tot;
            j["model"] = sourceToJson(sourceFromWordDistribution(wd, src.alphabet));
        }
    }
    j["warnings"] = warnings;
    printJson(j);
    return 0;
}

int exitCodeFor(ErrorKind k) {
    switch (k) {
    case ErrorKind::ResourceCap: return kExitCap;
    case ErrorKind::Unrealizable: return kExitUnrealizable;
    default: return kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("QPROC_CAP_DIM")) {
        try {
            caps().denseDim = std::stoll(cap);
        } catch (const std::exception&) {
            std::cerr << "error: QPROC_CAP_DIM must be an integer\n";
            return kExitValidation;
        }
    }

    CLI::App app{"quantum process analysis"};
    app.require_subcommand(1);

    Common an, me, sy, to;
    std::string anCurve = "S";
    auto* analyze = app.add_subcommand("analyze", "block entropy measures of a source");
    addCommon(analyze, an, 12);
    analyze->add_option("--curve", anCurve, "curve for csv output: S dS d2S s E_q T_q H h_mu E T");

    std::string meProto = "repeated:M01", meCurve = "H", sweep;
    int grid = 21;
    auto* measure = app.add_subcommand("measure", "measured process of a source under a protocol");
    addCommon(measure, me, 10);
    measure->add_option("--protocol", meProto, "repeated:<instrument>, preset:<name> or a protocol JSON file");
    measure->add_option("--curve", meCurve, "curve for csv output: H h_mu E T, optionally prefixed recurrent:");
    measure->add_option("--sweep", sweep, "phi,theta surface over [0, pi]^2");
    measure->add_option("--grid", grid, "sweep points per axis")->check(CLI::Range(2, 721));

    std::string syProto = "repeated:M01";
    int machineDepth = 0, sweepPoints = 0;
    double mergeTol = kMergeTol;
    auto* sync = app.add_subcommand("sync", "state uncertainty and synchronization");
    addCommon(sync, sy, 14);
    sync->add_option("--protocol", syProto, "repeated:<instrument>, preset:<name> or a protocol JSON file");
    sync->add_option("--machine", machineDepth, "belief machine depth (0 = none)")->check(CLI::NonNegativeNumber);
    sync->add_option("--merge-tol", mergeTol, "belief merge tolerance");
    sync->add_option("--theta-sweep", sweepPoints, "C_inf over repeated M_theta, theta in [0, pi]");

    TomoOptions tomoOpts;
    auto* tomo = app.add_subcommand("tomo", "tomography and reconstruction");
    addCommon(tomo, to, 8);
    tomo->add_flag("--known-alphabet", tomoOpts.knownAlphabet, "infer word probabilities over the source alphabet");
    tomo->add_option("--l", tomoOpts.l, "word length for --known-alphabet")->check(CLI::Range(1, 6));
    tomo->add_option("--povm", tomoOpts.povm, "instrument for --known-alphabet")->check(CLI::IsMember({"alphabet", "sic"}));
    tomo->add_flag("--model", tomoOpts.model, "emit the order-(l-1) source rebuilt from the inferred words");
    tomo->add_flag("--iid", tomoOpts.iid, "single-qubit reconstruction from mutually unbiased bases");
    tomo->add_flag("--pair", tomoOpts.pair, "two-qubit reconstruction from Pauli correlations");
    tomo->add_flag("--exact", tomoOpts.exact, "use exact probabilities instead of samples");
    tomo->add_option("--samples", tomoOpts.samples, "runs per measurement setting");
    tomo->add_option("--seed", tomoOpts.seed, "random seed");
    tomo->add_option("--record", tomoOpts.record, "write the sampled record to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*analyze) return runAnalyze(an, anCurve);
        if (*measure) return sweep.empty() ? runMeasure(me, meProto, meCurve) : runSweep(me, sweep, grid);
        if (*sync) return runSync(sy, syProto, machineDepth, mergeTol, sweepPoints);
        if (*tomo) return runTomo(to, tomoOpts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exitCodeFor(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
