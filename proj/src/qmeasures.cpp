#include "qproc/qmeasures.hpp"

#include <cmath>

namespace qproc {

std::vector<double> quantumBlockEntropyCurve(const Source& src, int L) {
    if (L < 0) throw domainError("L must be nonnegative");
    std::vector<double> S(L + 1, 0.0);
    for (int l = 1; l <= L; ++l) S[l] = blockEntropy(src, l);
    return S;
}

QuantumMeasureTable quantumMeasures(const Source& src, int L, double eps) {
    if (L < 2) throw domainError("quantum measures need L >= 2");
    QuantumMeasureTable t;
    t.L = L;
    t.logDim = std::log2(static_cast<double>(src.dim()));
    t.S = quantumBlockEntropyCurve(src, L);
    auto c = entropyCurveMeasures(t.S, t.logDim);
    t.dS = c.d;
    t.d2S = c.d2;
    t.s = c.rate;
    t.Eq = c.E;
    t.Tq = c.T;
    t.TqPlain = c.Tplain;
    t.EqMi = c.Emi;
    t.sHat = t.s[L];
    t.EqHat = t.Eq[L];
    t.TqHat = t.Tq[L];
    t.TqPlainHat = t.TqPlain[L];
    t.Gq = t.sHat - t.logDim;
    t.Rq = t.logDim - t.sHat;
    t.order = detectMarkovOrder(t.s, eps);
    return t;
}

double entropyRateExact(const Source& src) {
    auto u = isQuantumUnifilar(src);
    if (!u.unifilar)
        throw Error(ErrorKind::NoClosedForm, "no closed form: source is not quantum unifilar (" +
                                                 u.counterexample + ")");
    const int d = src.dim();
    double s = 0;
    for (int i = 0; i < src.hmc.numStates(); ++i) {
        Mat rho = Mat::Zero(d, d);
        for (int x = 0; x < src.hmc.alphabet.size(); ++x) {
            const double w = src.hmc.T[x].row(i).sum();
            if (w > 0) rho += w * src.ket(x) * src.ket(x).adjoint();
        }
        s += src.pi(i) * entropyOfSpectrum(hermitianEigenvalues(rho));
    }
    return s;
}

} // namespace qproc
