#pragma once

// Quantum block-entropy hierarchy of a source: S(l), its derivatives and the
// finite-L estimates of entropy rate, excess entropy, transient information,
// redundancy, predictability and Markov order.

#include <vector>

#include "qproc/classical.hpp"
#include "qproc/source.hpp"

namespace qproc {

struct QuantumMeasureTable {
    int L = 0;
    double logDim = 0;
    std::vector<double> S, dS, d2S, s, Eq, Tq, TqPlain, EqMi;
    double sHat = 0, EqHat = 0, TqHat = 0, TqPlainHat = 0;
    double Gq = 0; // sHat - log2 d
    double Rq = 0; // log2 d - sHat
    MarkovOrder order;
};

std::vector<double> quantumBlockEntropyCurve(const Source& src, int L);

QuantumMeasureTable quantumMeasures(const Source& src, int L, double eps = 1e-9);

// Closed-form rate sum_i pi_i S(rho_i), rho_i the mixture emitted from state i.
// Only defined for quantum-unifilar sources.
double entropyRateExact(const Source& src);

} // namespace qproc
