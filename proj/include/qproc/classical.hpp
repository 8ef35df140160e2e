#pragma once

// Classical stochastic processes: hidden Markov chains, word distributions and
// the block-entropy measure hierarchy.

#include <optional>
#include <string>
#include <vector>

#include "qproc/qcore.hpp"

namespace qproc {

using Word = std::vector<int>; // symbol indices

struct Alphabet {
    std::vector<std::string> symbols;

    void validate() const;
    int size() const { return static_cast<int>(symbols.size()); }
    int index(const std::string& s) const; // -1 when absent
    std::string render(const Word& w) const;
};

struct WordDistribution {
    int length = 0;
    std::vector<Word> words; // lexicographic by symbol index
    std::vector<double> probs;

    double entropy() const { return shannonEntropy(probs); }
    double prob(const Word& w) const; // 0 when absent
    WordDistribution dropLast() const;
    WordDistribution dropFirst() const;
    void validate() const;
};

struct HMC {
    std::vector<std::string> states;
    Alphabet alphabet;
    std::vector<RMat> T; // T[x](i, j)

    int numStates() const { return static_cast<int>(states.size()); }
    RMat total() const;
    void validate() const;
};

RVec hmcStationary(const HMC& m);

// Word distribution for the chain started from `init` (stationary when omitted).
WordDistribution hmcWordDistribution(const HMC& m, int length,
                                     const std::optional<RVec>& init = std::nullopt);

struct MarkovOrder {
    bool detected = false;
    int value = 0; // the order when detected, otherwise L-1 (order exceeds it)
    std::string describe() const;
};

// Smallest R in [0, L-1] from which the gain curve r(m) = B(m) - B(m-1), with
// r(0) the log alphabet size, stays at r(L) within eps for every m in [R, L];
// otherwise the order is reported as exceeding L-1.
MarkovOrder detectMarkovOrder(const std::vector<double>& rate, double eps);

struct ClassicalMeasureTable {
    int L = 0;
    double logAlphabet = 0;
    std::vector<double> H, dH, d2H, hmu, E, T, Tplain, Emi;
    double hmuHat = 0, EHat = 0, THat = 0, R = 0, G = 0;
    MarkovOrder order;
};

// dists[l] is the length-l distribution for l = 0..L.
ClassicalMeasureTable classicalMeasures(const std::vector<WordDistribution>& dists, int alphabetSize,
                                        double eps = 1e-9, bool checkConsistency = true);

// Convenience: distributions for l = 0..L from an HMC.
std::vector<WordDistribution> hmcWordDistributions(const HMC& m, int L);

// Shared estimator arithmetic for any block-entropy curve B(0..L) with boundary B'(0) = logBase.
struct EntropyCurveMeasures {
    std::vector<double> d, d2, rate, E, T, Tplain, Emi;
};
EntropyCurveMeasures entropyCurveMeasures(const std::vector<double>& B, double logBase);

} // namespace qproc
