#pragma once

// Observer synchronization: belief filtering over source states, average state
// uncertainty curves, synchronization information and belief machines.

#include <optional>
#include <string>
#include <vector>

#include "qproc/measurement.hpp"

namespace qproc {

constexpr double kSyncEntropy = 1e-12;
constexpr double kMergeTol = 1e-9;

struct BeliefState {
    RVec dist;          // over source states, after the last emission's transition
    Word word;          // outcome indices into the protocol outcome alphabet
    int protoState = 0; // protocol state reached after the word
    double prob = 1;    // Pr(word)
    double entropy() const;
};

// Throws ErrorKind::Unrealizable when the word has probability zero.
BeliefState beliefFilter(const Source& src, const DQMP& proto, const Word& outcomes,
                         const std::optional<RVec>& init = std::nullopt);
BeliefState beliefFilter(const Source& src, const DQMP& proto, const std::vector<std::string>& labels,
                         const std::optional<RVec>& init = std::nullopt);

struct UncertaintyCurve {
    std::vector<double> H; // H(l|M), l = 0..L
    double cInf = 0;       // H(L|M)
    bool converged = false; // |H(L) - H(L-1)| < 1e-4
    double syncInfo = 0;   // sum_{l=0}^{L} H(l|M)
    bool diverging = false; // cInf > 1e-3
};

UncertaintyCurve stateUncertaintyCurve(const Source& src, const DQMP& proto, int L,
                                       const std::optional<RVec>& init = std::nullopt);

// Truncated synchronization information; nullopt when the curve does not vanish.
std::optional<double> syncInfo(const Source& src, const DQMP& proto, int L);

struct ThetaSweep {
    std::vector<double> theta, cInf;
    double argmin = 0, min = 0, argmax = 0, max = 0;
};

ThetaSweep thetaSweep(const Source& src, const std::vector<double>& thetas, int L);
std::vector<double> uniformGrid(double lo, double hi, int points);

struct BeliefNode {
    RVec belief;
    int protoState = 0;
    int depth = 0;
    bool expanded = false;
    bool recurrent = false;
};

struct BeliefEdge {
    int from = 0, to = 0;
    std::string label;
    double prob = 0;
};

struct BeliefMachine {
    std::vector<BeliefNode> nodes;
    std::vector<BeliefEdge> edges;
    bool closed = true; // every node expanded within the depth budget
    std::string warning;
};

BeliefMachine beliefMachine(const Source& src, const DQMP& proto, int depth, double mergeTol = kMergeTol,
                            const std::optional<RVec>& init = std::nullopt);

} // namespace qproc
