#pragma once

// Finite-sample simulation and reconstruction: single-qubit and pair tomography,
// known-alphabet word-probability inference, source reconstruction and the
// minimal predictive measurement search.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qproc/measurement.hpp"

namespace qproc {

struct SampleRecord {
    std::uint64_t seed = 0;
    std::string protocol;
    std::string source;
    int length = 0;
    Alphabet outcomes;
    std::vector<Word> runs;
    std::vector<std::vector<int>> hidden; // source state paths, filled only on request
};

// Independent runs of `length` outcomes, each from a fresh draw of the initial
// distribution. Run r uses its own generator seeded from (seed, r).
SampleRecord sampleRealizations(const Source& src, const DQMP& proto, int length, int count, std::uint64_t seed,
                                bool keepHidden = false, const std::optional<RVec>& init = std::nullopt);

// First line: JSON header; then one run per line as space-separated labels.
void writeSampleRecord(std::ostream& out, const SampleRecord& rec);
SampleRecord readSampleRecord(std::istream& in);

// Empirical distribution of the first `length` outcomes over all runs.
WordDistribution empiricalDistribution(const SampleRecord& rec, int length);

// Eigenvalues clipped at zero, then trace renormalized.
DensityMatrix physicalProjection(const Mat& m, std::vector<int> dims = {});

// Bloch vector r = 2 Pr(+axis) - 1, scaled back to the unit ball when |r| > 1.
DensityMatrix reconstructQubit(double pxPlus, double pyPlus, double pzPlus);
std::array<double, 3> mubProbabilities(const DensityMatrix& rho); // Pr(+x), Pr(+y), Pr(+z)

struct PairExpectations {
    double corr[3][3] = {};   // <sigma_a x sigma_b>, a,b in x,y,z
    double single[3] = {};    // shared one-site marginal <sigma_a>
};

PairExpectations pauliExpectations(const DensityMatrix& rho2);
DensityMatrix reconstructPair(const PairExpectations& e);

struct ReconstructionReport {
    std::optional<DensityMatrix> rho;
    std::vector<Word> words;   // quantum-alphabet words when inferring p_w
    std::vector<double> probs;
    long long samples = 0;     // 0 for exact probabilities
    double residual = 0;
    bool unique = true;
    int rank = 0;
    int unknowns = 0;
    bool projected = false;
    std::string note;
};

// Simplex-constrained least squares for p_w from l-word outcome frequencies of
// a repeated instrument on sources with alphabet Q.
ReconstructionReport knownAlphabetInfer(const WordDistribution& freqs, const Alphabet& outcomeAlphabet,
                                        const POVM& m, const QuantumAlphabet& q, int length);

// Single-state source emitting the eigenvectors of rho with their eigenvalues.
Source sourceFromEigendecomposition(const DensityMatrix& rho);
// Order-(l-1) Markov source whose states are the (l-1)-words of positive probability.
Source sourceFromWordDistribution(const WordDistribution& words, const QuantumAlphabet& q);

struct PredictiveMeasurement {
    POVM pvm;
    double theta = 0, phi = 0; // Bloch angles of the first projector
    double value = 0;          // sum_y Pr(y) S(rho_1^y)
    double marginal = 0;       // S(rho_1)
};

PredictiveMeasurement minPredictiveMeasurement(const DensityMatrix& rho2, int thetaPoints = 180, int phiPoints = 360);

struct IidCost {
    double s1 = 0;   // S(1)
    double rate = 0; // entropy rate estimate at L
    double gap = 0;  // S(1) - rate
};

IidCost iidCost(const Source& src, int L);

} // namespace qproc
