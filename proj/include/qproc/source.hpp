#pragma once

// Hidden Markov chain quantum sources: a classical HMC whose transitions emit
// pure qudit states, plus block-state construction and the example presets.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qproc/classical.hpp"
#include "qproc/qcore.hpp"

namespace qproc {

struct QuantumAlphabet {
    int dim = 0;
    std::vector<std::string> names;
    std::vector<Vec> states;

    void validate() const;
    bool orthogonal(double tol = 1e-12) const;
    Mat overlaps() const; // <psi_i|psi_j>
};

struct Source {
    std::string name;
    HMC hmc;
    QuantumAlphabet alphabet; // indexed like hmc.alphabet
    RVec pi;

    int dim() const { return alphabet.dim; }
    const Vec& ket(int x) const { return alphabet.states[x]; }
};

Source buildSource(const HMC& hmc, const QuantumAlphabet& alphabet, std::string name = "");

struct BlockState {
    int length = 0;
    WordDistribution words;
    WeightedEnsemble ensemble;
    std::optional<DensityMatrix> dense;
};

BlockState blockState(const Source& src, int length, bool materialize = true);

// Von Neumann entropy of the length-l block using whichever of the Gram or dense
// spectrum is smaller; orthogonal Gram components are diagonalised separately.
double blockEntropy(const Source& src, int length);
double blockEntropy(const Source& src, const WordDistribution& words);

struct UnifilarityReport {
    bool unifilar = true;
    // Per state: successor index -> projector onto the span of states emitted toward it.
    std::vector<std::map<int, Mat>> witness;
    std::string counterexample;
};

UnifilarityReport isQuantumUnifilar(const Source& src, double tol = 1e-9);

// Preset registry. Names: iid, period, period5, qgm, 3symbol-qgm, unifilar,
// nonunifilar, qutrit.
using Params = std::map<std::string, std::string>;
Source makePreset(const std::string& name, const Params& params = {});
std::vector<std::string> presetNames();

Source qgm(double phi);
Source threeSymbolQgm();
Source iidSource(const std::vector<std::pair<double, Vec>>& ensemble, const std::vector<std::string>& names);
Source periodicSource(const std::string& word, double phi);
Source unifilarQubit(double p);
Source nonunifilarQubit(double p);
Source unifilarQutrit();

// Angle literal: a number, or k*pi/m forms such as pi, pi/2, 3pi/4, 0.75*pi.
double parseAngle(const std::string& text);

// Named single-qudit kets used by presets and JSON: 0,1,2,+,-,f (psi(phi)).
Vec namedKet(const std::string& name, int dim, double phi);

} // namespace qproc
