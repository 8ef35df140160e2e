#pragma once

// Instruments (POVMs), deterministic measurement protocols and the exact
// classical processes they induce on a source.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qproc/classical.hpp"
#include "qproc/source.hpp"

namespace qproc {

struct POVM {
    std::string name;
    int dim = 0;
    std::vector<std::string> labels;
    std::vector<Mat> elements;

    void validate() const;
    bool isPVM(double tol = 1e-9) const;
    bool rankOne(double tol = 1e-9) const;
    int size() const { return static_cast<int>(elements.size()); }
};

// Projective measurement onto the given orthonormal kets.
POVM pvmFromKets(const std::string& name, const std::vector<std::string>& labels, const std::vector<Vec>& kets);

POVM instrumentM01();
POVM instrumentMpm();
POVM instrumentMy();
POVM instrumentMtheta(double theta); // outcomes "psi" (psi(theta)) and "psi+pi"
POVM instrumentM012();
POVM instrumentMpm2();
POVM instrumentSIC();
POVM alphabetPOVM(const QuantumAlphabet& q); // outcomes: alphabet names plus "n"

// Registry names: M01, Mpm, My, M012, Mpm2, SIC, Mtheta:<angle>, alphabet (needs a source).
POVM instrumentByName(const std::string& ref, const Source* src = nullptr);
std::vector<std::string> standardInstrumentNames();
// Registry members that apply to dimension d (Mtheta sampled at a few angles for qubits).
std::vector<POVM> standardInstruments(int d);

std::vector<double> bornDistribution(const DensityMatrix& rho, const POVM& m);

struct DQMP {
    std::string name;
    std::vector<std::string> states;
    int start = 0;
    std::vector<POVM> povm;                    // per protocol state
    std::vector<std::map<std::string, int>> delta; // per protocol state: outcome -> state
    std::optional<RVec> sourceInit;                // default initial source distribution

    void validate() const;
    int numStates() const { return static_cast<int>(states.size()); }
    int stateIndex(const std::string& s) const; // -1 when absent
    Alphabet outcomes() const;                  // union of instrument labels, first-seen order
    std::vector<bool> recurrentStates() const;  // members of closed strongly connected classes
};

DQMP repeatedProtocol(const POVM& m);

// Source-specific preset protocols (e.g. "adaptive" for the qutrit, 3-symbol QGM,
// unifilar qubit and periodic sources; "012-sync"/"pm2-sync" for the qutrit).
DQMP presetProtocol(const std::string& name, const Source& src, const Params& sourceParams = {});
std::vector<std::string> presetProtocolNames(const std::string& sourcePreset);

// Protocol that tracks the set of source states consistent with the outcomes,
// measuring `transient` until the set is a singleton and then the per-state
// instrument in `recurrent`.
DQMP supportTrackingProtocol(const Source& src, const POVM& transient, const std::vector<POVM>& recurrent,
                             const std::string& name);

// Joint (source state, protocol state) forward recursion.
struct JointBranch {
    Word word;      // outcome indices into the protocol's outcome alphabet
    int protoState; // protocol state after the last outcome
    RVec alpha;     // unnormalized source-state weights after the last transition
};

class MeasuredRecursion {
public:
    MeasuredRecursion(const Source& src, const DQMP& proto);

    const Alphabet& outcomes() const { return outcomes_; }
    // weight[s][y][x] = <psi_x|E_{s,y}|psi_x>; y indexes the instrument of state s
    double weight(int s, int y, int x) const { return w_[s][y][x]; }
    int outcomeIndex(int s, int y) const { return yIndex_[s][y]; }
    // Successor (protocol state, outcome alphabet index) or throws when delta is missing.
    int next(int s, int y) const;
    // alpha' = sum_x w(s,y,x) alpha T^x
    RVec step(const RVec& alpha, int s, int y) const;
    std::vector<JointBranch> expand(const std::vector<JointBranch>& cur, bool keepWords = true) const;

    const Source& source() const { return src_; }
    const DQMP& protocol() const { return proto_; }

private:
    const Source& src_;
    const DQMP& proto_;
    Alphabet outcomes_;
    std::vector<std::vector<std::vector<double>>> w_;
    std::vector<std::vector<int>> yIndex_;
};

// Explicit init, else the protocol's sourceInit, else the stationary distribution.
RVec protocolInit(const Source& src, const DQMP& proto, const std::optional<RVec>& init);

WordDistribution measuredWordDist(const Source& src, const DQMP& proto, int length,
                                  const std::optional<RVec>& init = std::nullopt);

// Same distribution evaluated as tr(E_{y_0} x ... x E_{y_{l-1}} rho_{0:l}) on the dense block state.
WordDistribution measuredWordDistDirect(const Source& src, const DQMP& proto, int length);

struct MeasuredProcess {
    Alphabet outcomes;
    std::vector<WordDistribution> dists; // l = 0..L, transient-inclusive
    bool stationary = false;             // repeated POVM started at pi
    // Recurrent-conditioned family, present when the recurrent protocol states
    // are reached with probability 1 at finite depth.
    std::optional<std::vector<WordDistribution>> recurrent;
    int syncDepth = -1;
};

MeasuredProcess measuredProcess(const Source& src, const DQMP& proto, int L,
                                const std::optional<RVec>& init = std::nullopt);

} // namespace qproc
