#pragma once

// Dense complex linear algebra and elementary quantum-information functionals.
// All entropies are in bits.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qproc/errors.hpp"

namespace qproc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

constexpr double kEigClamp = 1e-12;
constexpr double kSupportTol = 1e-10;
constexpr double kStateTol = 1e-10;

struct PureState {
    Vec amp;

    PureState() = default;
    explicit PureState(Vec a); // validates unit norm
    int dim() const { return static_cast<int>(amp.size()); }
    Mat projector() const { return amp * amp.adjoint(); }
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    // Symmetrizes, then checks Hermiticity, PSD and unit trace.
    DensityMatrix(const Mat& m, std::vector<int> dims);
    explicit DensityMatrix(const Mat& m);
    static DensityMatrix fromPure(const PureState& psi);

    const Mat& matrix() const { return m_; }
    const std::vector<int>& dims() const { return dims_; }
    int size() const { return static_cast<int>(m_.rows()); }

private:
    Mat m_;
    std::vector<int> dims_;
};

struct WeightedEnsemble {
    std::vector<double> probs;
    std::vector<Vec> states;

    void validate() const;
    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    Mat density() const;
};

// Basis and parametrised states.
Vec basisKet(int d, int i);
Vec ketPsi(double phi); // cos(phi/2)|0> + sin(phi/2)|1>
Vec ketPlus();
Vec ketMinus();

PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix partialTrace(const DensityMatrix& rho, const std::vector<int>& keep);

// Eigenvalues of a Hermitian matrix, ascending.
RVec hermitianEigenvalues(const Mat& m);

double shannonEntropy(const std::vector<double>& p);
double entropyOfSpectrum(const RVec& lambda);
double vonNeumannEntropy(const DensityMatrix& rho);

// Returns +infinity when supp(rho) is not contained in supp(sigma).
double quantumRelativeEntropy(const DensityMatrix& rho, const DensityMatrix& sigma);

double conditionalQuantumEntropy(const DensityMatrix& rhoAB, const std::vector<int>& a,
                                 const std::vector<int>& b);
double quantumMutualInformation(const DensityMatrix& rhoAB, const std::vector<int>& a,
                                const std::vector<int>& b);

// Nonzero spectrum of sum_w p_w |psi_w><psi_w| through the N x N Gram matrix.
RVec ensembleSpectrum(const WeightedEnsemble& ens);
// Same spectrum from the Gram matrix given directly (must be Hermitian PSD).
RVec gramSpectrum(const Mat& gram);

} // namespace qproc
