#pragma once

// Dense complex matrix kernel: Hermitian structure, Kronecker products,
// isometries, compressions, PSD / rank decisions under explicit tolerances.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace ncc {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct Tolerances {
    double eps_psd = 1e-8;   // minimum-eigenvalue slack
    double eps_rank = 1e-8;  // relative singular-value cutoff
    double eps_eq = 1e-8;    // entrywise equality
    double eps_sdp = 1e-7;   // solver duality gap
    double eps_sym = 1e-8;   // Hermitian symmetrization slack

    void validate() const {
        if (eps_psd < 0 || eps_rank < 0 || eps_eq < 0 || eps_sdp < 0 || eps_sym < 0)
            throw std::invalid_argument("tolerances must be nonnegative");
    }
};

/// Hermitian matrix. Inputs within eps_sym of their conjugate transpose are
/// symmetrized on construction; anything further off is rejected.
class HMat {
public:
    HMat() = default;
    explicit HMat(const CMat& m, double eps_sym = 1e-8);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const CMat& mat() const { return mat_; }

    static HMat identity(int n) { return HMat(CMat::Identity(n, n)); }

private:
    CMat mat_;
};

bool all_finite(const CMat& m);
double max_abs(const CMat& m);

inline bool approx_equal(const CMat& a, const CMat& b, double eps) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs(a - b) <= eps;
}

inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }
inline CMat antihermitian_part(const CMat& m) {
    return (m - m.adjoint()) / Complex(0.0, 2.0);
}

CMat kron(const CMat& a, const CMat& b);

double min_eigenvalue(const HMat& m);
bool is_psd(const HMat& m, const Tolerances& tol);

/// v*v = I within eps_eq; requires rows >= cols.
bool is_isometry(const CMat& v, const Tolerances& tol);

/// Numerical rank with relative cutoff eps_rank * sigma_max.
int numeric_rank(const CMat& m, double eps_rank);

/// Orthonormal basis of the kernel of m (columns), same cutoff convention.
CMat kernel_basis(const CMat& m, double eps_rank);

/// Dimension of {T : T X_j = X_j T and T X_j* = X_j* T for all j}.
/// Solved as the kernel of the stacked commutation system.
int commutant_dim(const std::vector<CMat>& mats, const Tolerances& tol);

/// Orthonormal (in Frobenius inner product) basis of the commutant,
/// returned as n x n matrices.
std::vector<CMat> commutant_basis(const std::vector<CMat>& mats, const Tolerances& tol);

}  // namespace ncc
