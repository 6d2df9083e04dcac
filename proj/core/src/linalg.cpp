#include "ncc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ncc {

bool all_finite(const CMat& m) {
    return m.allFinite();
}

double max_abs(const CMat& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

HMat::HMat(const CMat& m, double eps_sym) {
    if (m.rows() != m.cols()) throw std::invalid_argument("HMat: not square");
    if (m.rows() < 1) throw std::invalid_argument("HMat: dim must be >= 1");
    if (!all_finite(m)) throw std::invalid_argument("HMat: non-finite entries");
    if (max_abs(m - m.adjoint()) > eps_sym)
        throw std::invalid_argument("HMat: input is not Hermitian within tolerance");
    mat_ = hermitian_part(m);
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double min_eigenvalue(const HMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_psd(const HMat& m, const Tolerances& tol) {
    return min_eigenvalue(m) >= -tol.eps_psd;
}

bool is_isometry(const CMat& v, const Tolerances& tol) {
    if (v.rows() < v.cols()) return false;
    CMat g = v.adjoint() * v;
    return max_abs(g - CMat::Identity(v.cols(), v.cols())) <= tol.eps_eq;
}

int numeric_rank(const CMat& m, double eps_rank) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double cutoff = eps_rank * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

CMat kernel_basis(const CMat& m, double eps_rank) {
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    double cutoff = eps_rank * smax;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

namespace {

// Rows of the linear system T X = X T, T X* = X* T over vec(T), T in M_n.
// Using vec by columns: vec(T X) = (X^T kron I) vec T, vec(X T) = (I kron X) vec T.
CMat commutation_system(const std::vector<CMat>& mats) {
    if (mats.empty()) return CMat::Zero(0, 0);
    const int n = static_cast<int>(mats[0].rows());
    const CMat id = CMat::Identity(n, n);
    CMat sys(2 * static_cast<int>(mats.size()) * n * n, n * n);
    int row = 0;
    for (const CMat& x : mats) {
        if (x.rows() != n || x.cols() != n)
            throw std::invalid_argument("commutant: matrices must be square, same dim");
        sys.block(row, 0, n * n, n * n) = kron(x.transpose(), id) - kron(id, x);
        row += n * n;
        CMat xs = x.adjoint();
        sys.block(row, 0, n * n, n * n) = kron(xs.transpose(), id) - kron(id, xs);
        row += n * n;
    }
    return sys;
}

}  // namespace

int commutant_dim(const std::vector<CMat>& mats, const Tolerances& tol) {
    if (mats.empty()) return 0;
    const int n = static_cast<int>(mats[0].rows());
    return n * n - numeric_rank(commutation_system(mats), tol.eps_rank);
}

std::vector<CMat> commutant_basis(const std::vector<CMat>& mats, const Tolerances& tol) {
    if (mats.empty()) return {};
    const int n = static_cast<int>(mats[0].rows());
    CMat ker = kernel_basis(commutation_system(mats), tol.eps_rank);
    std::vector<CMat> basis;
    basis.reserve(ker.cols());
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
        CMat t(n, n);
        for (int j = 0; j < n; ++j) t.col(j) = ker.col(c).segment(j * n, n);
        basis.push_back(t);
    }
    return basis;
}

}  // namespace ncc
