#include "ncc/separation.hpp"

#include <Eigen/Eigenvalues>

#include "ncc/ncset.hpp"

namespace ncc {

CMat AffineFunctional::re_eval(const NcPoint& x) const {
    if (static_cast<int>(coeffs.size()) != x.d)
        throw std::invalid_argument("functional: dimension mismatch");
    const int p = x.level;
    CMat out = kron(const_term, CMat::Identity(p, p));
    for (int j = 0; j < x.d; ++j) {
        out += 0.5 * kron(coeffs[j], x.mats[j]);
        out += 0.5 * kron(coeffs[j].adjoint(), x.mats[j].adjoint());
    }
    return out;
}

double AffineFunctional::excess(const NcPoint& x) const {
    CMat e = re_eval(x) - kron(gamma, CMat::Identity(x.level, x.level));
    return -min_eigenvalue(HMat(-e, 1e-7));
}

namespace detail {

namespace {

SeparationCertificate finalize(AffineFunctional f, const NcPoint& y, const Tolerances& tol) {
    // scale to the trace-norm normalization sum_j ||B_j||_* = d
    double tn = 0.0;
    for (const CMat& b : f.coeffs) tn += b.jacobiSvd().singularValues().sum();
    if (tn > 1e-14) {
        double s = static_cast<double>(f.coeffs.size()) / tn;
        for (CMat& b : f.coeffs) b *= s;
        f.gamma *= s;
        f.const_term *= s;
    }
    CMat e = f.re_eval(y) - kron(f.gamma, CMat::Identity(y.level, y.level));
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(e));
    const Eigen::Index last = es.eigenvalues().size() - 1;
    double viol = es.eigenvalues()(last);
    if (viol < tol.eps_psd)
        throw std::runtime_error("separation: certificate fails to violate at y");
    SeparationCertificate cert;
    cert.functional = std::move(f);
    cert.violation = viol;
    cert.witness_vector = es.eigenvectors().col(last);
    return cert;
}

}  // namespace

SeparationCertificate certificate_from_pencil(const NcSet& k, const NcPoint& y,
                                              const Tolerances& tol) {
    const Pencil& p = *k.pencil();
    const int n = y.level;
    const int kd = p.pencil_dim();
    CMat l = p.eval(y);
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(l));
    if (es.eigenvalues()(0) >= -tol.eps_psd)
        throw std::invalid_argument("separation: point is a member");
    // negative eigenvector xi of L(y), reshaped to V: compression by V x I
    // turns L(x) >= 0 into gamma (x) I - sum B'_h (x) H_h(x) >= 0.
    CVec xi = es.eigenvectors().col(0);
    CMat v(kd, n);
    for (int i = 0; i < kd; ++i)
        for (int a = 0; a < n; ++a) v(i, a) = xi(i * n + a);
    AffineFunctional f;
    f.n = n;
    f.const_term = CMat::Zero(n, n);
    f.gamma = v.adjoint() * p.q * v;
    std::vector<CMat> bh;
    for (const CMat& a : p.coeffs) bh.push_back(-(v.adjoint() * a * v).eval());
    if (p.hermitian) {
        f.coeffs = std::move(bh);
    } else {
        for (int j = 0; j < p.d; ++j)
            f.coeffs.push_back(bh[2 * j] - Complex(0, 1) * bh[2 * j + 1]);
    }
    return finalize(std::move(f), y, tol);
}

SeparationCertificate certificate_from_farkas(const NcSet& k, const NcPoint& y,
                                              const std::vector<CMat>& b_coeffs,
                                              const CMat& gamma_raw, const Tolerances& tol) {
    (void)k;
    // The solver's improving ray pairs each complex multiplier with the
    // entrywise conjugate of the raw coefficient matrix, so the multipliers
    // must be conjugated to act as functional coefficients on members.
    AffineFunctional f;
    f.n = y.level;
    f.const_term = CMat::Zero(f.n, f.n);
    f.gamma = -hermitian_part(gamma_raw.conjugate());
    for (const CMat& b : b_coeffs) f.coeffs.push_back(b.conjugate());
    return finalize(std::move(f), y, tol);
}

}  // namespace detail

SeparationCertificate separate(const NcSet& k, const NcPoint& y, const Tolerances& tol) {
    MembershipResult m = membership(k, y, tol);
    if (m.inside) throw std::invalid_argument("separate: point is a member");
    return *m.witness;
}

bool verify_certificate(const NcSet& k, const NcPoint& y, const SeparationCertificate& cert,
                        int probe_levels, const Tolerances& tol) {
    if (cert.violation < tol.eps_psd) return false;
    // the violation must actually be achieved at y
    if (cert.functional.excess(y) < cert.violation - tol.eps_eq) return false;
    if (cert.witness_vector.size() > 0) {
        const CVec& w = cert.witness_vector;
        if (std::abs(w.norm() - 1.0) > 1e-6) return false;
        CMat e = cert.functional.re_eval(y) -
                 kron(cert.functional.gamma, CMat::Identity(y.level, y.level));
        if ((w.adjoint() * e * w)(0).real() < cert.violation - tol.eps_eq) return false;
    }
    // set side: exact on hull generators, sampled otherwise
    if (auto* h = k.hull()) {
        for (const NcPoint& g : h->generators)
            if (cert.functional.excess(g) > tol.eps_psd) return false;
        return true;
    }
    Rng rng(0x5eedULL);
    for (int level = 1; level <= probe_levels; ++level) {
        for (int trial = 0; trial < 200; ++trial) {
            double beta = (trial % 4 == 0) ? 1.0 : rng.uniform();
            NcPoint x = sample_member(k, level, rng, beta, tol);
            if (cert.functional.excess(x) > 10 * tol.eps_psd) return false;
        }
    }
    return true;
}

}  // namespace ncc
