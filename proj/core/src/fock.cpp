#include "ncc/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace ncc {

namespace {

/// index of the first word of a given length in the length-graded basis
long block_offset(int d, int len) {
    long off = 0, pow = 1;
    for (int l = 0; l < len; ++l) {
        off += pow;
        pow *= d;
    }
    return off;
}

}  // namespace

int fock_dim(int d, int max_len) {
    if (d < 1 || max_len < 0) throw std::invalid_argument("fock_dim: bad arguments");
    return static_cast<int>(block_offset(d, max_len + 1));
}

std::vector<CMat> fock_creation_ops(int d, int max_len) {
    const int dim = fock_dim(d, max_len);
    std::vector<CMat> ops(d, CMat::Zero(dim, dim));
    // basis: words graded by length, then by base-d value with the first
    // letter most significant, so prepending j sends value v to j*d^len + v
    long pow = 1;
    for (int len = 0; len < max_len; ++len) {
        const long src = block_offset(d, len);
        const long dst = block_offset(d, len + 1);
        for (long v = 0; v < pow; ++v)
            for (int j = 0; j < d; ++j) ops[j](dst + j * pow + v, src + v) = 1;
        pow *= d;
    }
    return ops;
}

NcSet cuntz_opsys(int max_len, int d, const Tolerances& tol) {
    OpSysBasis basis;
    basis.d = d;
    basis.gens = fock_creation_ops(d, max_len);
    basis.ambient_dim = fock_dim(d, max_len);
    return opsys_set(std::move(basis), tol);
}

SemicircularReport semicircular_defect(Complex lambda, int word_cap) {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-8)
        throw std::invalid_argument("semicircular_defect: lambda must be unimodular");
    if (word_cap < 2) throw std::invalid_argument("semicircular_defect: word_cap < 2");
    const double r = lambda.real(), s = lambda.imag();
    const int f = fock_dim(2, word_cap);
    const CMat l1 = fock_creation_ops(2, word_cap)[0];

    // small model on C + F: s_1 acts as lambda on the leading line and as the
    // first creation operator on F
    const int nh = 1 + f;
    CMat sig = CMat::Zero(nh, nh);
    sig(0, 0) = lambda;
    sig.bottomRightCorner(f, f) = l1;

    // big model on C + F + F: the leading line couples into the second Fock
    // copy with weight s, splitting lambda into its real and imaginary parts
    const int nl = 1 + 2 * f;
    CMat tau = CMat::Zero(nl, nl);
    tau(0, 0) = r;
    tau.block(1, 1, f, f) = l1;
    tau.block(1 + f, 1 + f, f, f) = l1;
    tau(1 + f, 0) = s;  // s * (vacuum of the second copy)

    const CMat a_small = sig + sig.adjoint();
    const CMat a_big = tau + tau.adjoint();
    const CMat defect = (a_big * a_big).topLeftCorner(nh, nh) - a_small * a_small;

    SemicircularReport rep;
    rep.lambda = lambda;
    rep.s2 = s * s;
    rep.word_cap = word_cap;
    rep.space_dim = nh;
    // a_1^2 moves word lengths by at most 2, so rows for words of length
    // <= word_cap - 2 are unaffected by the truncation edge
    rep.safe_dim = 1 + fock_dim(2, word_cap - 2);
    CMat safe = defect.topLeftCorner(rep.safe_dim, rep.safe_dim);
    rep.defect_norm = safe.operatorNorm();
    CMat predicted = CMat::Zero(rep.safe_dim, rep.safe_dim);
    predicted(0, 0) = rep.s2;
    rep.identity_residual = max_abs(safe - predicted);
    return rep;
}

}  // namespace ncc
