#pragma once

// Truncated Fock-space models: left creation operators on words of bounded
// length (entries pushed past the cap are dropped), the associated truncated
// Cuntz-type operator system, and a compression-defect computation for the
// semicircular operator a_1 = s_1 + s_1*.
//
// Truncation makes every formula exact on the "safe" subspace of words short
// enough that no product of at most deg(f) generators can spill past the cap;
// all reported norms are restricted to that subspace.

#include "ncc/ncset.hpp"

namespace ncc {

/// Number of words of length <= max_len over a d-letter alphabet.
int fock_dim(int d, int max_len);

/// Left creation operators L_1..L_d on the span of words of length <= max_len:
/// L_j maps the word w to jw, and to 0 when jw would exceed the cap.
std::vector<CMat> fock_creation_ops(int d, int max_len);

/// Operator-system set generated by the truncated creation operators
/// (d = 2 matches the row-contraction state space at every level).
NcSet cuntz_opsys(int max_len, int d = 2, const Tolerances& tol = {});

struct SemicircularReport {
    Complex lambda;          // unimodular parameter, lambda = r + i s
    double s2 = 0.0;         // s^2, the predicted defect weight
    int word_cap = 0;        // Fock truncation length N
    int space_dim = 0;       // dim(C + F), the compression target
    int safe_dim = 0;        // rows kept for the exact identity (words <= N-2)
    double defect_norm = 0.0;        // ||psi(a_1^2) - sigma(a_1^2)|| on the safe part
    double identity_residual = 0.0;  // ||defect - s^2 eta eta*|| on the safe part
};

/// Compare the irreducible model sigma_lambda on C + F with the compression
/// psi_lambda of the bigger model tau_lambda on C + F + F: the difference of
/// the two values at a_1^2 equals s^2 eta eta* on the safe subspace, where
/// eta spans the leading C summand. A nonzero s therefore exhibits a second
/// representing map, while lambda = +-1 gives a zero defect.
SemicircularReport semicircular_defect(Complex lambda, int word_cap = 8);

}  // namespace ncc
