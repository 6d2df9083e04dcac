#pragma once

// Constructive separation: a point outside a compact nc convex set is
// witnessed by a self-adjoint affine functional phi with Re phi(x) <= gamma x I
// on the set but violated at the point.

#include "ncc/point.hpp"
#include "ncc/rng.hpp"

#include <optional>

namespace ncc {

struct NcSet;

/// phi_p(x) = const_term (x) I_p + (1/2) sum_j (B_j (x) x_j + B_j* (x) x_j*),
/// compared against gamma (x) I_p. For Hermitian B_j and x_j this is the
/// plain pencil-style sum B_j (x) x_j.
struct AffineFunctional {
    int n = 0;              // output level (dimension of gamma)
    CMat const_term;        // Hermitian n x n
    std::vector<CMat> coeffs;  // d complex n x n matrices B_j
    CMat gamma;             // Hermitian n x n

    /// Hermitian (n*p) x (n*p) value Re phi_p(x).
    CMat re_eval(const NcPoint& x) const;

    /// lambda_max(Re phi_p(x) - gamma (x) I_p); positive means violated.
    double excess(const NcPoint& x) const;
};

struct SeparationCertificate {
    AffineFunctional functional;
    double violation = 0.0;  // achieved eigenvalue excess at the separated point
    CVec witness_vector;     // unit vector attaining >= violation
};

/// Builds a certificate for y outside K. Throws std::invalid_argument if y is
/// a member, std::runtime_error on solver failure.
SeparationCertificate separate(const NcSet& k, const NcPoint& y, const Tolerances& tol = {});

/// Checks the violation at y and the set-side inequality: exactly on hull
/// generators, or on 200 random members per level up to probe_levels.
bool verify_certificate(const NcSet& k, const NcPoint& y, const SeparationCertificate& cert,
                        int probe_levels, const Tolerances& tol = {});

namespace detail {
// Certificate from a negative eigenvector of the pencil value at y;
// used by membership to report Outside.
SeparationCertificate certificate_from_pencil(const NcSet& k, const NcPoint& y,
                                              const Tolerances& tol);
// Certificate from an infeasibility dual of the UCP / hull membership SDP:
// gamma = -Herm(Gamma), B_j read from the constraint multipliers.
SeparationCertificate certificate_from_farkas(const NcSet& k, const NcPoint& y,
                                              const std::vector<CMat>& b_coeffs,
                                              const CMat& gamma_raw, const Tolerances& tol);
}  // namespace detail

}  // namespace ncc
