#pragma once

// UCP representing maps in Stinespring form, the nc Choquet order (necessary
// convex-test battery), the dilation order (moment-SDP feasibility of the
// intertwining map), and the nc Jensen inequality check.
//
// Verdict semantics: Choquet-side Violated is certified by a convex test
// function with an eigenvalue gap; the passing outcome is Inconclusive
// because only finitely many convex functions are tested. Dilation-side
// Violated is conclusive: the relaxed feasibility set contains every true
// intertwining map, so relaxed infeasibility rules them all out.

#include "ncc/envelope.hpp"

namespace ncc {

struct UcpRep {
    int target_level = 0;   // n: the map lands in M_n
    NcPoint point;          // Stinespring point at level p >= n
    CMat isometry;          // p x n, isometry* isometry = I_n
    bool minimal_flag = false;

    static UcpRep delta(const NcPoint& x);  // mu = delta_x, isometry = I
};

NcPoint barycenter(const UcpRep& mu);
/// mu(f) = isometry* f(point) isometry
CMat apply(const UcpRep& mu, const FreePoly& f);

/// Compression of mu onto the saturated subspace span{w(x) alpha xi}: the
/// result evaluates identically on all words and is minimal. Word degree is
/// capped at p*p (span dimensions stabilize no later than that).
UcpRep minimal_representation(const UcpRep& mu, const Tolerances& tol = {});

enum class OrderRelation { Dominates, Violated, Inconclusive };

struct OrderVerdict {
    OrderRelation relation = OrderRelation::Inconclusive;
    std::optional<FreePoly> witness;  // convex f with mu(f) not <= nu(f)
    double gap = 0.0;                 // most positive eigenvalue of mu(f)-nu(f)
    // dilation route, Dominates: moments of the intertwining map tau on all
    // words up to the relaxation degree, as (word, matrix) pairs
    std::vector<std::pair<Word, CMat>> tau_moments;
};

/// Necessary tests for mu <=_c nu: supplied functions, truncated operator
/// convex rationals on a t-grid (single Hermitian letter only), and squares
/// of random affine polynomials. Never returns Dominates.
OrderVerdict choquet_order_check(const NcSet& k, const UcpRep& mu, const UcpRep& nu,
                                 const std::vector<FreePoly>& test_functions = {},
                                 std::uint64_t seed = 1, const Tolerances& tol = {});

/// Decides mu <=_d nu by moment-SDP feasibility: with (x, alpha) a minimal
/// representation of mu, look for a unital moment functional tau at level p
/// with barycenter x and alpha* tau(w) alpha = nu(w) for |w| <= 2*relaxation_level.
OrderVerdict dilation_order_check(const NcSet& k, const UcpRep& mu, const UcpRep& nu,
                                  int relaxation_level = 3, const Tolerances& tol = {});

struct JensenReport {
    bool passed = false;
    double max_violation = 0.0;  // most positive eigenvalue of f(x) - mu(f)
    int instances = 0;
};

/// f(x) <= mu(f) for random members x and random representing maps with
/// barycenter x built from random dilation chains.
JensenReport jensen_check(const NcSet& k, const FreePoly& f, int samples,
                          std::uint64_t seed = 1, const Tolerances& tol = {});

}  // namespace ncc
