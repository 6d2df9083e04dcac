#pragma once

// Dilation calculus: one-step dilation search, maximality, irreducibility,
// nc extreme point classification, iterated dilation, and reconstruction of
// members from extreme-point candidates.
//
// One-row reduction: if x has any nontrivial dilation y at level n+r, then
// compressing y onto H_n plus a single vector that carries coupling yields a
// nontrivial dilation at level n+1, so the (n+1)-search is decision-complete.
//
// Maximality gate: the SDP resolves couplings only to about sqrt of its gap
// tolerance (a residual coupling c enters the pencil eigenvalues at order
// c^2), so couplings below max(eps_rank, 5000*eps_sdp) are treated as zero.

#include "ncc/ncset.hpp"

#include <optional>

namespace ncc {

struct DilationWitness {
    NcPoint parent;        // level n+1
    CMat embedding;        // (n+1) x n inclusion of H_n
    bool nontrivial_flag = false;
    double coupling_norm = 0.0;  // largest border block norm across coordinates
};

/// Nontrivial one-step dilation of x inside K, if one exists within tolerance.
std::optional<DilationWitness> find_one_step_dilation(const NcSet& k, const NcPoint& x,
                                                      const Tolerances& tol = {});

bool is_maximal(const NcSet& k, const NcPoint& x, const Tolerances& tol = {},
                std::optional<DilationWitness>* witness = nullptr);

/// One-step dilation selected by a random border objective instead of the
/// coordinate scan; may return a trivial (zero-coupling) parent. Used to
/// sample UCP representations with a prescribed barycenter.
std::optional<DilationWitness> find_random_dilation(const NcSet& k, const NcPoint& x, Rng& rng,
                                                    const Tolerances& tol = {});

/// commutant of {x_j, x_j*} is trivial
bool is_irreducible(const NcPoint& x, const Tolerances& tol = {});

struct ClassifyReport {
    bool euclidean_extreme_at_level = false;
    bool irreducible = false;
    bool maximal = false;
    bool nc_extreme = false;  // = irreducible && maximal
    std::optional<DilationWitness> dilation;       // when not maximal
    std::optional<CMat> commutant_witness;         // non-scalar commutant element
    std::optional<NcPoint> perturbation;           // h with x +- h both members
};

ClassifyReport classify_point(const NcSet& k, const NcPoint& x, const Tolerances& tol = {});

struct DilateResult {
    bool maximal = false;  // false means Capped
    NcPoint point;
    CMat embedding;  // compresses point back to the input
    int steps = 0;
};

DilateResult dilate_to_maximal(const NcSet& k, const NcPoint& x, int max_steps = 8,
                               const Tolerances& tol = {});

struct KreinMilmanResult {
    bool representable = false;
    // weights[i] holds the Kraus columns for candidate i:
    // sum_i sum_kappa a* a = I and sum_i sum_kappa a* e_i a = x
    std::vector<std::vector<CMat>> weights;
    double gap = 0.0;  // violation of the separating witness when not representable
};

KreinMilmanResult krein_milman_check(const NcSet& k, const NcPoint& x,
                                     const std::vector<NcPoint>& extreme_candidates,
                                     const Tolerances& tol = {});

}  // namespace ncc
