#pragma once

// Block decomposition of points into irreducible summands and finitely
// supported nc measures on extreme points: dilate a representing map to a
// maximal point, split the maximal point into irreducibles, and fold the
// embeddings into measure weights.
//
// The resulting measure evaluates like the maximalized representation
// (Stinespring point = the maximal dilation), which dominates the input map
// in the dilation order and shares its barycenter; it agrees with the input
// on affine words but not on higher words unless the input was already
// maximal.

#include "ncc/order.hpp"

namespace ncc {

struct IrreducibleSummand {
    NcPoint point;                 // representative of the equivalence class
    std::vector<CMat> isometries;  // one embedding per equivalent copy;
                                   // each V satisfies V* x V = point
    int multiplicity() const { return static_cast<int>(isometries.size()); }
};

/// Block-diagonalization of the *-algebra generated by {x_j, x_j*}: split by
/// eigenspaces of random Hermitian commutant elements, recurse, and group the
/// irreducible summands by unitary equivalence. clean_split is set to false
/// when repeated random draws kept clustering and a coarse split was accepted.
std::vector<IrreducibleSummand> decompose_irreducible(const NcPoint& x,
                                                      const Tolerances& tol = {},
                                                      std::uint64_t seed = 1,
                                                      bool* clean_split = nullptr);

struct NcMeasureAtom {
    NcPoint point;
    CMat weight;  // level(point) x target_level
};

struct NcMeasure {
    int target_level = 0;
    std::vector<NcMeasureAtom> atoms;  // sum weight* weight = I
};

/// mu(f) = sum_i weight_i* f(x_i) weight_i. Throws when the weight-sum
/// invariant fails beyond eps_eq.
CMat integrate(const NcMeasure& m, const FreePoly& f, const Tolerances& tol = {});

struct DecompositionReport {
    bool capped = false;  // dilation budget exhausted before reaching maximal
    NcMeasure measure;
    bool all_atoms_irreducible = false;
    bool all_atoms_maximal = false;
    bool supported_on_extreme = false;  // both flags
};

/// Dilate mu's Stinespring point to a maximal point, decompose it, and fold
/// the embeddings into an nc measure on the (extreme) summands.
DecompositionReport represent_on_extreme(const NcSet& k, const UcpRep& mu, int max_steps = 8,
                                         const Tolerances& tol = {});

}  // namespace ncc
