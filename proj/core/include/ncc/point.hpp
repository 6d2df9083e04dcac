#pragma once

// Level-n points of an nc convex set: d-tuples of n x n complex matrices,
// together with the nc convexity operations (direct sums, compressions,
// matrix-weighted convex combinations).

#include "ncc/linalg.hpp"

namespace ncc {

struct NcPoint {
    int d = 0;      // generator count
    int level = 0;  // matrix dimension n
    std::vector<CMat> mats;

    NcPoint() = default;
    NcPoint(int d_, int level_, std::vector<CMat> mats_);

    /// Level-1 point from scalars.
    static NcPoint scalar(std::vector<Complex> values);

    void validate() const;
    bool hermitian(double eps_sym) const;
};

bool approx_equal(const NcPoint& a, const NcPoint& b, double eps);

NcPoint direct_sum(const std::vector<NcPoint>& points);

/// x |-> v* x v for an isometry-shaped v (rows = x.level, cols = target level).
NcPoint compress(const NcPoint& x, const CMat& v);

/// Sum alpha_i* x_i alpha_i with Sum alpha_i* alpha_i = I (checked to eps_eq).
NcPoint nc_combination(const std::vector<NcPoint>& points,
                       const std::vector<CMat>& weights,
                       const Tolerances& tol = {});

/// Conjugation u x u* by a unitary of the point's level.
NcPoint unitary_conjugate(const NcPoint& x, const CMat& u);

}  // namespace ncc
