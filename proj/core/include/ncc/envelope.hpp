#pragma once

// Convex envelope bounds at a point: the lower bound comes from the moment
// relaxation with the barycenter pinned, the upper bound from explicit
// representing maps (atomic measures extracted from the moment data, the
// point itself, maximalization paths, and random dilations).
//
// Matrix-valued bounds are reported along scalarizations: the moment SDP is
// solved per frame vector xi (basis vectors plus the pair frames
// (e_a+e_b)/sqrt2 and (e_a+i e_b)/sqrt2) and the matrix is reconstructed
// entrywise from those optima. Each entry is a valid bound for its own
// scalarization; the reconstruction need not be a Loewner minorant when the
// per-frame optima are attained by different functionals.

#include "ncc/dilation.hpp"
#include "ncc/moment.hpp"

namespace ncc {

struct EnvelopeResult {
    NcPoint point;
    CMat lower_bound;      // frame reconstruction of the moment-SDP optima
    CMat upper_bound;      // value of the best representing map found
    int relaxation_level = 0;
    int dilation_size = 0;  // Stinespring level (or atom count) of the best map
};

/// Envelope bounds for a self-adjoint f at x in K. Throws invalid_argument
/// when x is not a member (the barycenter-constrained moment SDP is
/// infeasible), when f is not self-adjoint, or when deg f > 2*relaxation_level.
EnvelopeResult convex_envelope(const NcSet& k, const FreePoly& f, const NcPoint& x,
                               int relaxation_level = 3, int dilation_budget = 8,
                               std::uint64_t seed = 1, const Tolerances& tol = {});

}  // namespace ncc
