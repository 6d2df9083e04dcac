#pragma once

// Finite presentations of compact nc convex sets and level-n membership.
//
// Three presentations:
//   Pencil            L(x) = Q (x) I_p + sum_h A_h (x) H_h(x) >= 0, with H_h
//                     the Hermitian coordinates of x (x_j itself for sets with
//                     Hermitian generators, else the pair Re x_j, Im x_j).
//   OpSysBasis        images of UCP maps on span{1, S_j, S_j*}: membership is
//                     Choi-matrix feasibility.
//   HullPresentation  closed nc convex hull of finitely many points:
//                     membership is an exact CP-map feasibility problem.

#include "ncc/point.hpp"
#include "ncc/rng.hpp"
#include "ncc/separation.hpp"

#include <optional>
#include <variant>

namespace ncc {

struct Pencil {
    int d = 0;             // generator count of the points
    bool hermitian = true;  // whether points are Hermitian tuples
    CMat q;                // Hermitian k x k constant term
    std::vector<CMat> coeffs;  // Hermitian k x k, one per Hermitian coordinate
                               // (d of them if hermitian, else 2d: re, im, ...)

    int pencil_dim() const { return static_cast<int>(q.rows()); }
    int num_coords() const { return hermitian ? d : 2 * d; }

    /// L(x), Hermitian (k*level) x (k*level).
    CMat eval(const NcPoint& x) const;
};

struct OpSysBasis {
    int d = 0;
    std::vector<CMat> gens;  // k x k, not necessarily Hermitian
    int ambient_dim = 0;     // k
};

struct HullPresentation {
    std::vector<NcPoint> generators;  // same d, levels may differ
};

struct NcSet {
    std::variant<Pencil, OpSysBasis, HullPresentation> presentation;
    bool bounded_flag = true;

    int d() const;
    bool hermitian_points() const;
    const Pencil* pencil() const { return std::get_if<Pencil>(&presentation); }
    const OpSysBasis* opsys() const { return std::get_if<OpSysBasis>(&presentation); }
    const HullPresentation* hull() const { return std::get_if<HullPresentation>(&presentation); }
};

/// Hermitian coordinates of a point: the mats themselves (validated Hermitian)
/// or the interleaved pairs (x_j + x_j*)/2, (x_j - x_j*)/(2i).
std::vector<CMat> hermitian_coords(const NcPoint& x, bool hermitian, double eps_sym);

struct MembershipResult {
    bool inside = false;
    double margin = 0.0;  // Pencil: lambda_min of L(x); SDP cases: Choi margin
    std::optional<SeparationCertificate> witness;  // present when outside
};

MembershipResult membership(const NcSet& k, const NcPoint& x, const Tolerances& tol = {});

/// {X = X*: c I <= X <= d I} as the two-block pencil diag(X - cI, dI - X).
NcSet interval_set(double c, double d);

/// {(X_1..X_d): sum X_j X_j* <= I} via the (d+1)-block Hermitian-embedding pencil.
NcSet row_ball_set(int d);

/// Pencil set from user data; rejects pencils whose level-1 section is
/// unbounded (any coordinate supremum above 1e6).
NcSet pencil_set(Pencil p, const Tolerances& tol = {});

NcSet opsys_set(OpSysBasis s, const Tolerances& tol = {});
NcSet hull_set(HullPresentation h);

/// Random member at the given level; beta in [0,1] mixes from a cached
/// interior point (0) to the boundary (1). For Pencil this is an exact line
/// search to the boundary; OpSysBasis samples Stinespring compressions;
/// Hull samples nc combinations of the generators.
NcPoint sample_member(const NcSet& k, int level, Rng& rng, double beta,
                      const Tolerances& tol = {});

/// Level-1 interior point of a bounded pencil (Hermitian coordinates),
/// from maximizing the smallest pencil eigenvalue.
RVec pencil_interior_point(const Pencil& p, const Tolerances& tol = {});

}  // namespace ncc
