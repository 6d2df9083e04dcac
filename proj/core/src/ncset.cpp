#include "ncc/ncset.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ncc/sdp.hpp"

namespace ncc {

std::vector<CMat> hermitian_coords(const NcPoint& x, bool hermitian, double eps_sym) {
    std::vector<CMat> out;
    if (hermitian) {
        for (const CMat& m : x.mats) {
            if (max_abs(m - m.adjoint()) > eps_sym)
                throw std::invalid_argument("point must be Hermitian for this set");
            out.push_back(hermitian_part(m));
        }
    } else {
        for (const CMat& m : x.mats) {
            out.push_back(hermitian_part(m));
            out.push_back(antihermitian_part(m));
        }
    }
    return out;
}

CMat Pencil::eval(const NcPoint& x) const {
    if (x.d != d) throw std::invalid_argument("pencil: dimension mismatch");
    const int p = x.level;
    std::vector<CMat> h = hermitian_coords(x, hermitian, 1e-7);
    CMat l = kron(q, CMat::Identity(p, p));
    for (size_t i = 0; i < h.size(); ++i) l += kron(coeffs[i], h[i]);
    return l;
}

int NcSet::d() const {
    if (auto* p = pencil()) return p->d;
    if (auto* s = opsys()) return s->d;
    return hull()->generators.at(0).d;
}

bool NcSet::hermitian_points() const {
    if (auto* p = pencil()) return p->hermitian;
    return false;  // UCP images / hull members inherit generator structure
}

namespace {

// UCP / CP feasibility problem shared by OpSysBasis and Hull membership.
// One Choi block per "generator" (single S-tuple block for OpSysBasis).
// Constraint layout (complex rows):
//   [s*n + t]                 sum_i Phi_i(I)(s,t)      = delta_st
//   [n^2 + j*n^2 + s*n + t]   sum_i Phi_i(g_ij)(s,t)   = x_j(s,t)
struct CpFeasibility {
    SdpProblem prob;
    int n = 0, d = 0;

    CpFeasibility(const std::vector<std::vector<CMat>>& gen_tuples,
                  const std::vector<int>& gen_dims, const NcPoint& x) {
        n = x.level;
        d = x.d;
        const int ng = static_cast<int>(gen_dims.size());
        for (int i = 0; i < ng; ++i) prob.add_block("choi" + std::to_string(i), gen_dims[i] * n);
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                SdpConstraint c;
                for (int i = 0; i < ng; ++i)
                    for (int a = 0; a < gen_dims[i]; ++a)
                        c.terms.push_back({i, a * n + s, a * n + t, Complex(1, 0)});
                c.rhs = (s == t) ? 1.0 : 0.0;
                prob.add_constraint(c);
            }
        for (int j = 0; j < d; ++j)
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) {
                    SdpConstraint c;
                    for (int i = 0; i < ng; ++i)
                        for (int a = 0; a < gen_dims[i]; ++a)
                            for (int b = 0; b < gen_dims[i]; ++b) {
                                Complex g = gen_tuples[i][j](a, b);
                                if (g != Complex(0, 0))
                                    c.terms.push_back({i, a * n + s, b * n + t, g});
                            }
                    c.rhs = x.mats[j](s, t);
                    prob.add_constraint(c);
                }
    }

    // constraint multipliers of an infeasibility certificate, read back as
    // the Gamma matrix (unitality group) and D_j matrices (coordinate groups)
    void read_certificate(const SdpSolution& sol, CMat& gamma_raw, std::vector<CMat>& dj) const {
        gamma_raw = CMat(n, n);
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) gamma_raw(s, t) = sol.dual_of(s * n + t);
        dj.clear();
        for (int j = 0; j < d; ++j) {
            CMat m(n, n);
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t)
                    m(s, t) = sol.dual_of(n * n + j * n * n + s * n + t);
            dj.push_back(m);
        }
    }
};

MembershipResult cp_membership(const NcSet& k, const std::vector<std::vector<CMat>>& gens,
                               const std::vector<int>& gen_dims, const NcPoint& x,
                               const Tolerances& tol) {
    CpFeasibility f(gens, gen_dims, x);
    SdpSolution sol = solve_sdp(f.prob, tol);
    MembershipResult res;
    if (sol.status == SdpStatus::Optimal) {
        res.inside = true;
        double margin = 1e30;
        for (const CMat& c : sol.blocks)
            margin = std::min(margin, min_eigenvalue(HMat(c, 1e-6)));
        res.margin = std::max(0.0, margin);
        return res;
    }
    if (sol.status == SdpStatus::Infeasible) {
        res.inside = false;
        CMat gamma_raw;
        std::vector<CMat> dj;
        f.read_certificate(sol, gamma_raw, dj);
        res.witness = detail::certificate_from_farkas(k, x, dj, gamma_raw, tol);
        res.margin = -res.witness->violation;
        return res;
    }
    throw std::runtime_error("membership: SDP did not resolve feasibility");
}

}  // namespace

MembershipResult membership(const NcSet& k, const NcPoint& x, const Tolerances& tol) {
    tol.validate();
    x.validate();
    if (x.d != k.d()) throw std::invalid_argument("membership: dimension mismatch");

    if (auto* p = k.pencil()) {
        MembershipResult res;
        res.margin = min_eigenvalue(HMat(p->eval(x), 1e-7));
        res.inside = res.margin >= -tol.eps_psd;
        if (!res.inside) res.witness = detail::certificate_from_pencil(k, x, tol);
        return res;
    }
    if (auto* s = k.opsys()) {
        return cp_membership(k, {s->gens}, {s->ambient_dim}, x, tol);
    }
    const HullPresentation& h = *k.hull();
    std::vector<std::vector<CMat>> gens;
    std::vector<int> dims;
    for (const NcPoint& g : h.generators) {
        gens.push_back(g.mats);
        dims.push_back(g.level);
    }
    return cp_membership(k, gens, dims, x, tol);
}

NcSet interval_set(double c, double d) {
    if (!(c < d)) throw std::invalid_argument("interval_set: requires c < d");
    Pencil p;
    p.d = 1;
    p.hermitian = true;
    p.q = CMat::Zero(2, 2);
    p.q(0, 0) = -c;
    p.q(1, 1) = d;
    CMat a = CMat::Zero(2, 2);
    a(0, 0) = 1;
    a(1, 1) = -1;
    p.coeffs = {a};
    return NcSet{p, true};
}

NcSet row_ball_set(int d) {
    if (d < 1) throw std::invalid_argument("row_ball_set: d >= 1");
    // [[I, X_1..X_d],[X*, I]] >= 0 iff sum X_j X_j* <= I (Schur complement)
    const int k = d + 1;
    Pencil p;
    p.d = d;
    p.hermitian = false;
    p.q = CMat::Identity(k, k);
    for (int j = 0; j < d; ++j) {
        CMat re = CMat::Zero(k, k), im = CMat::Zero(k, k);
        re(0, j + 1) = 1;
        re(j + 1, 0) = 1;
        im(0, j + 1) = Complex(0, 1);
        im(j + 1, 0) = Complex(0, -1);
        p.coeffs.push_back(re);
        p.coeffs.push_back(im);
    }
    return NcSet{p, true};
}

namespace {

// sup of direction.u over the level-1 section {u : Q + sum A_h u_h >= 0}
SdpSolution pencil_level1_extremum(const Pencil& p, const RVec& direction,
                                   const Tolerances& tol) {
    const int k = p.pencil_dim();
    const int nc = p.num_coords();
    SdpProblem prob;
    int blk = prob.add_block("slack", k);
    int u0 = prob.add_free(nc);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            SdpConstraint c;
            c.terms.push_back({blk, i, j, Complex(1, 0)});
            for (int h = 0; h < nc; ++h) {
                Complex a = p.coeffs[h](i, j);
                if (a != Complex(0, 0)) c.free_terms.push_back({u0 + h, -a});
            }
            c.rhs = p.q(i, j);
            prob.add_constraint(c);
        }
    std::vector<SdpFreeTerm> obj;
    for (int h = 0; h < nc; ++h)
        if (direction(h) != 0.0) obj.push_back({u0 + h, Complex(-direction(h), 0)});
    prob.set_objective({}, obj);
    return solve_sdp(prob, tol);
}

}  // namespace

NcSet pencil_set(Pencil p, const Tolerances& tol) {
    if (p.d < 1) throw std::invalid_argument("pencil_set: d >= 1");
    const int k = p.pencil_dim();
    if (k < 1) throw std::invalid_argument("pencil_set: empty pencil");
    if (max_abs(p.q - p.q.adjoint()) > tol.eps_sym)
        throw std::invalid_argument("pencil_set: constant term not Hermitian");
    if (static_cast<int>(p.coeffs.size()) != p.num_coords())
        throw std::invalid_argument("pencil_set: coefficient count mismatch");
    for (const CMat& a : p.coeffs) {
        if (a.rows() != k || a.cols() != k || max_abs(a - a.adjoint()) > tol.eps_sym)
            throw std::invalid_argument("pencil_set: coefficients must be Hermitian, dim k");
    }
    // level-1 boundedness in every coordinate direction
    for (int h = 0; h < p.num_coords(); ++h)
        for (double sign : {1.0, -1.0}) {
            RVec dir = RVec::Zero(p.num_coords());
            dir(h) = sign;
            SdpSolution s = pencil_level1_extremum(p, dir, tol);
            if (s.status == SdpStatus::Unbounded || std::abs(s.objective) > 1e6)
                throw std::invalid_argument("pencil_set: level-1 section unbounded");
            if (s.status == SdpStatus::Infeasible)
                throw std::invalid_argument("pencil_set: empty level-1 section");
            if (s.status != SdpStatus::Optimal)
                throw std::runtime_error("pencil_set: boundedness check failed numerically");
        }
    return NcSet{std::move(p), true};
}

NcSet opsys_set(OpSysBasis s, const Tolerances& tol) {
    if (s.d < 1 || s.ambient_dim < 1 || static_cast<int>(s.gens.size()) != s.d)
        throw std::invalid_argument("opsys_set: malformed basis");
    const int k = s.ambient_dim;
    for (const CMat& g : s.gens)
        if (g.rows() != k || g.cols() != k)
            throw std::invalid_argument("opsys_set: generator dim mismatch");
    // {1, S_j} must be linearly independent
    CMat span(k * k, s.d + 1);
    span.col(0) = CMat::Identity(k, k).reshaped();
    for (int j = 0; j < s.d; ++j) span.col(j + 1) = s.gens[j].reshaped();
    if (numeric_rank(span, tol.eps_rank) != s.d + 1)
        throw std::invalid_argument("opsys_set: {1, S_j} linearly dependent");
    return NcSet{std::move(s), true};
}

NcSet hull_set(HullPresentation h) {
    if (h.generators.empty()) throw std::invalid_argument("hull_set: no generators");
    const int d = h.generators[0].d;
    for (const NcPoint& g : h.generators) {
        g.validate();
        if (g.d != d) throw std::invalid_argument("hull_set: mismatched d");
    }
    return NcSet{std::move(h), true};
}

RVec pencil_interior_point(const Pencil& p, const Tolerances& tol) {
    const int k = p.pencil_dim();
    const int nc = p.num_coords();
    SdpProblem prob;
    int blk = prob.add_block("slack", k);
    int u0 = prob.add_free(nc);
    int tv = prob.add_free(1);
    // P = Q + sum A_h u_h - t I, maximize t
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            SdpConstraint c;
            c.terms.push_back({blk, i, j, Complex(1, 0)});
            for (int h = 0; h < nc; ++h) {
                Complex a = p.coeffs[h](i, j);
                if (a != Complex(0, 0)) c.free_terms.push_back({u0 + h, -a});
            }
            if (i == j) c.free_terms.push_back({tv, Complex(1, 0)});
            c.rhs = p.q(i, j);
            prob.add_constraint(c);
        }
    prob.set_objective({}, {{tv, Complex(-1, 0)}});
    SdpSolution s = solve_sdp(prob, tol);
    if (s.status != SdpStatus::Optimal)
        throw std::runtime_error("pencil_interior_point: SDP failed");
    if (s.free_values(nc) <= tol.eps_psd)
        throw std::runtime_error("pencil_interior_point: set has empty interior");
    return s.free_values.head(nc);
}

namespace {

NcPoint coords_to_point(const std::vector<CMat>& h, bool hermitian, int d, int level) {
    std::vector<CMat> mats;
    if (hermitian) {
        mats = h;
    } else {
        for (int j = 0; j < d; ++j) mats.push_back(h[2 * j] + Complex(0, 1) * h[2 * j + 1]);
    }
    return NcPoint(d, level, std::move(mats));
}

NcPoint sample_pencil(const Pencil& p, int level, Rng& rng, double beta, const Tolerances& tol) {
    const int nc = p.num_coords();
    RVec u0 = pencil_interior_point(p, tol);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<CMat> dir;
        for (int h = 0; h < nc; ++h) dir.push_back(rng.hermitian(level));
        // L(x0 + s g) = kron(Q + sum A u0, I) + s sum kron(A_h, g_h)
        CMat l0 = kron(p.q, CMat::Identity(level, level));
        for (int h = 0; h < nc; ++h)
            l0 += u0(h) * kron(p.coeffs[h], CMat::Identity(level, level));
        CMat t = CMat::Zero(l0.rows(), l0.cols());
        for (int h = 0; h < nc; ++h) t += kron(p.coeffs[h], dir[h]);
        Eigen::LLT<CMat> llt(l0);
        if (llt.info() != Eigen::Success) continue;
        CMat lw = llt.matrixL();
        CMat w = lw.triangularView<Eigen::Lower>().solve(t);
        w = lw.triangularView<Eigen::Lower>().solve(w.adjoint().eval());
        double lmin = min_eigenvalue(HMat(w, 1e-8));
        if (lmin >= -1e-9) continue;  // direction never exits: resample
        double smax = -1.0 / lmin;
        std::vector<CMat> coords;
        for (int h = 0; h < nc; ++h)
            coords.push_back(u0(h) * CMat::Identity(level, level) + beta * smax * dir[h]);
        return coords_to_point(coords, p.hermitian, p.d, level);
    }
    throw std::runtime_error("sample_member: could not find a boundary direction");
}

}  // namespace

NcPoint sample_member(const NcSet& k, int level, Rng& rng, double beta, const Tolerances& tol) {
    if (level < 1) throw std::invalid_argument("sample_member: level >= 1");
    beta = std::clamp(beta, 0.0, 1.0);
    if (auto* p = k.pencil()) return sample_pencil(*p, level, rng, beta, tol);
    if (auto* s = k.opsys()) {
        // Stinespring compression: x_j = V* (S_j (x) I_m) V
        const int kk = s->ambient_dim;
        const int m = (level + kk - 1) / kk + 1;
        CMat v = rng.isometry(kk * m, level);
        std::vector<CMat> mats;
        for (const CMat& g : s->gens)
            mats.push_back(v.adjoint() * kron(g, CMat::Identity(m, m)) * v);
        return NcPoint(s->d, level, std::move(mats));
    }
    const HullPresentation& h = *k.hull();
    std::vector<NcPoint> gens = h.generators;
    int total = 0;
    for (const NcPoint& g : gens) total += g.level;
    while (total < level) {  // repeat generators so an isometry can exist
        gens.insert(gens.end(), h.generators.begin(), h.generators.end());
        for (const NcPoint& g : h.generators) total += g.level;
    }
    CMat v = rng.isometry(total, level);
    std::vector<CMat> weights;
    int off = 0;
    for (const NcPoint& g : gens) {
        weights.push_back(v.middleRows(off, g.level));
        off += g.level;
    }
    return nc_combination(gens, weights, tol);
}

}  // namespace ncc
