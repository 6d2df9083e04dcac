#include "ncc/dilation.hpp"

#include <Eigen/Eigenvalues>

#include "ncc/sdp.hpp"

namespace ncc {

namespace {

double coupling_gate(const Tolerances& tol) {
    return std::max(tol.eps_rank, 5000.0 * tol.eps_sdp);
}

double border_norm(const NcPoint& parent, int n) {
    // largest off-diagonal block norm relative to the leading n x n corner
    const int r = parent.level - n;
    double c = 0.0;
    for (const CMat& m : parent.mats) {
        c = std::max(c, m.topRightCorner(n, r).norm());
        c = std::max(c, m.bottomLeftCorner(r, n).norm());
    }
    return c;
}

CMat inclusion(int big, int small) {
    CMat v = CMat::Zero(big, small);
    v.topLeftCorner(small, small) = CMat::Identity(small, small);
    return v;
}

// Facially reduced psd block P = l0 + sum_v f_v G_v >= 0 where every feasible
// P must satisfy P k = 0 for the columns k of kvecs (the face pinned by the
// kernel of the current pencil value; without this reduction the SDP has no
// interior at boundary points and the solver stalls). Adds the block W* P W
// plus the kernel equalities (sum_v f_v G_v) k = 0.
void add_reduced_psd(SdpProblem& prob, const std::string& name, const CMat& l0,
                     const std::vector<std::pair<int, CMat>>& gv, const CMat& w,
                     const CMat& kvecs) {
    const int m = static_cast<int>(w.cols());
    int blk = prob.add_block(name, m);
    CMat l0r = w.adjoint() * l0 * w;
    std::vector<CMat> gr;
    gr.reserve(gv.size());
    for (const auto& [idx, g] : gv) gr.push_back(w.adjoint() * g * w);
    for (int r1 = 0; r1 < m; ++r1)
        for (int r2 = r1; r2 < m; ++r2) {
            SdpConstraint c;
            c.terms.push_back({blk, r1, r2, Complex(1, 0)});
            for (size_t v = 0; v < gv.size(); ++v) {
                Complex a = gr[v](r1, r2);
                if (std::abs(a) > 1e-14) c.free_terms.push_back({gv[v].first, -a});
            }
            c.rhs = l0r(r1, r2);
            prob.add_constraint(c);
        }
    for (int kc = 0; kc < kvecs.cols(); ++kc) {
        CVec kv = kvecs.col(kc);
        std::vector<CVec> gk;
        gk.reserve(gv.size());
        for (const auto& [idx, g] : gv) gk.push_back(g * kv);
        for (int row = 0; row < l0.rows(); ++row) {
            SdpConstraint c;
            for (size_t v = 0; v < gv.size(); ++v)
                if (std::abs(gk[v](row)) > 1e-14)
                    c.free_terms.push_back({gv[v].first, gk[v](row)});
            if (c.free_terms.empty()) continue;
            c.rhs = 0;
            prob.add_constraint(c);
        }
    }
}

// split the eigenbasis of a psd-up-to-noise matrix into kernel and range
void kernel_split(const CMat& a, double ker_tol, CMat& range, CMat& kernel) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
    int nk = 0;
    while (nk < es.eigenvalues().size() && es.eigenvalues()(nk) <= ker_tol) ++nk;
    kernel = es.eigenvectors().leftCols(nk);
    range = es.eigenvectors().rightCols(es.eigenvalues().size() - nk);
}

// ---------------------------------------------------------------------------
// Pencil border search. Parent coordinates H_h = [[H_h(x), beta_h],
// [beta_h*, eps_h]]; one PSD block P = L(parent) tied to the free border by
// matrix equalities. Objective direction picks a single border component.
// ---------------------------------------------------------------------------

struct PencilBorder {
    SdpProblem prob;
    int n = 0, nc = 0;
    int beta0 = 0, eps0 = 0;
    // kernel equalities as real rows over the free variables; the solver meets
    // them only to its gap tolerance, which is fatal next to a singular L(x),
    // so solutions are re-projected onto them exactly before assembly
    RMat ker_rows;

    int re_idx(int h, int i) const { return beta0 + 2 * (h * n + i); }
    int im_idx(int h, int i) const { return beta0 + 2 * (h * n + i) + 1; }

    RVec project(RVec vals) const {
        if (ker_rows.rows() == 0) return vals;
        Eigen::CompleteOrthogonalDecomposition<RMat> cod(ker_rows);
        vals -= cod.solve(ker_rows * vals);
        return vals;
    }
};

PencilBorder build_pencil_border(const Pencil& p, const std::vector<CMat>& hx, int n,
                                 double ker_tol) {
    PencilBorder bp;
    bp.n = n;
    bp.nc = p.num_coords();
    const int kd = p.pencil_dim();
    const int bn = n + 1;
    bp.beta0 = bp.prob.add_free(2 * bp.nc * n);
    bp.eps0 = bp.prob.add_free(bp.nc);

    // constant part: pencil of the parent with zero border and zero corner
    CMat l0 = kron(p.q, CMat::Identity(bn, bn));
    CMat lx = kron(p.q, CMat::Identity(n, n));
    for (int h = 0; h < bp.nc; ++h) {
        CMat e = CMat::Zero(bn, bn);
        e.topLeftCorner(n, n) = hx[h];
        l0 += kron(p.coeffs[h], e);
        lx += kron(p.coeffs[h], hx[h]);
    }
    // linear part: one generator per border/corner variable
    std::vector<std::pair<int, CMat>> gv;
    for (int h = 0; h < bp.nc; ++h) {
        for (int i = 0; i < n; ++i) {
            CMat er = CMat::Zero(bn, bn), ei = CMat::Zero(bn, bn);
            er(i, n) = er(n, i) = 1;
            ei(i, n) = Complex(0, 1);
            ei(n, i) = Complex(0, -1);
            gv.push_back({bp.re_idx(h, i), kron(p.coeffs[h], er)});
            gv.push_back({bp.im_idx(h, i), kron(p.coeffs[h], ei)});
        }
        CMat ee = CMat::Zero(bn, bn);
        ee(n, n) = 1;
        gv.push_back({bp.eps0 + h, kron(p.coeffs[h], ee)});
    }
    // the kernel of L(x), zero-extended, is annihilated by any feasible parent
    // pencil: u* L(x) u = 0 forces the border rows against u to vanish too
    CMat range, kernel;
    kernel_split(lx, ker_tol, range, kernel);
    auto extend = [&](const CMat& cols) {
        CMat out = CMat::Zero(kd * bn, cols.cols());
        for (int i = 0; i < kd; ++i)
            for (int a = 0; a < n; ++a) out.row(i * bn + a) = cols.row(i * n + a);
        return out;
    };
    CMat w(kd * bn, range.cols() + kd);
    w.leftCols(range.cols()) = extend(range);
    w.rightCols(kd).setZero();
    for (int i = 0; i < kd; ++i) w(i * bn + n, range.cols() + i) = 1;
    CMat kext = extend(kernel);
    add_reduced_psd(bp.prob, "pencil", l0, gv, w, kext);

    const int nvars = 2 * bp.nc * n + bp.nc;
    std::vector<RVec> rows;
    for (int kc = 0; kc < kext.cols(); ++kc)
        for (int r = 0; r < kd * bn; ++r) {
            RVec re = RVec::Zero(nvars), im = RVec::Zero(nvars);
            for (const auto& [v, g] : gv) {
                Complex c = (g * kext.col(kc))(r);
                re(v) = c.real();
                im(v) = c.imag();
            }
            if (re.norm() > 1e-13) rows.push_back(re);
            if (im.norm() > 1e-13) rows.push_back(im);
        }
    bp.ker_rows = RMat(static_cast<int>(rows.size()), nvars);
    for (std::size_t r = 0; r < rows.size(); ++r) bp.ker_rows.row(static_cast<int>(r)) = rows[r];
    return bp;
}

// largest t >= 0 with base + t * step psd (within 1e-12 relative), by bisection
double psd_line_search(const CMat& base, const CMat& step, double t_feasible) {
    double scale = std::max(1.0, max_abs(base));
    // the base may itself sit eps_psd-deep past the boundary (it was produced
    // by an earlier boundary push); accept steps that do not go deeper
    const double floor =
        std::min(0.0, min_eigenvalue(HMat(base, 1e-9 * scale))) - 1e-12 * scale;
    auto ok = [&](double t) {
        return min_eigenvalue(HMat(base + t * step, 1e-9 * scale * (1 + t))) >= floor;
    };
    if (!ok(0.0)) return 0.0;
    double lo = ok(t_feasible) ? t_feasible : 0.0, hi = std::max(1.0, t_feasible);
    while (ok(hi) && hi < 1e8) {
        lo = hi;
        hi *= 2;
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

// assemble the parent from border values, rescaling the border along the psd
// line search: to the boundary (push_to_boundary) or clamped to scale 1
DilationWitness assemble_pencil_parent(const Pencil& p, const std::vector<CMat>& hx,
                                       const PencilBorder& bp, const RVec& raw_vals,
                                       const NcPoint& x, bool push_to_boundary, double gate) {
    const int n = bp.n;
    const RVec vals = bp.project(raw_vals);
    std::vector<CMat> beta(bp.nc), coords(bp.nc);
    RVec eps(bp.nc);
    for (int h = 0; h < bp.nc; ++h) {
        CMat b(n, 1);
        for (int i = 0; i < n; ++i)
            b(i, 0) = Complex(vals(bp.re_idx(h, i)), vals(bp.im_idx(h, i)));
        beta[h] = b;
        eps(h) = vals(bp.eps0 + h);
    }
    CMat base = kron(p.q, CMat::Identity(n + 1, n + 1));
    CMat step = CMat::Zero(base.rows(), base.cols());
    for (int h = 0; h < bp.nc; ++h) {
        CMat hd = CMat::Zero(n + 1, n + 1);
        hd.topLeftCorner(n, n) = hx[h];
        hd(n, n) = eps(h);
        base += kron(p.coeffs[h], hd);
        CMat hb = CMat::Zero(n + 1, n + 1);
        hb.block(0, n, n, 1) = beta[h];
        hb.block(n, 0, 1, n) = beta[h].adjoint();
        step += kron(p.coeffs[h], hb);
    }
    double t = psd_line_search(base, step, 1.0);
    if (!push_to_boundary) t = std::min(t, 1.0);
    if (push_to_boundary) {
        // polish the corners onto the boundary too: the border search binds
        // only one direction, and corners left slightly inside feed spurious
        // sub-gate couplings to the next step of a dilation chain
        CMat cur = base + t * step;
        for (int h = 0; h < bp.nc; ++h) {
            CMat ee = CMat::Zero(n + 1, n + 1);
            ee(n, n) = 1;
            CMat ghe = kron(p.coeffs[h], ee);
            const double tp = psd_line_search(cur, ghe, 0.0);
            const double tm = psd_line_search(cur, -ghe, 0.0);
            const double delta = (tp >= tm) ? tp : -tm;
            eps(h) += delta;
            cur += delta * ghe;
        }
    }
    for (int h = 0; h < bp.nc; ++h) {
        CMat m = CMat::Zero(n + 1, n + 1);
        m.topLeftCorner(n, n) = hx[h];
        m(n, n) = eps(h);
        m.block(0, n, n, 1) = t * beta[h];
        m.block(n, 0, 1, n) = t * beta[h].adjoint();
        coords[h] = m;
    }
    std::vector<CMat> mats;
    if (p.hermitian) {
        mats = coords;
    } else {
        for (int j = 0; j < p.d; ++j)
            mats.push_back(coords[2 * j] + Complex(0, 1) * coords[2 * j + 1]);
    }
    DilationWitness w;
    w.parent = NcPoint(x.d, n + 1, std::move(mats));
    w.embedding = inclusion(n + 1, n);
    w.coupling_norm = border_norm(w.parent, n);
    w.nontrivial_flag = w.coupling_norm > gate;
    return w;
}

std::optional<DilationWitness> pencil_dilation(const NcSet& k, const Pencil& p, const NcPoint& x,
                                               const Tolerances& tol) {
    const int n = x.level;
    std::vector<CMat> hx = hermitian_coords(x, p.hermitian, 1e-7);
    PencilBorder bp = build_pencil_border(p, hx, n, std::max(10 * tol.eps_psd, 1e-12));
    const double gate = coupling_gate(tol);

    double best_norm = 0.0;
    RVec best_vals;
    for (int h = 0; h < bp.nc; ++h)
        for (int i = 0; i < n; ++i)
            for (int part = 0; part < 2; ++part)
                for (double sign : {1.0, -1.0}) {
                    SdpProblem prob = bp.prob;  // same constraints, new objective
                    int idx = part == 0 ? bp.re_idx(h, i) : bp.im_idx(h, i);
                    prob.set_objective({}, {{idx, Complex(-sign, 0)}});
                    SdpSolution s = solve_sdp(prob, tol);
                    if (s.status != SdpStatus::Optimal) continue;
                    double cn = 0.0;
                    for (int hh = 0; hh < bp.nc; ++hh)
                        for (int ii = 0; ii < n; ++ii)
                            cn = std::max(cn, std::hypot(s.free_values(bp.re_idx(hh, ii)),
                                                         s.free_values(bp.im_idx(hh, ii))));
                    if (cn > best_norm) {
                        best_norm = cn;
                        best_vals = s.free_values;
                    }
                    if (best_norm > 100 * gate) goto done;
                }
done:
    if (best_norm <= gate) return std::nullopt;
    DilationWitness w =
        assemble_pencil_parent(p, hx, bp, best_vals, x, /*push_to_boundary=*/true, gate);
    if (w.coupling_norm <= gate) return std::nullopt;
    (void)k;
    return w;
}

// ---------------------------------------------------------------------------
// CP border search (OpSysBasis / Hull): Choi feasibility with the parent's
// border entries as free variables.
// ---------------------------------------------------------------------------

struct CpBorder {
    SdpProblem prob;
    int n = 0, d = 0;
    int b0 = 0, c0 = 0, e0 = 0;  // free offsets: b_j(i), c_j(i), e_j (complex pairs)

    int b_re(int j, int i) const { return b0 + 2 * (j * n + i); }
    int b_im(int j, int i) const { return b0 + 2 * (j * n + i) + 1; }
    int c_re(int j, int i) const { return c0 + 2 * (j * n + i); }
    int c_im(int j, int i) const { return c0 + 2 * (j * n + i) + 1; }
};

CpBorder build_cp_border(const std::vector<std::vector<CMat>>& gens,
                         const std::vector<int>& gen_dims, const NcPoint& x) {
    CpBorder cb;
    const int n = cb.n = x.level;
    cb.d = x.d;
    const int bn = n + 1;
    const int ng = static_cast<int>(gen_dims.size());
    for (int i = 0; i < ng; ++i)
        cb.prob.add_block("choi" + std::to_string(i), gen_dims[i] * bn);
    cb.b0 = cb.prob.add_free(2 * cb.d * n);
    cb.c0 = cb.prob.add_free(2 * cb.d * n);
    cb.e0 = cb.prob.add_free(2 * cb.d);
    for (int s = 0; s < bn; ++s)
        for (int t = 0; t < bn; ++t) {
            SdpConstraint c;
            for (int i = 0; i < ng; ++i)
                for (int a = 0; a < gen_dims[i]; ++a)
                    c.terms.push_back({i, a * bn + s, a * bn + t, Complex(1, 0)});
            c.rhs = (s == t) ? 1.0 : 0.0;
            cb.prob.add_constraint(c);
        }
    for (int j = 0; j < cb.d; ++j)
        for (int s = 0; s < bn; ++s)
            for (int t = 0; t < bn; ++t) {
                SdpConstraint c;
                for (int i = 0; i < ng; ++i)
                    for (int a = 0; a < gen_dims[i]; ++a)
                        for (int b = 0; b < gen_dims[i]; ++b) {
                            Complex g = gens[i][j](a, b);
                            if (g != Complex(0, 0)) c.terms.push_back({i, a * bn + s, b * bn + t, g});
                        }
                if (s < cb.n && t < cb.n) {
                    c.rhs = x.mats[j](s, t);
                } else if (s < cb.n) {  // parent(s, n) = b_j(s)
                    c.free_terms.push_back({cb.b_re(j, s), Complex(-1, 0)});
                    c.free_terms.push_back({cb.b_im(j, s), Complex(0, -1)});
                    c.rhs = 0;
                } else if (t < cb.n) {  // parent(n, t) = c_j(t)
                    c.free_terms.push_back({cb.c_re(j, t), Complex(-1, 0)});
                    c.free_terms.push_back({cb.c_im(j, t), Complex(0, -1)});
                    c.rhs = 0;
                } else {
                    c.free_terms.push_back({cb.e0 + 2 * j, Complex(-1, 0)});
                    c.free_terms.push_back({cb.e0 + 2 * j + 1, Complex(0, -1)});
                    c.rhs = 0;
                }
                cb.prob.add_constraint(c);
            }
    return cb;
}

std::optional<DilationWitness> cp_dilation(const NcSet& k, const NcPoint& x,
                                           const Tolerances& tol) {
    std::vector<std::vector<CMat>> gens;
    std::vector<int> dims;
    if (auto* s = k.opsys()) {
        gens.push_back(s->gens);
        dims.push_back(s->ambient_dim);
    } else {
        for (const NcPoint& g : k.hull()->generators) {
            gens.push_back(g.mats);
            dims.push_back(g.level);
        }
    }
    const int n = x.level;
    CpBorder cb = build_cp_border(gens, dims, x);
    const double gate = coupling_gate(tol);

    double best_norm = 0.0;
    RVec best_vals;
    std::vector<int> dirs;
    for (int j = 0; j < cb.d; ++j)
        for (int i = 0; i < n; ++i) {
            dirs.push_back(cb.b_re(j, i));
            dirs.push_back(cb.b_im(j, i));
            dirs.push_back(cb.c_re(j, i));
            dirs.push_back(cb.c_im(j, i));
        }
    for (int idx : dirs)
        for (double sign : {1.0, -1.0}) {
            SdpProblem prob = cb.prob;
            prob.set_objective({}, {{idx, Complex(-sign, 0)}});
            SdpSolution s = solve_sdp(prob, tol);
            if (s.status != SdpStatus::Optimal) continue;
            double cn = 0.0;
            for (int v : dirs) cn = std::max(cn, std::abs(s.free_values(v)));
            if (cn > best_norm) {
                best_norm = cn;
                best_vals = s.free_values;
            }
            if (best_norm > 100 * gate) break;
        }
    if (best_norm <= gate) return std::nullopt;

    auto assemble = [&](double t) {
        std::vector<CMat> mats;
        for (int j = 0; j < cb.d; ++j) {
            CMat m = CMat::Zero(n + 1, n + 1);
            m.topLeftCorner(n, n) = x.mats[j];
            for (int i = 0; i < n; ++i) {
                m(i, n) = t * Complex(best_vals(cb.b_re(j, i)), best_vals(cb.b_im(j, i)));
                m(n, i) = t * Complex(best_vals(cb.c_re(j, i)), best_vals(cb.c_im(j, i)));
            }
            m(n, n) = Complex(best_vals(cb.e0 + 2 * j), best_vals(cb.e0 + 2 * j + 1));
            mats.push_back(m);
        }
        return NcPoint(cb.d, n + 1, std::move(mats));
    };
    // borders scale inside K (average of diagonal-unitary conjugates), so back
    // off slightly if the solver left the parent marginally outside
    double t = 1.0;
    for (int tries = 0; tries < 25; ++tries) {
        NcPoint parent = assemble(t);
        if (membership(k, parent, tol).inside) {
            if (t * best_norm <= gate) return std::nullopt;
            DilationWitness w;
            w.parent = parent;
            w.embedding = inclusion(n + 1, n);
            w.coupling_norm = border_norm(parent, n);
            w.nontrivial_flag = w.coupling_norm > gate;
            return w;
        }
        t *= 0.98;
    }
    return std::nullopt;
}

}  // namespace

std::optional<DilationWitness> find_one_step_dilation(const NcSet& k, const NcPoint& x,
                                                      const Tolerances& tol) {
    tol.validate();
    auto m = membership(k, x, tol);
    if (!m.inside) throw std::invalid_argument("find_one_step_dilation: point outside set");
    if (auto* p = k.pencil()) return pencil_dilation(k, *p, x, tol);
    return cp_dilation(k, x, tol);
}

bool is_maximal(const NcSet& k, const NcPoint& x, const Tolerances& tol,
                std::optional<DilationWitness>* witness) {
    auto w = find_one_step_dilation(k, x, tol);
    if (witness) *witness = w;
    return !w.has_value();
}

bool is_irreducible(const NcPoint& x, const Tolerances& tol) {
    return commutant_dim(x.mats, tol) == 1;
}

std::optional<DilationWitness> find_random_dilation(const NcSet& k, const NcPoint& x, Rng& rng,
                                                    const Tolerances& tol) {
    tol.validate();
    if (!membership(k, x, tol).inside)
        throw std::invalid_argument("find_random_dilation: point outside set");
    const int n = x.level;
    const double gate = coupling_gate(tol);
    if (auto* p = k.pencil()) {
        std::vector<CMat> hx = hermitian_coords(x, p->hermitian, 1e-7);
        PencilBorder bp = build_pencil_border(*p, hx, n, std::max(10 * tol.eps_psd, 1e-12));
        std::vector<SdpFreeTerm> obj;
        for (int h = 0; h < bp.nc; ++h) {
            for (int i = 0; i < n; ++i) {
                obj.push_back({bp.re_idx(h, i), Complex(rng.gaussian(), 0)});
                obj.push_back({bp.im_idx(h, i), Complex(rng.gaussian(), 0)});
            }
            obj.push_back({bp.eps0 + h, Complex(rng.gaussian(), 0)});
        }
        bp.prob.set_objective({}, obj);
        SdpSolution s = solve_sdp(bp.prob, tol);
        if (s.status != SdpStatus::Optimal) return std::nullopt;
        return assemble_pencil_parent(*p, hx, bp, s.free_values, x,
                                      /*push_to_boundary=*/false, gate);
    }
    std::vector<std::vector<CMat>> gens;
    std::vector<int> dims;
    if (auto* so = k.opsys()) {
        gens.push_back(so->gens);
        dims.push_back(so->ambient_dim);
    } else {
        for (const NcPoint& g : k.hull()->generators) {
            gens.push_back(g.mats);
            dims.push_back(g.level);
        }
    }
    CpBorder cb = build_cp_border(gens, dims, x);
    std::vector<SdpFreeTerm> obj;
    for (int v = 0; v < cb.e0 + 2 * cb.d; ++v) obj.push_back({v, Complex(rng.gaussian(), 0)});
    cb.prob.set_objective({}, obj);
    SdpSolution s = solve_sdp(cb.prob, tol);
    if (s.status != SdpStatus::Optimal) return std::nullopt;
    auto assemble = [&](double t) {
        std::vector<CMat> mats;
        for (int j = 0; j < cb.d; ++j) {
            CMat m = CMat::Zero(n + 1, n + 1);
            m.topLeftCorner(n, n) = x.mats[j];
            for (int i = 0; i < n; ++i) {
                m(i, n) = t * Complex(s.free_values(cb.b_re(j, i)), s.free_values(cb.b_im(j, i)));
                m(n, i) = t * Complex(s.free_values(cb.c_re(j, i)), s.free_values(cb.c_im(j, i)));
            }
            m(n, n) = Complex(s.free_values(cb.e0 + 2 * j), s.free_values(cb.e0 + 2 * j + 1));
            mats.push_back(m);
        }
        return NcPoint(cb.d, n + 1, std::move(mats));
    };
    double t = 1.0;
    for (int tries = 0; tries < 25; ++tries) {
        NcPoint parent = assemble(t);
        if (membership(k, parent, tol).inside) {
            DilationWitness w;
            w.parent = parent;
            w.embedding = inclusion(n + 1, n);
            w.coupling_norm = border_norm(parent, n);
            w.nontrivial_flag = w.coupling_norm > gate;
            return w;
        }
        t *= 0.98;
    }
    return std::nullopt;
}

namespace {

// Euclidean extremality: search for a nonzero perturbation tuple h with
// x + h and x - h both members; per-presentation SDPs over shared h vars.
std::optional<NcPoint> find_perturbation(const NcSet& k, const NcPoint& x,
                                         const Tolerances& tol) {
    const int n = x.level;
    const bool herm = k.hermitian_points();
    const double gate = coupling_gate(tol);

    SdpProblem prob;
    const int h0 = 0;  // h variables are the first free block in every branch

    // free-variable layout: Hermitian h_j packs the upper triangle as
    // (re, im) pairs (the diagonal imaginary slot is unused and dropped by
    // presolve); general h_j stores 2n^2 reals row-major.
    const int per = herm ? 2 * (n * (n + 1) / 2) : 2 * n * n;
    const int total_vars = x.d * per;

    // complex free-term list representing the entry h_j(i, l)
    auto entry_terms = [&](int j, int i, int l) {
        std::vector<SdpFreeTerm> out;
        if (herm) {
            auto up = [&](int a, int b) { return a * n - a * (a - 1) / 2 + (b - a); };
            int base = h0 + j * per;
            if (i == l) {
                out.push_back({base + 2 * up(i, i), Complex(1, 0)});
            } else if (i < l) {
                out.push_back({base + 2 * up(i, l), Complex(1, 0)});
                out.push_back({base + 2 * up(i, l) + 1, Complex(0, 1)});
            } else {
                out.push_back({base + 2 * up(l, i), Complex(1, 0)});
                out.push_back({base + 2 * up(l, i) + 1, Complex(0, -1)});
            }
        } else {
            int base = h0 + j * per + 2 * (i * n + l);
            out.push_back({base, Complex(1, 0)});
            out.push_back({base + 1, Complex(0, 1)});
        }
        return out;
    };

    std::vector<int> active;  // vars that actually move the perturbation

    if (auto* p = k.pencil()) {
        prob.add_free(total_vars);
        CMat lx = p->eval(x);
        // pencil response of each unit perturbation variable: decode the var
        // into an elementary h tuple, take Hermitian coordinates, contract
        auto up = [&](int a, int b) { return a * n - a * (a - 1) / 2 + (b - a); };
        auto pencil_of = [&](int j, const CMat& hj) {
            CMat g = CMat::Zero(lx.rows(), lx.cols());
            if (p->hermitian) {
                g = kron(p->coeffs[j], hj);
            } else {
                g += kron(p->coeffs[2 * j], 0.5 * (hj + hj.adjoint()).eval());
                g += kron(p->coeffs[2 * j + 1],
                          ((hj - hj.adjoint()) / Complex(0, 2)).eval());
            }
            return g;
        };
        std::vector<std::pair<int, CMat>> gv;
        for (int j = 0; j < x.d; ++j)
            for (int i = 0; i < n; ++i)
                for (int l = herm ? i : 0; l < n; ++l) {
                    CMat eb = CMat::Zero(n, n);
                    eb(i, l) = 1;
                    int re = herm ? h0 + j * per + 2 * up(i, l)
                                  : h0 + j * per + 2 * (i * n + l);
                    CMat er = herm && i != l ? (eb + eb.adjoint()).eval() : eb;
                    gv.push_back({re, pencil_of(j, er)});
                    active.push_back(re);
                    if (herm && i == l) continue;  // diagonal im slot unused
                    CMat ei = herm ? (Complex(0, 1) * (eb - eb.adjoint())).eval()
                                   : (Complex(0, 1) * eb).eval();
                    gv.push_back({re + 1, pencil_of(j, ei)});
                    active.push_back(re + 1);
                }
        CMat range, kernel;
        kernel_split(lx, std::max(10 * tol.eps_psd, 1e-12), range, kernel);
        std::vector<std::pair<int, CMat>> gneg;
        gneg.reserve(gv.size());
        for (const auto& [idx, g] : gv) gneg.push_back({idx, (-g).eval()});
        add_reduced_psd(prob, "plus", lx, gv, range, kernel);
        add_reduced_psd(prob, "minus", lx, gneg, range, kernel);
    } else {
        std::vector<std::vector<CMat>> gens;
        std::vector<int> dims;
        if (auto* s = k.opsys()) {
            gens.push_back(s->gens);
            dims.push_back(s->ambient_dim);
        } else {
            for (const NcPoint& g : k.hull()->generators) {
                gens.push_back(g.mats);
                dims.push_back(g.level);
            }
        }
        const int ng = static_cast<int>(dims.size());
        for (int sgn = 0; sgn < 2; ++sgn)
            for (int i = 0; i < ng; ++i)
                prob.add_block((sgn ? "m" : "p") + std::to_string(i), dims[i] * n);
        prob.add_free(total_vars);
        for (int sgn = 0; sgn < 2; ++sgn) {
            const int boff = sgn * ng;
            const double sg = sgn == 0 ? -1.0 : 1.0;  // Phi(g) -+ h = x
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) {
                    SdpConstraint c;  // unitality
                    for (int i = 0; i < ng; ++i)
                        for (int a = 0; a < dims[i]; ++a)
                            c.terms.push_back({boff + i, a * n + s, a * n + t, Complex(1, 0)});
                    c.rhs = (s == t) ? 1.0 : 0.0;
                    prob.add_constraint(c);
                }
            for (int j = 0; j < x.d; ++j)
                for (int s = 0; s < n; ++s)
                    for (int t = 0; t < n; ++t) {
                        SdpConstraint c;
                        for (int i = 0; i < ng; ++i)
                            for (int a = 0; a < dims[i]; ++a)
                                for (int b = 0; b < dims[i]; ++b) {
                                    Complex g = gens[i][j](a, b);
                                    if (g != Complex(0, 0))
                                        c.terms.push_back({boff + i, a * n + s, b * n + t, g});
                                }
                        for (auto ft : entry_terms(j, s, t))
                            c.free_terms.push_back({ft.index, sg * ft.coeff});
                        c.rhs = x.mats[j](s, t);
                        prob.add_constraint(c);
                    }
        }
    }

    if (active.empty())
        for (int v = 0; v < total_vars; ++v) active.push_back(h0 + v);

    double best = 0.0;
    RVec best_vals;
    for (int idx : active)
        for (double sign : {1.0, -1.0}) {
            SdpProblem p2 = prob;
            p2.set_objective({}, {{idx, Complex(-sign, 0)}});
            SdpSolution s = solve_sdp(p2, tol);
            if (s.status != SdpStatus::Optimal) continue;
            double cn = 0.0;
            for (int v : active) cn = std::max(cn, std::abs(s.free_values(v)));
            if (cn > best) {
                best = cn;
                best_vals = s.free_values;
            }
            if (best > 100 * gate) goto found;
        }
found:
    if (best <= gate) return std::nullopt;
    // reconstruct h from the stored variables
    std::vector<CMat> hmats;
    for (int j = 0; j < x.d; ++j) {
        CMat m = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                Complex v = 0;
                // reuse the same entry map
                if (k.hermitian_points()) {
                    auto up = [&](int a, int b) { return a * n - a * (a - 1) / 2 + (b - a); };
                    int base = j * 2 * (n * (n + 1) / 2);
                    if (i == l) v = best_vals(base + 2 * up(i, i));
                    else if (i < l)
                        v = Complex(best_vals(base + 2 * up(i, l)),
                                    best_vals(base + 2 * up(i, l) + 1));
                    else
                        v = Complex(best_vals(base + 2 * up(l, i)),
                                    -best_vals(base + 2 * up(l, i) + 1));
                } else {
                    int base = j * 2 * n * n + 2 * (i * n + l);
                    v = Complex(best_vals(base), best_vals(base + 1));
                }
                m(i, l) = v;
            }
        hmats.push_back(m);
    }
    return NcPoint(x.d, n, std::move(hmats));
}

}  // namespace

ClassifyReport classify_point(const NcSet& k, const NcPoint& x, const Tolerances& tol) {
    auto m = membership(k, x, tol);
    if (!m.inside) throw std::invalid_argument("classify_point: point outside set");
    ClassifyReport r;
    r.irreducible = is_irreducible(x, tol);
    if (!r.irreducible) {
        auto basis = commutant_basis(x.mats, tol);
        for (const CMat& t : basis) {
            if (max_abs(t - t(0, 0) * CMat::Identity(x.level, x.level)) > 100 * tol.eps_rank) {
                r.commutant_witness = t;
                break;
            }
        }
    }
    std::optional<DilationWitness> w;
    r.maximal = is_maximal(k, x, tol, &w);
    if (!r.maximal) r.dilation = w;
    r.nc_extreme = r.irreducible && r.maximal;
    auto h = find_perturbation(k, x, tol);
    r.euclidean_extreme_at_level = !h.has_value();
    if (h) r.perturbation = h;
    return r;
}

DilateResult dilate_to_maximal(const NcSet& k, const NcPoint& x, int max_steps,
                               const Tolerances& tol) {
    DilateResult res;
    res.point = x;
    for (int step = 0; step < max_steps; ++step) {
        auto w = find_one_step_dilation(k, res.point, tol);
        if (!w) {
            res.maximal = true;
            res.steps = step;
            res.embedding = inclusion(res.point.level, x.level);
            return res;
        }
        res.point = w->parent;
    }
    res.maximal = false;
    res.steps = max_steps;
    res.embedding = inclusion(res.point.level, x.level);
    return res;
}

KreinMilmanResult krein_milman_check(const NcSet& k, const NcPoint& x,
                                     const std::vector<NcPoint>& extreme_candidates,
                                     const Tolerances& tol) {
    for (const NcPoint& c : extreme_candidates)
        if (!membership(k, c, tol).inside)
            throw std::invalid_argument("krein_milman_check: candidate outside set");
    HullPresentation h;
    h.generators = extreme_candidates;
    NcSet hull = hull_set(h);
    // membership against the candidate hull; weights from Kraus columns of
    // the Choi solution of the same feasibility problem
    SdpProblem prob;
    const int n = x.level;
    const int ng = static_cast<int>(extreme_candidates.size());
    for (int i = 0; i < ng; ++i)
        prob.add_block("choi" + std::to_string(i), extreme_candidates[i].level * n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            SdpConstraint c;
            for (int i = 0; i < ng; ++i)
                for (int a = 0; a < extreme_candidates[i].level; ++a)
                    c.terms.push_back({i, a * n + s, a * n + t, Complex(1, 0)});
            c.rhs = (s == t) ? 1.0 : 0.0;
            prob.add_constraint(c);
        }
    for (int j = 0; j < x.d; ++j)
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                SdpConstraint c;
                for (int i = 0; i < ng; ++i) {
                    const int na = extreme_candidates[i].level;
                    for (int a = 0; a < na; ++a)
                        for (int b = 0; b < na; ++b) {
                            Complex g = extreme_candidates[i].mats[j](a, b);
                            if (g != Complex(0, 0)) c.terms.push_back({i, a * n + s, b * n + t, g});
                        }
                }
                c.rhs = x.mats[j](s, t);
                prob.add_constraint(c);
            }
    SdpSolution sol = solve_sdp(prob, tol);
    KreinMilmanResult res;
    if (sol.status != SdpStatus::Optimal) {
        res.representable = false;
        auto m = membership(hull, x, tol);
        res.gap = m.witness ? m.witness->violation : 0.0;
        return res;
    }
    res.representable = true;
    for (int i = 0; i < ng; ++i) {
        const int na = extreme_candidates[i].level;
        Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(sol.blocks[i]));
        std::vector<CMat> cols;
        for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
            double lam = es.eigenvalues()(c);
            if (lam < 1e-11) continue;
            CMat m(na, n);
            for (int a = 0; a < na; ++a)
                for (int s = 0; s < n; ++s) m(a, s) = std::conj(es.eigenvectors()(a * n + s, c));
            cols.push_back(std::sqrt(lam) * m);
        }
        res.weights.push_back(std::move(cols));
    }
    return res;
}

}  // namespace ncc
