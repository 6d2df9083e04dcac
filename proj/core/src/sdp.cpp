#include "ncc/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ncc {

int SdpProblem::add_block(const std::string& name, int n) {
    if (n < 1) throw std::invalid_argument("SdpProblem: block dim must be >= 1");
    block_dims_.push_back(n);
    block_names_.push_back(name);
    return static_cast<int>(block_dims_.size()) - 1;
}

int SdpProblem::add_free(int count) {
    if (count < 1) throw std::invalid_argument("SdpProblem: free count must be >= 1");
    int first = num_free_;
    num_free_ += count;
    return first;
}

void SdpProblem::add_constraint(SdpConstraint c) {
    for (const SdpTerm& t : c.terms) {
        if (t.block < 0 || t.block >= num_blocks() || t.row < 0 || t.col < 0 ||
            t.row >= block_dims_[t.block] || t.col >= block_dims_[t.block])
            throw std::invalid_argument("SdpProblem: term index out of range");
    }
    for (const SdpFreeTerm& t : c.free_terms)
        if (t.index < 0 || t.index >= num_free_)
            throw std::invalid_argument("SdpProblem: free index out of range");
    constraints_.push_back(std::move(c));
}

void SdpProblem::set_objective(std::vector<SdpTerm> terms, std::vector<SdpFreeTerm> free_terms) {
    obj_terms_ = std::move(terms);
    obj_free_ = std::move(free_terms);
}

std::string SdpProblem::dump_json() const {
    nlohmann::json j;
    j["blocks"] = nlohmann::json::array();
    for (size_t b = 0; b < block_dims_.size(); ++b)
        j["blocks"].push_back({{"name", block_names_[b]}, {"dim", block_dims_[b]}});
    j["num_free"] = num_free_;
    auto dump_terms = [](const std::vector<SdpTerm>& ts, const std::vector<SdpFreeTerm>& fs,
                         Complex rhs, bool with_rhs) {
        nlohmann::json c;
        c["terms"] = nlohmann::json::array();
        for (const SdpTerm& t : ts)
            c["terms"].push_back({t.block, t.row, t.col, t.coeff.real(), t.coeff.imag()});
        c["free_terms"] = nlohmann::json::array();
        for (const SdpFreeTerm& t : fs)
            c["free_terms"].push_back({t.index, t.coeff.real(), t.coeff.imag()});
        if (with_rhs) c["rhs"] = {rhs.real(), rhs.imag()};
        return c;
    };
    j["constraints"] = nlohmann::json::array();
    for (const SdpConstraint& c : constraints_)
        j["constraints"].push_back(dump_terms(c.terms, c.free_terms, c.rhs, true));
    j["objective"] = dump_terms(obj_terms_, obj_free_, Complex(0, 0), false);
    return j.dump(2);
}

namespace {

// ---------------------------------------------------------------------------
// Realified standard form.
//
// Each complex Hermitian n x n block becomes a real symmetric 2n x 2n block
// under X = A + iB  ->  [[A, -B], [B, A]].  Coefficient functionals are
// written in the J-averaged reading
//   A(i,j) ~ (Y(i,j) + Y(i+n,j+n)) / 2,   B(i,j) ~ (Y(i+n,j) - Y(i,j+n)) / 2,
// which is invariant under conjugation by J = [[0,-I],[I,0]], so an optimal
// real Y can be J-averaged and read back as a complex Hermitian PSD matrix.
//
// Sparse symmetric functionals: triplets (p <= q, val) meaning the coefficient
// matrix S with S(p,q) = S(q,p) = val, i.e. value(Y) = sum val * (p == q ?
// Y(p,p) : 2 Y(p,q)).
// ---------------------------------------------------------------------------

struct Trip {
    int p, q;  // p <= q
    double v;
};

struct SparseSym {
    // one triplet list per real block
    std::vector<std::vector<Trip>> blk;
};

using DenseBlocks = std::vector<RMat>;

struct RealForm {
    std::vector<int> dims;            // real block dims (2n per complex block)
    std::vector<SparseSym> rows;      // m constraint functionals
    RVec rhs;                         // m
    RMat free_coeffs;                 // m x F
    SparseSym obj;
    RVec obj_free;                    // F
};

class TripletBuilder {
public:
    explicit TripletBuilder(int nblocks) : maps_(nblocks) {}

    // add coefficient c for the single real entry Y(p, q) of block b
    void add_entry(int b, int p, int q, double c) {
        if (std::abs(c) == 0.0) return;
        if (p > q) std::swap(p, q);
        // value convention counts off-diagonal entries twice
        maps_[b][{p, q}] += (p == q) ? c : 0.5 * c;
    }

    SparseSym take() {
        SparseSym s;
        s.blk.resize(maps_.size());
        for (size_t b = 0; b < maps_.size(); ++b) {
            for (const auto& [key, v] : maps_[b])
                if (std::abs(v) > 0.0) s.blk[b].push_back({key.first, key.second, v});
            maps_[b].clear();
        }
        return s;
    }

private:
    std::vector<std::map<std::pair<int, int>, double>> maps_;
};

// contributes coeff * X(i, j) of complex block b (dim n) to a real functional;
// re = true takes the real part of the contribution, false the imaginary part.
void add_complex_entry(TripletBuilder& tb, int b, int n, int i, int j, Complex coeff, bool re) {
    // with X = A + iB: Re(v X(i,j)) = Re(v) A(i,j) - Im(v) B(i,j),
    //                  Im(v X(i,j)) = Im(v) A(i,j) + Re(v) B(i,j),
    // and the J-averaged reads A(i,j) = (Y(i,j)+Y(i+n,j+n))/2,
    //                          B(i,j) = (Y(i+n,j)-Y(i,j+n))/2.
    double rv = re ? coeff.real() : coeff.imag();
    double iv = re ? -coeff.imag() : coeff.real();
    tb.add_entry(b, i, j, 0.5 * rv);
    tb.add_entry(b, i + n, j + n, 0.5 * rv);
    tb.add_entry(b, i + n, j, 0.5 * iv);
    tb.add_entry(b, i, j + n, -0.5 * iv);
}

RealForm realify(const SdpProblem& p) {
    RealForm rf;
    const int nb = p.num_blocks();
    for (int b = 0; b < nb; ++b) rf.dims.push_back(2 * p.block_dim(b));
    const int m = 2 * p.num_constraints();
    rf.rhs.resize(m);
    rf.free_coeffs = RMat::Zero(m, p.num_free());
    rf.rows.reserve(m);
    for (int k = 0; k < p.num_constraints(); ++k) {
        const SdpConstraint& c = p.constraints()[k];
        for (int part = 0; part < 2; ++part) {
            const bool re = (part == 0);
            TripletBuilder tb(nb);
            for (const SdpTerm& t : c.terms)
                add_complex_entry(tb, t.block, p.block_dim(t.block), t.row, t.col, t.coeff, re);
            rf.rows.push_back(tb.take());
            const int r = 2 * k + part;
            rf.rhs(r) = re ? c.rhs.real() : c.rhs.imag();
            for (const SdpFreeTerm& ft : c.free_terms)
                rf.free_coeffs(r, ft.index) += re ? ft.coeff.real() : ft.coeff.imag();
        }
    }
    // objective: real part (the builder contract requires a real objective)
    TripletBuilder tb(nb);
    for (const SdpTerm& t : p.objective_terms())
        add_complex_entry(tb, t.block, p.block_dim(t.block), t.row, t.col, t.coeff, true);
    rf.obj = tb.take();
    if (static_cast<int>(rf.obj.blk.size()) < nb) rf.obj.blk.resize(nb);
    rf.obj_free = RVec::Zero(p.num_free());
    for (const SdpFreeTerm& t : p.objective_free_terms()) rf.obj_free(t.index) += t.coeff.real();
    return rf;
}

double sdot(const SparseSym& a, const DenseBlocks& y) {
    double s = 0.0;
    for (size_t b = 0; b < a.blk.size(); ++b)
        for (const Trip& t : a.blk[b])
            s += t.v * (t.p == t.q ? y[b](t.p, t.p) : 2.0 * y[b](t.p, t.q));
    return s;
}

void saxpy(DenseBlocks& y, double alpha, const SparseSym& a) {
    for (size_t b = 0; b < a.blk.size(); ++b)
        for (const Trip& t : a.blk[b]) {
            y[b](t.p, t.q) += alpha * t.v;
            if (t.p != t.q) y[b](t.q, t.p) += alpha * t.v;
        }
}

double snorm(const SparseSym& a) {
    double s = 0.0;
    for (const auto& blk : a.blk)
        for (const Trip& t : blk) s += (t.p == t.q ? 1.0 : 2.0) * t.v * t.v;
    return std::sqrt(s);
}

// <A, sym(X B Zinv)> for sparse A, B and symmetric dense X, Zinv (same trick:
// the symmetrization is free because all four factors pair symmetrically).
double pair_quad(const SparseSym& a, const SparseSym& b, const DenseBlocks& x,
                 const DenseBlocks& zinv) {
    double s = 0.0;
    const size_t nb = a.blk.size();
    for (size_t blk = 0; blk < nb; ++blk) {
        const auto& at = a.blk[blk];
        const auto& bt = b.blk[blk];
        if (at.empty() || bt.empty()) continue;
        const RMat& X = x[blk];
        const RMat& Zi = zinv[blk];
        for (const Trip& ta : at) {
            const int p = ta.p, q = ta.q;
            for (const Trip& tb : bt) {
                const int i = tb.p, j = tb.q;
                // <Sym(p,q), X Sym(i,j) Zinv>, Sym(i,j) = E_ij + E_ji (i != j) or E_ii
                double f = X(p, i) * Zi(j, q);
                if (i != j) f += X(p, j) * Zi(i, q);
                if (p != q) {
                    f += X(q, i) * Zi(j, p);
                    if (i != j) f += X(q, j) * Zi(i, p);
                }
                s += ta.v * tb.v * f;
            }
        }
    }
    return s;
}

struct Presolve {
    // original real rows -> reduced pure-semidefinite rows
    std::vector<SparseSym> rows;
    RVec rhs;
    SparseSym obj;         // objective after free-variable substitution
    double obj_const = 0;  // constant added to the reduced objective value
    RVec w;                // dual shift: y_orig = w + Q2 * pad(y_reduced)
    RMat q2;               // m_orig x m_qr basis of rows orthogonal to range(F)
    std::vector<int> kept;  // reduced-row indices kept after row reduction (into q2 cols)
    // recovery of u: u = u_const + u_lin * (A(X) stacked per original row)
    RMat u_recover;  // F x m_orig, applied to (b - A(X))
    Eigen::PermutationMatrix<Eigen::Dynamic> perm{0};
    int rank_f = 0;
    bool unbounded_free = false;
    bool infeasible_rows = false;
    RVec infeas_cert;  // original-row certificate when dependent rows are inconsistent
};

struct CoreProblem {
    std::vector<int> dims;
    std::vector<SparseSym> rows;  // independent, span a linearly independent set
    RVec rhs;
    SparseSym obj;
};

SparseSym combine_rows(const std::vector<SparseSym>& rows, const RVec& coef,
                       const std::vector<int>& dims) {
    TripletBuilder tb(static_cast<int>(dims.size()));
    for (int r = 0; r < coef.size(); ++r) {
        if (coef(r) == 0.0) continue;
        for (size_t b = 0; b < rows[r].blk.size(); ++b)
            for (const Trip& t : rows[r].blk[b]) {
                double c = coef(r) * t.v;
                tb.add_entry(static_cast<int>(b), t.p, t.q, c);
                if (t.p != t.q) tb.add_entry(static_cast<int>(b), t.q, t.p, c);
            }
    }
    return tb.take();
}

// Interior-point state and result on the reduced real standard form.
struct CoreResult {
    SdpStatus status = SdpStatus::NumericalFailure;
    DenseBlocks x;
    RVec y;
    DenseBlocks z;
    double objective = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

class HsdSolver {
public:
    HsdSolver(const CoreProblem& p, const Tolerances& tol) : p_(p), tol_(tol) {}

    CoreResult run() {
        init();
        CoreResult res;
        const double bnorm = 1.0 + p_.rhs.norm();
        const double cnorm = 1.0 + snorm(p_.obj);
        const int max_iter = 200;
        for (int it = 0; it < max_iter; ++it) {
            compute_residuals();
            const double mu = duality_mu();
            const double pinf = rp_.norm() / (tau_ * bnorm);
            const double dinf = rd_norm() / (tau_ * cnorm);
            const double pobj = sdot(p_.obj, x_) / tau_;
            const double dobj = p_.rhs.dot(y_) / tau_;
            const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
            const double feas_tol = std::max(1e-10, 0.02 * tol_.eps_sdp);
            if (pinf <= feas_tol && dinf <= feas_tol && relgap <= 0.5 * tol_.eps_sdp) {
                res.status = SdpStatus::Optimal;
                finish(res, pobj, dobj, it);
                return res;
            }
            // homogeneous ray: tau collapsing against kappa signals infeasibility
            if (tau_ <= 1e-10 * std::max(1.0, kappa_) && mu <= 1e-10 * mu0_) {
                classify_ray(res, it);
                return res;
            }
            if (!iterate()) {
                // stalled; accept a slightly looser optimum before failing
                if (pinf <= 10 * feas_tol && dinf <= 10 * feas_tol && relgap <= tol_.eps_sdp) {
                    res.status = SdpStatus::Optimal;
                    finish(res, pobj, dobj, it);
                    return res;
                }
                if (tau_ <= 1e-7 * std::max(1.0, kappa_)) {
                    classify_ray(res, it);
                    return res;
                }
                res.status = SdpStatus::NumericalFailure;
                res.iterations = it;
                return res;
            }
        }
        res.status = SdpStatus::NumericalFailure;
        res.iterations = max_iter;
        return res;
    }

private:
    const CoreProblem& p_;
    Tolerances tol_;
    DenseBlocks x_, z_, zinv_;
    std::vector<Eigen::LLT<RMat>> xchol_, zchol_;
    RVec y_;
    double tau_ = 1.0, kappa_ = 1.0, mu0_ = 1.0;
    RVec rp_;
    DenseBlocks rd_;
    double rg_ = 0.0;

    int total_dim() const {
        int n = 0;
        for (int d : p_.dims) n += d;
        return n;
    }

    void init() {
        x_.clear();
        z_.clear();
        for (int d : p_.dims) {
            x_.push_back(RMat::Identity(d, d));
            z_.push_back(RMat::Identity(d, d));
        }
        y_ = RVec::Zero(static_cast<int>(p_.rows.size()));
        tau_ = 1.0;
        kappa_ = 1.0;
        mu0_ = duality_mu();
    }

    double duality_mu() const {
        double s = tau_ * kappa_;
        for (size_t b = 0; b < x_.size(); ++b) s += (x_[b].cwiseProduct(z_[b])).sum();
        return s / (total_dim() + 1);
    }

    void compute_residuals() {
        const int m = static_cast<int>(p_.rows.size());
        rp_.resize(m);
        for (int r = 0; r < m; ++r) rp_(r) = p_.rhs(r) * tau_ - sdot(p_.rows[r], x_);
        rd_.clear();
        for (int d : p_.dims) rd_.push_back(RMat::Zero(d, d));
        for (size_t b = 0; b < z_.size(); ++b) rd_[b] += z_[b];
        for (int r = 0; r < m; ++r) saxpy(rd_, y_(r), p_.rows[r]);
        saxpy(rd_, -tau_, p_.obj);
        rg_ = kappa_ + sdot(p_.obj, x_) - p_.rhs.dot(y_);
    }

    double rd_norm() const {
        double s = 0.0;
        for (const RMat& r : rd_) s += r.squaredNorm();
        return std::sqrt(s);
    }

    bool factorize() {
        xchol_.clear();
        zchol_.clear();
        zinv_.clear();
        for (size_t b = 0; b < x_.size(); ++b) {
            xchol_.emplace_back(x_[b]);
            zchol_.emplace_back(z_[b]);
            if (xchol_.back().info() != Eigen::Success || zchol_.back().info() != Eigen::Success)
                return false;
            const int d = static_cast<int>(z_[b].rows());
            zinv_.push_back(zchol_.back().solve(RMat::Identity(d, d)));
        }
        return true;
    }

    // max alpha with M + alpha dM PSD, via L^{-1} dM L^{-T} eigenvalues
    static double max_step(const Eigen::LLT<RMat>& chol, const RMat& dm) {
        const RMat l = chol.matrixL();
        RMat w = l.triangularView<Eigen::Lower>().solve(dm);
        w = l.triangularView<Eigen::Lower>().solve(w.transpose().eval());
        Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin >= -1e-14) return 1e30;
        return -1.0 / lmin;
    }

    struct Direction {
        DenseBlocks dx, dz;
        RVec dy;
        double dtau = 0.0, dkappa = 0.0;
    };

    // Solve one HKM Newton system with complementarity rhs R4 (per block) and r5.
    bool newton(const DenseBlocks& r4, double r5, const Eigen::LDLT<RMat>& schur,
                const RVec& m_c, Direction& d) {
        const int m = static_cast<int>(p_.rows.size());
        // sym(R4 Zinv) per block, and its pairings
        DenseBlocks sr4;
        for (size_t b = 0; b < x_.size(); ++b) {
            RMat t = r4[b] * zinv_[b];
            sr4.push_back(0.5 * (t + t.transpose()));
        }
        // sym(X Rd Zinv)
        DenseBlocks srd;
        for (size_t b = 0; b < x_.size(); ++b) {
            RMat t = x_[b] * rd_[b] * zinv_[b];
            srd.push_back(0.5 * (t + t.transpose()));
        }
        RVec g1_rhs(m);
        for (int r = 0; r < m; ++r)
            g1_rhs(r) = rp_(r) - sdot(p_.rows[r], sr4) - sdot(p_.rows[r], srd);
        RVec g2_rhs = m_c + p_.rhs;
        RVec g1 = m > 0 ? RVec(schur.solve(g1_rhs)) : RVec(0);
        RVec g2 = m > 0 ? RVec(schur.solve(g2_rhs)) : RVec(0);
        const double c_r4 = sdot(p_.obj, sr4);
        const double c_rd = sdot(p_.obj, srd);
        // cC = <C, X C Zinv>
        const double c_c = pair_quad(p_.obj, p_.obj, x_, zinv_);
        const double mb_g1 = m > 0 ? (m_c - p_.rhs).dot(g1) : 0.0;
        const double mb_g2 = m > 0 ? (m_c - p_.rhs).dot(g2) : 0.0;
        const double denom = -kappa_ / tau_ - c_c + mb_g2;
        const double numer = -rg_ - r5 / tau_ - c_r4 - c_rd - mb_g1;
        if (!(std::abs(denom) > 1e-300)) return false;
        d.dtau = numer / denom;
        d.dy = g1 + d.dtau * g2;
        d.dkappa = (r5 - kappa_ * d.dtau) / tau_;
        // dZ = C dtau - A*(dy) - Rd
        d.dz.clear();
        for (int dd : p_.dims) d.dz.push_back(RMat::Zero(dd, dd));
        saxpy(d.dz, d.dtau, p_.obj);
        for (int r = 0; r < m; ++r) saxpy(d.dz, -d.dy(r), p_.rows[r]);
        for (size_t b = 0; b < x_.size(); ++b) d.dz[b] -= rd_[b];
        // dX = sym((R4 - X dZ) Zinv)
        d.dx.clear();
        for (size_t b = 0; b < x_.size(); ++b) {
            RMat t = (r4[b] - x_[b] * d.dz[b]) * zinv_[b];
            d.dx.push_back(0.5 * (t + t.transpose()));
        }
        return true;
    }

    double direction_step(const Direction& d) const {
        double a = 1e30;
        for (size_t b = 0; b < x_.size(); ++b) {
            a = std::min(a, max_step(xchol_[b], d.dx[b]));
            a = std::min(a, max_step(zchol_[b], d.dz[b]));
        }
        if (d.dtau < 0) a = std::min(a, -tau_ / d.dtau);
        if (d.dkappa < 0) a = std::min(a, -kappa_ / d.dkappa);
        return a;
    }

    bool iterate() {
        if (!factorize()) return false;
        const int m = static_cast<int>(p_.rows.size());
        // Schur complement M_kl = <A_k, X A_l Zinv> (symmetric for HKM)
        RMat schur_m(m, m);
        for (int k = 0; k < m; ++k)
            for (int l = k; l < m; ++l) {
                double v = pair_quad(p_.rows[k], p_.rows[l], x_, zinv_);
                schur_m(k, l) = v;
                schur_m(l, k) = v;
            }
        // tiny regularization guards late-stage roundoff asymmetry
        if (m > 0) schur_m.diagonal().array() += 1e-13 * (1.0 + schur_m.diagonal().maxCoeff());
        Eigen::LDLT<RMat> schur(schur_m);
        if (m > 0 && schur.info() != Eigen::Success) return false;
        RVec m_c(m);
        for (int k = 0; k < m; ++k) m_c(k) = pair_quad(p_.rows[k], p_.obj, x_, zinv_);

        const double mu = duality_mu();
        // predictor: sigma = 0
        DenseBlocks r4p;
        for (size_t b = 0; b < x_.size(); ++b) r4p.push_back(-x_[b] * z_[b]);
        Direction pred;
        if (!newton(r4p, -tau_ * kappa_, schur, m_c, pred)) return false;
        double ap = std::min(1.0, 0.99 * direction_step(pred));
        // Mehrotra centering parameter
        double mu_aff = tau_ * kappa_ + ap * (kappa_ * pred.dtau + tau_ * pred.dkappa) +
                        ap * ap * pred.dtau * pred.dkappa;
        for (size_t b = 0; b < x_.size(); ++b) {
            mu_aff += ((x_[b] + ap * pred.dx[b]).cwiseProduct(z_[b] + ap * pred.dz[b])).sum();
        }
        mu_aff /= (total_dim() + 1);
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // corrector
        DenseBlocks r4c;
        for (size_t b = 0; b < x_.size(); ++b) {
            const int dd = p_.dims[b];
            r4c.push_back(sigma * mu * RMat::Identity(dd, dd) - x_[b] * z_[b] -
                          pred.dx[b] * pred.dz[b]);
        }
        const double r5 = sigma * mu - tau_ * kappa_ - pred.dtau * pred.dkappa;
        Direction corr;
        if (!newton(r4c, r5, schur, m_c, corr)) return false;
        double a = std::min(1.0, 0.98 * direction_step(corr));
        // fall back to the predictor if the corrector collapses
        if (a < 1e-10) {
            corr = pred;
            a = std::min(1.0, 0.5 * ap);
        }
        if (a < 1e-9) return false;
        // verified positive-definite step with backtracking
        for (int tries = 0; tries < 30; ++tries) {
            bool ok = tau_ + a * corr.dtau > 0 && kappa_ + a * corr.dkappa > 0;
            for (size_t b = 0; ok && b < x_.size(); ++b) {
                ok = Eigen::LLT<RMat>(x_[b] + a * corr.dx[b]).info() == Eigen::Success &&
                     Eigen::LLT<RMat>(z_[b] + a * corr.dz[b]).info() == Eigen::Success;
            }
            if (ok) break;
            a *= 0.7;
            if (a < 1e-10) return false;
        }
        for (size_t b = 0; b < x_.size(); ++b) {
            x_[b] += a * corr.dx[b];
            x_[b] = 0.5 * (x_[b] + x_[b].transpose()).eval();
            z_[b] += a * corr.dz[b];
            z_[b] = 0.5 * (z_[b] + z_[b].transpose()).eval();
        }
        y_ += a * corr.dy;
        tau_ += a * corr.dtau;
        kappa_ += a * corr.dkappa;
        return true;
    }

    void finish(CoreResult& res, double pobj, double dobj, int it) {
        res.x.clear();
        res.z.clear();
        for (size_t b = 0; b < x_.size(); ++b) {
            res.x.push_back(x_[b] / tau_);
            res.z.push_back(z_[b] / tau_);
        }
        res.y = y_ / tau_;
        res.objective = pobj;
        res.gap = std::abs(pobj - dobj);
        res.iterations = it;
    }

    void classify_ray(CoreResult& res, int it) {
        res.iterations = it;
        const double bty = p_.rhs.dot(y_);
        const double ctx = sdot(p_.obj, x_);
        // primal infeasibility: A*(y) <= Z with b^T y > 0 on the ray
        if (bty > 1e-12) {
            res.status = SdpStatus::Infeasible;
            res.y = y_ / bty;
            res.z.clear();
            for (const RMat& zb : z_) res.z.push_back(zb / bty);
            return;
        }
        if (ctx < -1e-12) {
            res.status = SdpStatus::Unbounded;
            res.x.clear();
            double scale = -1.0 / ctx;
            for (const RMat& xb : x_) res.x.push_back(xb * scale);
            return;
        }
        res.status = SdpStatus::NumericalFailure;
    }
};

// J-averaged readback of a real 2n x 2n block as complex Hermitian n x n.
CMat complexify(const RMat& y, int n) {
    CMat out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double re = 0.5 * (y(i, j) + y(i + n, j + n));
            double im = 0.5 * (y(i + n, j) - y(i, j + n));
            out(i, j) = Complex(re, im);
        }
    return hermitian_part(out);
}

// Free-variable elimination and row reduction; produces the core problem.
bool presolve(const RealForm& rf, const std::vector<int>& dims, Presolve& ps, CoreProblem& core) {
    const int m = static_cast<int>(rf.rows.size());
    const int nf = static_cast<int>(rf.free_coeffs.cols());
    core.dims = dims;

    std::vector<SparseSym> rows2;  // rows with free variables eliminated
    RVec rhs2;
    ps.w = RVec::Zero(m);
    ps.u_recover = RMat::Zero(nf, m);

    if (nf > 0) {
        Eigen::ColPivHouseholderQR<RMat> qr(rf.free_coeffs);
        qr.setThreshold(1e-12);
        const int rk = static_cast<int>(qr.rank());
        ps.rank_f = rk;
        RMat qfull = qr.householderQ() * RMat::Identity(m, m);
        RMat r = qr.matrixR().topRows(std::min(m, nf)).triangularView<Eigen::Upper>();
        ps.perm = qr.colsPermutation();
        RVec cz = ps.perm.transpose() * rf.obj_free;
        // objective component along null(F): R2^T R1^{-T} cz1 must match cz2
        if (rk < nf) {
            RVec cz1 = cz.head(rk);
            RMat r1 = r.topLeftCorner(rk, rk);
            RMat r2 = r.topRightCorner(rk, nf - rk);
            RVec pred = r2.transpose() * r1.transpose().triangularView<Eigen::Lower>().solve(cz1);
            if ((pred - cz.tail(nf - rk)).norm() > 1e-9 * (1.0 + rf.obj_free.norm())) {
                ps.unbounded_free = true;
                return true;
            }
        }
        if (rk > 0) {
            RMat r1 = r.topLeftCorner(rk, rk);
            RVec cz1 = cz.head(rk);
            // w = Q1 R1^{-T} cz1 shifts duals; objective gains -A*(w) and const w.b
            RVec t = r1.transpose().triangularView<Eigen::Lower>().solve(cz1);
            ps.w = qfull.leftCols(rk) * t;
            // u(X) = P [ R1^{-1} Q1^T (b - A(X)) ; 0 ]
            RMat rinvq = r1.triangularView<Eigen::Upper>().solve(
                RMat(qfull.leftCols(rk).transpose()));
            RMat urec = RMat::Zero(nf, m);
            urec.topRows(rk) = rinvq;
            ps.u_recover = ps.perm * urec;
        }
        ps.q2 = qfull.rightCols(m - rk);
        for (int c = 0; c < m - rk; ++c) {
            rows2.push_back(combine_rows(rf.rows, ps.q2.col(c), dims));
        }
        rhs2 = ps.q2.transpose() * rf.rhs;
        // reduced objective C' = C - sum_r w_r A_r
        core.obj = rf.obj;
        core.obj.blk.resize(dims.size());
        {
            RVec negw = -ps.w;
            SparseSym shift = combine_rows(rf.rows, negw, dims);
            TripletBuilder tb(static_cast<int>(dims.size()));
            for (size_t b = 0; b < dims.size(); ++b) {
                for (const Trip& t : core.obj.blk[b]) {
                    tb.add_entry(static_cast<int>(b), t.p, t.q, t.v);
                    if (t.p != t.q) tb.add_entry(static_cast<int>(b), t.q, t.p, t.v);
                }
                for (const Trip& t : shift.blk[b]) {
                    tb.add_entry(static_cast<int>(b), t.p, t.q, t.v);
                    if (t.p != t.q) tb.add_entry(static_cast<int>(b), t.q, t.p, t.v);
                }
            }
            core.obj = tb.take();
        }
        ps.obj_const = ps.w.dot(rf.rhs);
    } else {
        ps.q2 = RMat::Identity(m, m);
        ps.rank_f = 0;
        rows2 = rf.rows;
        rhs2 = rf.rhs;
        core.obj = rf.obj;
        core.obj.blk.resize(dims.size());
        ps.obj_const = 0.0;
    }

    // Row reduction: greedy pivoted Cholesky on the Gram matrix of the rows.
    const int m2 = static_cast<int>(rows2.size());
    DenseBlocks scratch;
    for (int d : dims) scratch.push_back(RMat::Zero(d, d));
    RMat gram(m2, m2);
    for (int i = 0; i < m2; ++i) {
        for (auto& s : scratch) s.setZero();
        saxpy(scratch, 1.0, rows2[i]);
        for (int j = i; j < m2; ++j) {
            double v = sdot(rows2[j], scratch);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    const double gmax = m2 > 0 ? std::max(1e-30, gram.diagonal().maxCoeff()) : 1.0;
    std::vector<int> kept;
    RVec resid = gram.diagonal();
    RMat lfac = RMat::Zero(m2, m2);  // columns of partial Cholesky factors
    std::vector<bool> used(m2, false);
    for (int step = 0; step < m2; ++step) {
        int piv = -1;
        double best = 1e-12 * gmax;
        for (int i = 0; i < m2; ++i)
            if (!used[i] && resid(i) > best) {
                best = resid(i);
                piv = i;
            }
        if (piv < 0) break;
        used[piv] = true;
        const int k = static_cast<int>(kept.size());
        double d = std::sqrt(resid(piv));
        for (int i = 0; i < m2; ++i) {
            double v = gram(i, piv);
            for (int t = 0; t < k; ++t) v -= lfac(i, t) * lfac(piv, t);
            lfac(i, k) = v / d;
        }
        for (int i = 0; i < m2; ++i)
            if (!used[i]) resid(i) = std::max(0.0, resid(i) - lfac(i, k) * lfac(i, k));
        kept.push_back(piv);
    }
    // dropped rows must be consistent: row_j = sum c row_kept with matching rhs
    for (int j = 0; j < m2; ++j) {
        if (used[j]) continue;
        const int k = static_cast<int>(kept.size());
        // lfac(j, :) holds <row_j, q_t> in the kept-row orthogonal frame
        RVec coord = lfac.row(j).head(k);
        // rhs of row_j predicted from kept rows: solve L_kept^T c = coord? Use
        // the frame directly: q_t rhs values.
        RVec qrhs(k);
        for (int t = 0; t < k; ++t) {
            double v = rhs2(kept[t]);
            for (int s = 0; s < t; ++s) v -= lfac(kept[t], s) * qrhs(s);
            qrhs(t) = v / lfac(kept[t], t);
        }
        double pred = coord.dot(qrhs);
        double scale = 1.0 + rhs2.cwiseAbs().maxCoeff();
        if (std::abs(rhs2(j) - pred) > 1e-7 * scale) {
            ps.infeasible_rows = true;
            // certificate: nu with sum nu_r row_r = 0, nu.rhs != 0
            RMat lk(k, k);
            for (int a = 0; a < k; ++a)
                for (int bcol = 0; bcol < k; ++bcol) lk(a, bcol) = lfac(kept[a], bcol);
            RVec c = lk.transpose()
                         .triangularView<Eigen::Upper>()
                         .solve(RVec(coord));
            RVec nu = RVec::Zero(m2);
            nu(j) = 1.0;
            for (int t = 0; t < k; ++t) nu(kept[t]) -= c(t);
            double viol = rhs2(j) - pred;
            nu /= viol;  // now nu . rhs2 = 1, combine_rows(nu) ~ 0
            ps.infeas_cert = ps.q2 * nu;
            return true;
        }
    }
    ps.kept = kept;
    core.rows.clear();
    core.rhs.resize(static_cast<int>(kept.size()));
    for (size_t t = 0; t < kept.size(); ++t) {
        core.rows.push_back(rows2[kept[t]]);
        core.rhs(static_cast<int>(t)) = rhs2[kept[t]];
    }
    ps.rows = std::move(rows2);
    ps.rhs = rhs2;
    return true;
}

}  // namespace

namespace {

// complex Hermitian coefficient matrices of the two real rows of constraint k,
// accumulated into per-block dense matrices scaled by (y_re, y_im).
void accumulate_adjoint(std::vector<CMat>& acc, const std::vector<SdpTerm>& terms, double y_re,
                        double y_im) {
    for (const SdpTerm& t : terms) {
        const Complex v = t.coeff;
        // Re row: (v E_ji + conj(v) E_ij)/2 ; Im row: (v E_ji - conj(v) E_ij)/(2i)
        Complex re_ji = 0.5 * v, re_ij = 0.5 * std::conj(v);
        Complex im_ji = v / Complex(0, 2), im_ij = -std::conj(v) / Complex(0, 2);
        acc[t.block](t.col, t.row) += y_re * re_ji + y_im * im_ji;
        acc[t.block](t.row, t.col) += y_re * re_ij + y_im * im_ij;
    }
}

Complex eval_constraint(const SdpConstraint& c, const std::vector<CMat>& blocks,
                        const RVec& free_values) {
    Complex v = 0;
    for (const SdpTerm& t : c.terms) v += t.coeff * blocks[t.block](t.row, t.col);
    for (const SdpFreeTerm& t : c.free_terms) v += t.coeff * free_values(t.index);
    return v;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const Tolerances& tol) {
    tol.validate();
    SdpSolution sol;
    if (p.num_blocks() == 0 && p.num_free() == 0)
        throw std::invalid_argument("solve_sdp: empty problem");

    RealForm rf = realify(p);
    std::vector<int> dims;
    for (int b = 0; b < p.num_blocks(); ++b) dims.push_back(2 * p.block_dim(b));

    Presolve ps;
    CoreProblem core;
    presolve(rf, dims, ps, core);
    const int m_orig = static_cast<int>(rf.rows.size());

    if (ps.unbounded_free) {
        sol.status = SdpStatus::Unbounded;
        return sol;
    }
    if (ps.infeasible_rows) {
        sol.status = SdpStatus::Infeasible;
        sol.dual = ps.infeas_cert;
        std::vector<CMat> acc;
        for (int b = 0; b < p.num_blocks(); ++b)
            acc.push_back(CMat::Zero(p.block_dim(b), p.block_dim(b)));
        for (int k = 0; k < p.num_constraints(); ++k)
            accumulate_adjoint(acc, p.constraints()[k].terms, -sol.dual(2 * k),
                               -sol.dual(2 * k + 1));
        sol.dual_slack = std::move(acc);
        sol.certificate_margin = 1.0;
        return sol;
    }

    HsdSolver solver(core, tol);
    CoreResult res = solver.run();
    sol.iterations = res.iterations;
    sol.status = res.status;

    auto pad_to_orig = [&](const RVec& ycore) {
        RVec pad = RVec::Zero(static_cast<int>(ps.rows.size()));
        for (size_t t = 0; t < ps.kept.size(); ++t) pad(ps.kept[t]) = ycore(static_cast<int>(t));
        return RVec(ps.q2 * pad);
    };

    if (res.status == SdpStatus::Optimal) {
        for (int b = 0; b < p.num_blocks(); ++b)
            sol.blocks.push_back(complexify(res.x[b], p.block_dim(b)));
        sol.dual = ps.w + pad_to_orig(res.y);
        for (int b = 0; b < p.num_blocks(); ++b)
            sol.dual_slack.push_back(complexify(res.z[b], p.block_dim(b)));
        sol.gap = res.gap;
        sol.objective = res.objective + ps.obj_const;
        if (p.num_free() > 0) {
            RVec ax(m_orig);
            DenseBlocks xr = res.x;
            for (int r = 0; r < m_orig; ++r) ax(r) = rf.rhs(r) - sdot(rf.rows[r], xr);
            sol.free_values = ps.u_recover * ax;
        } else {
            sol.free_values = RVec(0);
        }
    } else if (res.status == SdpStatus::Infeasible) {
        sol.dual = pad_to_orig(res.y);
        double bty = rf.rhs.dot(sol.dual);
        if (bty > 0) sol.dual /= bty;
        sol.certificate_margin = rf.rhs.dot(sol.dual);
        std::vector<CMat> acc;
        for (int b = 0; b < p.num_blocks(); ++b)
            acc.push_back(CMat::Zero(p.block_dim(b), p.block_dim(b)));
        for (int k = 0; k < p.num_constraints(); ++k)
            accumulate_adjoint(acc, p.constraints()[k].terms, -sol.dual(2 * k),
                               -sol.dual(2 * k + 1));
        sol.dual_slack = std::move(acc);
    } else if (res.status == SdpStatus::Unbounded) {
        for (int b = 0; b < p.num_blocks(); ++b)
            sol.blocks.push_back(complexify(res.x[b], p.block_dim(b)));
    }
    return sol;
}

bool verify_sdp_solution(const SdpProblem& p, const SdpSolution& s, const Tolerances& tol) {
    const int nb = p.num_blocks();
    auto adjoint_of_dual = [&](const RVec& y) {
        std::vector<CMat> acc;
        for (int b = 0; b < nb; ++b) acc.push_back(CMat::Zero(p.block_dim(b), p.block_dim(b)));
        for (int k = 0; k < p.num_constraints(); ++k)
            accumulate_adjoint(acc, p.constraints()[k].terms, y(2 * k), y(2 * k + 1));
        return acc;
    };
    auto free_adjoint_residual = [&](const RVec& y, const RVec& target) {
        // sum_k y_k * (free coeffs of row k) must equal target (F^T y = c_u)
        RVec out = RVec::Zero(p.num_free());
        for (int k = 0; k < p.num_constraints(); ++k)
            for (const SdpFreeTerm& t : p.constraints()[k].free_terms)
                out(t.index) += y(2 * k) * t.coeff.real() + y(2 * k + 1) * t.coeff.imag();
        return (out - target).norm();
    };

    if (s.status == SdpStatus::Optimal) {
        if (static_cast<int>(s.blocks.size()) != nb) return false;
        double scale = 1.0;
        for (const CMat& x : s.blocks) scale = std::max(scale, max_abs(x));
        for (const CMat& x : s.blocks) {
            if (max_abs(x - x.adjoint()) > 1e-9 * scale) return false;
            if (min_eigenvalue(HMat(x, 1e-9 * scale)) < -tol.eps_psd * scale) return false;
        }
        for (int k = 0; k < p.num_constraints(); ++k) {
            const SdpConstraint& c = p.constraints()[k];
            Complex v = eval_constraint(c, s.blocks, s.free_values);
            if (std::abs(v - c.rhs) > 100 * tol.eps_eq * (scale + std::abs(c.rhs))) return false;
        }
        // dual feasibility and gap
        std::vector<CMat> ay = adjoint_of_dual(s.dual);
        double dobj = 0.0;
        for (int k = 0; k < p.num_constraints(); ++k) {
            Complex rhs = p.constraints()[k].rhs;
            dobj += rhs.real() * s.dual(2 * k) + rhs.imag() * s.dual(2 * k + 1);
        }
        std::vector<CMat> cm;
        for (int b = 0; b < nb; ++b) cm.push_back(CMat::Zero(p.block_dim(b), p.block_dim(b)));
        accumulate_adjoint(cm, p.objective_terms(), 1.0, 0.0);
        double dscale = 1.0 + std::abs(s.objective);
        for (int b = 0; b < nb; ++b) {
            CMat z = cm[b] - ay[b];
            if (min_eigenvalue(HMat(z, 1e-7 * dscale)) < -100 * tol.eps_psd * dscale) return false;
        }
        RVec cu = RVec::Zero(p.num_free());
        for (const SdpFreeTerm& t : p.objective_free_terms()) cu(t.index) += t.coeff.real();
        if (free_adjoint_residual(s.dual, cu) > 1e-6 * dscale) return false;
        if (std::abs(s.objective - dobj) > 100 * tol.eps_sdp * dscale) return false;
        return true;
    }
    if (s.status == SdpStatus::Infeasible) {
        double bty = 0.0;
        for (int k = 0; k < p.num_constraints(); ++k) {
            Complex rhs = p.constraints()[k].rhs;
            bty += rhs.real() * s.dual(2 * k) + rhs.imag() * s.dual(2 * k + 1);
        }
        if (bty < 0.5) return false;
        double yn = 1.0 + s.dual.norm();
        std::vector<CMat> ay = adjoint_of_dual(s.dual);
        for (const CMat& a : ay)
            if (min_eigenvalue(HMat(-a, 1e-6 * yn)) < -1e-5 * yn) return false;
        if (free_adjoint_residual(s.dual, RVec::Zero(p.num_free())) > 1e-6 * yn) return false;
        return true;
    }
    return false;
}

}  // namespace ncc
