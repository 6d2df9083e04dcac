#include "ncc/envelope.hpp"

#include <cmath>

namespace ncc {

namespace {

struct Candidate {
    CMat value;
    int size = 0;
};

CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

CMat scalar_point_mat(double t) { return CMat::Constant(1, 1, Complex(t, 0)); }

/// Atomic measure on the line recovered from scalar moments m_0..m_{2R} by
/// the Hankel shift: atoms are the eigenvalues of the compressed shift
/// operator, weights solve the Vandermonde system in least squares.
std::optional<Candidate> extract_atoms(const NcSet& k, const FreePoly& f,
                                       const std::vector<double>& m, double barycenter,
                                       const Tolerances& tol) {
    const int r_cap = (static_cast<int>(m.size()) - 1) / 2;  // Hankel size
    if (r_cap < 1) return std::nullopt;
    RMat h0(r_cap, r_cap), h1(r_cap, r_cap);
    for (int i = 0; i < r_cap; ++i)
        for (int j = 0; j < r_cap; ++j) {
            h0(i, j) = m[i + j];
            h1(i, j) = m[i + j + 1];
        }
    Eigen::SelfAdjointEigenSolver<RMat> es(h0);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double gate = std::max(1e-6, 1e-6 * lmax);
    std::vector<int> keep;
    for (int i = 0; i < r_cap; ++i)
        if (es.eigenvalues()(i) > gate) keep.push_back(i);
    const int r = static_cast<int>(keep.size());
    if (r == 0) return std::nullopt;
    RMat u(r_cap, r), lam_isqrt = RMat::Zero(r, r);
    for (int i = 0; i < r; ++i) {
        u.col(i) = es.eigenvectors().col(keep[i]);
        lam_isqrt(i, i) = 1.0 / std::sqrt(es.eigenvalues()(keep[i]));
    }
    RMat shift = lam_isqrt * u.transpose() * h1 * u * lam_isqrt;
    Eigen::SelfAdjointEigenSolver<RMat> as(0.5 * (shift + shift.transpose()));

    // pull atoms that land just outside the set back toward the barycenter
    std::vector<double> atoms;
    for (int i = 0; i < r; ++i) {
        double t = as.eigenvalues()(i);
        bool ok = false;
        for (double s : {0.0, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3}) {
            double tc = barycenter + (t - barycenter) * (1.0 - s);
            if (membership(k, NcPoint(1, 1, {scalar_point_mat(tc)}), tol).inside) {
                t = tc;
                ok = true;
                break;
            }
        }
        if (!ok) return std::nullopt;
        atoms.push_back(t);
    }

    // fit weights only against the Hankel-constrained moments m_0..m_{2R-1};
    // higher moments appear in few psd entries and carry solver slack
    const int rows = 2 * r_cap;
    RMat vand(rows, r);
    RVec rhs(rows);
    for (int kk = 0; kk < rows; ++kk) {
        rhs(kk) = m[kk];
        for (int i = 0; i < r; ++i) vand(kk, i) = std::pow(atoms[i], kk);
    }
    RVec w = vand.colPivHouseholderQr().solve(rhs);
    if ((vand * w - rhs).norm() > 1e-5) return std::nullopt;
    double sum = 0, mean = 0;
    for (int i = 0; i < r; ++i) {
        if (w(i) < -1e-6) return std::nullopt;
        w(i) = std::max(w(i), 0.0);
        sum += w(i);
        mean += w(i) * atoms[i];
    }
    if (std::abs(sum - 1.0) > 1e-5 || std::abs(mean - barycenter) > 1e-5) return std::nullopt;

    Complex val = 0;
    for (int i = 0; i < r; ++i)
        val += w(i) * eval(f, NcPoint(1, 1, {scalar_point_mat(atoms[i])}))(0, 0);
    Candidate c;
    c.value = CMat::Constant(1, 1, Complex(val.real(), 0));
    c.size = r;
    return c;
}

}  // namespace

EnvelopeResult convex_envelope(const NcSet& k, const FreePoly& f, const NcPoint& x,
                               int relaxation_level, int dilation_budget,
                               std::uint64_t seed, const Tolerances& tol) {
    tol.validate();
    if (f.d != k.d() || x.d != k.d()) throw std::invalid_argument("envelope: letter count");
    if (!is_selfadjoint(f, k.hermitian_points()))
        throw std::invalid_argument("envelope: f must be self-adjoint");
    if (f.degree() > 2 * relaxation_level)
        throw std::invalid_argument("envelope: deg f exceeds 2*relaxation_level");
    const int n = x.level;

    MomentRelaxation rel(k, n, relaxation_level);
    rel.constrain_barycenter(x);

    auto solve_frame = [&](const CVec& xi) {
        rel.set_objective(f, xi);
        // the optimal face is often degenerate; retry at looser gap tolerance
        // before giving up (the bound then carries the looser accuracy)
        SdpSolution s;
        for (double factor : {1.0, 10.0, 100.0}) {
            Tolerances t = tol;
            t.eps_sdp *= factor;
            s = solve_sdp(rel.problem(), t);
            if (s.status == SdpStatus::Infeasible)
                throw std::invalid_argument(
                    "envelope: barycenter-constrained moment SDP infeasible (x not a member)");
            if (s.status == SdpStatus::Optimal) return s;
        }
        throw std::runtime_error("envelope: moment SDP did not converge");
    };

    // diagonal scalarizations first, then pair frames for the off-diagonals
    RVec diag(n);
    SdpSolution first_sol;
    for (int a = 0; a < n; ++a) {
        CVec xi = CVec::Zero(n);
        xi(a) = 1;
        SdpSolution s = solve_frame(xi);
        diag(a) = s.objective;
        if (a == 0) first_sol = s;
    }
    CMat lower(n, n);
    for (int a = 0; a < n; ++a) lower(a, a) = diag(a);
    const double isq = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            CVec xr = CVec::Zero(n), xim = CVec::Zero(n);
            xr(a) = isq;
            xr(b) = isq;
            xim(a) = isq;
            xim(b) = Complex(0, isq);
            const double avg = 0.5 * (diag(a) + diag(b));
            double re = solve_frame(xr).objective - avg;
            double im = avg - solve_frame(xim).objective;
            lower(a, b) = Complex(re, im);
            lower(b, a) = Complex(re, -im);
        }

    std::vector<Candidate> cands;
    cands.push_back({hermitize(eval(f, x)), n});

    if (k.d() == 1 && n == 1 && k.hermitian_points()) {
        std::vector<double> m;
        for (int kk = 0; kk <= 2 * relaxation_level; ++kk)
            m.push_back(rel.read(first_sol, Word(kk, 0))(0, 0).real());
        if (auto c = extract_atoms(k, f, m, x.mats[0](0, 0).real(), tol)) cands.push_back(*c);
    }

    auto add_dilation_value = [&](const NcPoint& y) {
        CMat alpha = CMat::Identity(y.level, n);
        cands.push_back({hermitize(alpha.adjoint() * eval(f, y) * alpha), y.level});
    };

    // maximalization path: every partial step is a representing map
    {
        NcPoint y = x;
        for (int step = 0; step < 4; ++step) {
            auto w = find_one_step_dilation(k, y, tol);
            if (!w) break;
            y = w->parent;
            add_dilation_value(y);
        }
    }

    // random bordered dilation chains
    Rng rng(seed);
    for (int b = 0; b < dilation_budget; ++b) {
        NcPoint y = x;
        const int len = 1 + static_cast<int>(rng.index(2));
        for (int step = 0; step < len; ++step) {
            auto w = find_random_dilation(k, y, rng, tol);
            if (!w) break;
            y = w->parent;
        }
        if (y.level > n) add_dilation_value(y);
    }

    int best = 0;
    double best_tr = cands[0].value.real().trace();
    for (std::size_t i = 1; i < cands.size(); ++i) {
        double tr = cands[i].value.real().trace();
        if (tr < best_tr - 1e-12) {
            best_tr = tr;
            best = static_cast<int>(i);
        }
    }

    EnvelopeResult res;
    res.point = x;
    res.lower_bound = lower;
    res.upper_bound = cands[best].value;
    res.relaxation_level = relaxation_level;
    res.dilation_size = cands[best].size;
    return res;
}

}  // namespace ncc
