#include "ncc/freepoly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ncc {

FreePoly FreePoly::zero(int d) {
    FreePoly f;
    f.d = d;
    return f;
}

FreePoly FreePoly::unit(int d) {
    FreePoly f;
    f.d = d;
    f.terms[{}] = Complex(1, 0);
    return f;
}

FreePoly FreePoly::letter(int d, int j, bool star) {
    if (j < 0 || j >= d) throw std::invalid_argument("FreePoly::letter: index out of range");
    FreePoly f;
    f.d = d;
    f.terms[{star ? ~j : j}] = Complex(1, 0);
    return f;
}

int FreePoly::degree() const {
    std::size_t deg = 0;
    for (const auto& [w, c] : terms)
        if (c != Complex(0, 0)) deg = std::max(deg, w.size());
    return static_cast<int>(deg);
}

void FreePoly::prune(double eps) {
    for (auto it = terms.begin(); it != terms.end();)
        it = std::abs(it->second) <= eps ? terms.erase(it) : std::next(it);
}

FreePoly& FreePoly::operator+=(const FreePoly& g) {
    if (d != g.d) throw std::invalid_argument("FreePoly: letter count mismatch");
    for (const auto& [w, c] : g.terms) terms[w] += c;
    prune();
    return *this;
}

FreePoly& FreePoly::operator-=(const FreePoly& g) { return *this += Complex(-1, 0) * g; }

FreePoly& FreePoly::operator*=(Complex c) {
    for (auto& [w, v] : terms) v *= c;
    prune();
    return *this;
}

FreePoly operator+(FreePoly f, const FreePoly& g) { return f += g; }
FreePoly operator-(FreePoly f, const FreePoly& g) { return f -= g; }
FreePoly operator*(Complex c, FreePoly f) { return f *= c; }

FreePoly adjoint(const FreePoly& f) {
    FreePoly out;
    out.d = f.d;
    for (const auto& [w, c] : f.terms) {
        Word rw(w.rbegin(), w.rend());
        for (int& l : rw) l = ~l;  // star flip; ~ is an involution
        out.terms[rw] += std::conj(c);
    }
    out.prune();
    return out;
}

FreePoly multiply(const FreePoly& f, const FreePoly& g) {
    if (f.d != g.d) throw std::invalid_argument("FreePoly: letter count mismatch");
    FreePoly out;
    out.d = f.d;
    for (const auto& [wf, cf] : f.terms)
        for (const auto& [wg, cg] : g.terms) {
            Word w = wf;
            w.insert(w.end(), wg.begin(), wg.end());
            out.terms[w] += cf * cg;
        }
    out.prune();
    return out;
}

bool is_selfadjoint(const FreePoly& f, bool hermitian_letters, double eps) {
    // on Hermitian points x_j* = x_j, so compare with stars stripped
    auto canonical = [&](const FreePoly& p) {
        if (!hermitian_letters) return p;
        FreePoly out = FreePoly::zero(p.d);
        for (const auto& [w, c] : p.terms) {
            Word sw = w;
            for (int& l : sw)
                if (l < 0) l = ~l;
            out.terms[sw] += c;
        }
        return out;
    };
    FreePoly diff = canonical(f) - canonical(adjoint(f));
    for (const auto& [w, c] : diff.terms)
        if (std::abs(c) > eps) return false;
    return true;
}

CMat eval(const FreePoly& f, const NcPoint& x) {
    if (f.d != x.d) throw std::invalid_argument("eval: letter count mismatch");
    const int n = x.level;
    CMat out = CMat::Zero(n, n);
    for (const auto& [w, c] : f.terms) {
        if (c == Complex(0, 0)) continue;
        CMat m = CMat::Identity(n, n);
        for (int l : w) m = (l >= 0 ? (m * x.mats[l]).eval() : (m * x.mats[~l].adjoint()).eval());
        out += c * m;
    }
    return out;
}

CMat h_t_eval(double t, const CMat& x) {
    const int n = static_cast<int>(x.rows());
    CMat den = CMat::Identity(n, n) - t * x;
    Eigen::FullPivLU<CMat> lu(den);
    if (!lu.isInvertible()) throw std::invalid_argument("h_t: 1 - t x is singular");
    return x * x * lu.inverse();
}

FreePoly h_t_truncation(double t, int cap) {
    FreePoly f = FreePoly::zero(1);
    double tk = 1.0;
    for (int k = 0; k <= cap; ++k) {
        f.terms[Word(k + 2, 0)] = tk;
        tk *= t;
    }
    f.prune();
    return f;
}

namespace {

// most negative eigenvalue of the midpoint slack at (x, y, lambda)
double midpoint_slack(const FreePoly& f, const NcPoint& x, const NcPoint& y, double lam) {
    NcPoint z = x;
    for (int j = 0; j < x.d; ++j) z.mats[j] = lam * x.mats[j] + (1 - lam) * y.mats[j];
    CMat slack = lam * eval(f, x) + (1 - lam) * eval(f, y) - eval(f, z);
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(slack));
    return es.eigenvalues()(0);
}

}  // namespace

ConvexityVerdict test_nc_convexity(const FreePoly& f, const NcSet& k, int max_level,
                                   int samples, std::uint64_t seed, const Tolerances& tol) {
    if (!is_selfadjoint(f, k.hermitian_points(), 1e-10))
        throw std::invalid_argument("test_nc_convexity: f is not self-adjoint");
    Rng rng(seed);
    ConvexityVerdict v;
    for (int level = 1; level <= max_level; ++level) {
        for (int s = 0; s < samples; ++s) {
            // boundary-biased sampling: convexity fails first at the boundary
            double bx = (s % 3 == 0) ? 1.0 : rng.uniform();
            double by = (s % 3 == 1) ? 1.0 : rng.uniform();
            NcPoint x = sample_member(k, level, rng, bx, tol);
            NcPoint y = sample_member(k, level, rng, by, tol);
            for (int li = 0; li < 9; ++li) {
                double lam = li == 0 ? 0.5 : rng.uniform();
                double slack = midpoint_slack(f, x, y, lam);
                if (slack < -tol.eps_psd) {
                    v.convex = false;
                    v.level_checked = level;
                    v.witness = ConvexityWitness{x, y, lam, -slack, level};
                    return v;
                }
            }
            // compression criterion f(a* x a) <= a* f(x) a
            if (level >= 2) {
                int p = 1 + static_cast<int>(rng.uniform() * (level - 1));
                p = std::min(p, level - 1);
                CMat a = rng.isometry(level, p);
                CMat fx = eval(f, x);
                CMat fc = eval(f, compress(x, a));
                CMat slack = a.adjoint() * fx * a - fc;
                Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(slack));
                if (es.eigenvalues()(0) < -tol.eps_psd) {
                    v.convex = false;
                    v.level_checked = level;
                    v.witness = ConvexityWitness{x, compress(x, a), 1.0,
                                                 -es.eigenvalues()(0), level};
                    return v;
                }
            }
        }
    }
    v.convex = true;
    v.level_checked = max_level;
    return v;
}

}  // namespace ncc
