#include "ncc/representation.hpp"

#include "ncc/dilation.hpp"

#include <cmath>

namespace ncc {

namespace {

/// leaves of the recursive eigenspace split: (summand, embedding into x)
struct Leaf {
    NcPoint point;
    CMat embedding;
};

void split_recursive(const NcPoint& x, const CMat& embed, Rng& rng, const Tolerances& tol,
                     bool* clean, std::vector<Leaf>& out) {
    const int p = x.level;
    std::vector<CMat> basis = commutant_basis(x.mats, tol);
    if (basis.size() <= 1) {
        out.push_back({x, embed});
        return;
    }
    // a random Hermitian commutant element; its eigenspaces reduce x
    for (int attempt = 0; attempt < 5; ++attempt) {
        CMat c = CMat::Zero(p, p);
        for (const CMat& b : basis) c += rng.gaussian() * b + rng.gaussian() * (Complex(0, 1) * b);
        c = hermitian_part(c);
        Eigen::SelfAdjointEigenSolver<CMat> es(c);
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        // cluster eigenvalues separated by more than the rank tolerance
        std::vector<int> starts{0};
        for (int i = 1; i < p; ++i)
            if (es.eigenvalues()(i) - es.eigenvalues()(i - 1) > 1e3 * tol.eps_rank * scale)
                starts.push_back(i);
        if (starts.size() < 2) {
            if (attempt == 4 && clean) *clean = false;  // coarse split accepted
            continue;
        }
        starts.push_back(p);
        for (std::size_t s = 0; s + 1 < starts.size(); ++s) {
            const int m = starts[s + 1] - starts[s];
            CMat v = es.eigenvectors().middleCols(starts[s], m);
            std::vector<CMat> mats;
            for (const CMat& xj : x.mats) mats.push_back(v.adjoint() * xj * v);
            split_recursive(NcPoint(x.d, m, std::move(mats)), embed * v, rng, tol, clean, out);
        }
        return;
    }
    out.push_back({x, embed});
}

/// unitary u with u* a u = b for irreducible points a, b; nullopt when the
/// intertwiner space is trivial (inequivalent summands)
std::optional<CMat> intertwining_unitary(const NcPoint& a, const NcPoint& b,
                                         const Tolerances& tol) {
    if (a.level != b.level) return std::nullopt;
    const int m = a.level;
    // S a_j = b_j S and S a_j* = b_j* S, vectorized column-major
    CMat sys(2 * a.d * m * m, m * m);
    const CMat id = CMat::Identity(m, m);
    int r = 0;
    for (int j = 0; j < a.d; ++j) {
        sys.middleRows(r, m * m) = kron(a.mats[j].transpose(), id) - kron(id, b.mats[j]);
        r += m * m;
        sys.middleRows(r, m * m) =
            kron(a.mats[j].adjoint().transpose(), id) - kron(id, b.mats[j].adjoint());
        r += m * m;
    }
    CMat ker = kernel_basis(sys, std::max(tol.eps_rank, 1e-10));
    if (ker.cols() == 0) return std::nullopt;
    CMat s = Eigen::Map<const CMat>(ker.col(0).data(), m, m);
    // for irreducibles S* S is a positive scalar (Schur)
    const double c = (s.adjoint() * s).real().trace() / m;
    if (c < tol.eps_rank) return std::nullopt;
    return CMat(s / std::sqrt(c));
}

}  // namespace

std::vector<IrreducibleSummand> decompose_irreducible(const NcPoint& x, const Tolerances& tol,
                                                      std::uint64_t seed, bool* clean_split) {
    tol.validate();
    if (clean_split) *clean_split = true;
    Rng rng(seed);
    std::vector<Leaf> leaves;
    split_recursive(x, CMat::Identity(x.level, x.level), rng, tol, clean_split, leaves);

    std::vector<IrreducibleSummand> out;
    for (Leaf& leaf : leaves) {
        bool merged = false;
        for (IrreducibleSummand& cls : out) {
            // S y S* rotations let every copy embed the class representative:
            // (V u)* x (V u) = u* y u = representative
            if (auto u = intertwining_unitary(leaf.point, cls.point, tol)) {
                cls.isometries.push_back(leaf.embedding * u->adjoint());
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back({std::move(leaf.point), {std::move(leaf.embedding)}});
    }
    return out;
}

CMat integrate(const NcMeasure& m, const FreePoly& f, const Tolerances& tol) {
    const int n = m.target_level;
    CMat unit_sum = CMat::Zero(n, n);
    for (const NcMeasureAtom& a : m.atoms) unit_sum += a.weight.adjoint() * a.weight;
    if (max_abs(unit_sum - CMat::Identity(n, n)) > tol.eps_eq)
        throw std::invalid_argument("integrate: weights do not sum to the identity");
    CMat out = CMat::Zero(n, n);
    for (const NcMeasureAtom& a : m.atoms)
        out += a.weight.adjoint() * eval(f, a.point) * a.weight;
    return out;
}

DecompositionReport represent_on_extreme(const NcSet& k, const UcpRep& mu, int max_steps,
                                         const Tolerances& tol) {
    tol.validate();
    DecompositionReport rep;
    DilateResult dr = dilate_to_maximal(k, mu.point, max_steps, tol);
    if (!dr.maximal) {
        rep.capped = true;
        return rep;
    }
    std::vector<IrreducibleSummand> summands = decompose_irreducible(dr.point, tol);

    rep.measure.target_level = mu.target_level;
    const CMat lift = dr.embedding * mu.isometry;  // maximal level -> target
    rep.all_atoms_irreducible = true;
    rep.all_atoms_maximal = true;
    for (const IrreducibleSummand& s : summands) {
        ClassifyReport cls = classify_point(k, s.point, tol);
        rep.all_atoms_irreducible &= cls.irreducible;
        rep.all_atoms_maximal &= cls.maximal;
        for (const CMat& v : s.isometries)
            rep.measure.atoms.push_back({s.point, v.adjoint() * lift});
    }
    rep.supported_on_extreme = rep.all_atoms_irreducible && rep.all_atoms_maximal;
    return rep;
}

}  // namespace ncc
