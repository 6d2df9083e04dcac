#include "doctest.h"
#include "ncc/dilation.hpp"
#include "ncc/ncset.hpp"

using namespace ncc;

namespace {
NcPoint herm1(double v) { return NcPoint::scalar({Complex(v, 0)}); }

bool compresses_back(const NcSet& k, const NcPoint& x, const DilationWitness& w,
                     const Tolerances& tol) {
    if (!membership(k, w.parent, tol).inside) return false;
    NcPoint back = compress(w.parent, w.embedding);
    for (int j = 0; j < x.d; ++j)
        if (max_abs(back.mats[j] - x.mats[j]) > 1e-6) return false;
    return true;
}
}  // namespace

TEST_CASE("interior interval point has a nontrivial one-step dilation") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    auto w = find_one_step_dilation(k, herm1(0), tol);
    REQUIRE(w.has_value());
    CHECK(w->nontrivial_flag);
    CHECK(w->coupling_norm > 0.1);
    CHECK(compresses_back(k, herm1(0), *w, tol));
    // x = 0 dilates to a symmetry: the parent has spectrum near {-1, 1}
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(w->parent.mats[0]));
    CHECK(es.eigenvalues()(0) < -0.9);
    CHECK(es.eigenvalues()(1) > 0.9);
}

TEST_CASE("interval endpoints are maximal") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    CHECK(is_maximal(k, herm1(1), tol));
    CHECK(is_maximal(k, herm1(-1), tol));
    CHECK(!is_maximal(k, herm1(0.3), tol));
}

TEST_CASE("diagonal of both endpoints is maximal but reducible") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    CMat x = CMat::Zero(2, 2);
    x(0, 0) = -1;
    x(1, 1) = 1;
    NcPoint p(1, 2, {x});
    ClassifyReport r = classify_point(k, p, tol);
    CHECK(r.maximal);
    CHECK(!r.irreducible);
    CHECK(!r.nc_extreme);
    CHECK(r.euclidean_extreme_at_level);
    REQUIRE(r.commutant_witness.has_value());
    // the witness commutes with x and is not scalar
    CHECK(max_abs(*r.commutant_witness * x - x * *r.commutant_witness) < 1e-7);
}

TEST_CASE("interval endpoint at level 1 is nc extreme") {
    Tolerances tol;
    ClassifyReport r = classify_point(interval_set(-1, 1), herm1(1), tol);
    CHECK(r.maximal);
    CHECK(r.irreducible);
    CHECK(r.nc_extreme);
    CHECK(r.euclidean_extreme_at_level);
}

TEST_CASE("interior points are euclidean perturbable and the perturbation stays inside") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    ClassifyReport r = classify_point(k, herm1(0.2), tol);
    CHECK(!r.euclidean_extreme_at_level);
    REQUIRE(r.perturbation.has_value());
    const NcPoint& h = *r.perturbation;
    NcPoint plus = herm1(0.2), minus = herm1(0.2);
    plus.mats[0] += h.mats[0];
    minus.mats[0] -= h.mats[0];
    CHECK(membership(k, plus, tol).inside);
    CHECK(membership(k, minus, tol).inside);
}

TEST_CASE("perturbation search works along the boundary face") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    // diag(1, 0): pinned at the endpoint in one cell, movable in the other
    CMat x = CMat::Zero(2, 2);
    x(0, 0) = 1;
    ClassifyReport r = classify_point(k, NcPoint(1, 2, {x}), tol);
    CHECK(!r.euclidean_extreme_at_level);
    REQUIRE(r.perturbation.has_value());
    const CMat& h = r.perturbation->mats[0];
    CHECK(std::abs(h(1, 1)) > 1e-4);        // moves the free cell
    CHECK(std::abs(h(0, 0)) < 1e-5);        // cannot move the pinned one
    CHECK(membership(k, NcPoint(1, 2, {(x + h).eval()}), tol).inside);
    CHECK(membership(k, NcPoint(1, 2, {(x - h).eval()}), tol).inside);
}

TEST_CASE("classification is invariant under unitary conjugation") {
    Tolerances tol;
    NcSet k = row_ball_set(2);
    Rng rng(61);
    NcPoint x = sample_member(k, 2, rng, 0.8, tol);
    NcPoint ux = unitary_conjugate(x, rng.unitary(2));
    ClassifyReport a = classify_point(k, x, tol);
    ClassifyReport b = classify_point(k, ux, tol);
    CHECK(a.maximal == b.maximal);
    CHECK(a.irreducible == b.irreducible);
    CHECK(a.euclidean_extreme_at_level == b.euclidean_extreme_at_level);
}

TEST_CASE("row ball coisometry boundary point still dilates") {
    Tolerances tol;
    NcSet k = row_ball_set(2);
    double r = 1.0 / std::sqrt(2.0);
    NcPoint x = NcPoint::scalar({r, r});
    auto w = find_one_step_dilation(k, x, tol);
    REQUIRE(w.has_value());
    CHECK(compresses_back(k, x, *w, tol));
}

TEST_CASE("dilate_to_maximal on the interval terminates at a symmetry") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    DilateResult res = dilate_to_maximal(k, herm1(0), 8, tol);
    CHECK(res.maximal);
    CHECK(res.steps >= 1);
    // compress back to the start
    NcPoint back = compress(res.point, res.embedding);
    CHECK(max_abs(back.mats[0]) < 1e-6);
    // a maximal interval point has spectrum in {-1, 1}
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(res.point.mats[0]));
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        CHECK(std::abs(std::abs(es.eigenvalues()(i)) - 1.0) < 1e-5);
}

TEST_CASE("dilate_to_maximal on the row ball caps out") {
    Tolerances tol;
    NcSet k = row_ball_set(2);
    DilateResult res = dilate_to_maximal(k, NcPoint::scalar({0.0, 0.0}), 3, tol);
    CHECK(!res.maximal);
    CHECK(res.steps == 3);
    CHECK(membership(k, res.point, tol).inside);
}

TEST_CASE("one-step search finds dilations that need structure, not just scaling") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    // x = diag(0.5, -0.5) dilates nontrivially (e.g. couple each cell to +-1)
    CMat x = CMat::Zero(2, 2);
    x(0, 0) = 0.5;
    x(1, 1) = -0.5;
    NcPoint p(1, 2, {x});
    auto w = find_one_step_dilation(k, p, tol);
    REQUIRE(w.has_value());
    CHECK(compresses_back(k, p, *w, tol));
}

TEST_CASE("summands of a maximal point are maximal") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    DilateResult res = dilate_to_maximal(k, herm1(0.4), 8, tol);
    REQUIRE(res.maximal);
    CHECK(is_maximal(k, res.point, tol));
}

TEST_CASE("krein-milman: interval points are mixtures of the endpoints") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    std::vector<NcPoint> ext = {herm1(-1), herm1(1)};

    KreinMilmanResult mid = krein_milman_check(k, herm1(0), ext, tol);
    REQUIRE(mid.representable);
    // the weights reproduce the barycenter and sum to the identity
    CMat total = CMat::Zero(1, 1);
    CMat bary = CMat::Zero(1, 1);
    double e[2] = {-1.0, 1.0};
    for (int i = 0; i < 2; ++i)
        for (const CMat& a : mid.weights[i]) {
            total += a.adjoint() * a;
            bary += e[i] * (a.adjoint() * a);
        }
    CHECK(max_abs(total - CMat::Identity(1, 1)) < 1e-6);
    CHECK(max_abs(bary) < 1e-6);

    // level 2: a coupled member of the hull of the endpoints
    CMat y(2, 2);
    y << 0.2, 0.3, 0.3, -0.1;
    KreinMilmanResult lv2 = krein_milman_check(k, NcPoint(1, 2, {y}), ext, tol);
    CHECK(lv2.representable);
}

TEST_CASE("krein-milman rejects an insufficient candidate list") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    KreinMilmanResult r = krein_milman_check(k, herm1(1), {herm1(-1)}, tol);
    CHECK(!r.representable);
    CHECK(r.gap > 0.1);
}

TEST_CASE("irreducibility detects block structure") {
    Tolerances tol;
    CMat x = CMat::Zero(2, 2);
    x(0, 0) = 1;
    x(1, 1) = -1;
    CHECK(!is_irreducible(NcPoint(1, 2, {x}), tol));
    CMat sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    CHECK(is_irreducible(NcPoint(2, 2, {sx, sz}), tol));
}

TEST_CASE("random dilations are members that compress back to the input") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    Rng rng(7);
    NcPoint x = herm1(0.3);
    int nontrivial = 0;
    for (int t = 0; t < 5; ++t) {
        auto w = find_random_dilation(k, x, rng, tol);
        REQUIRE(w.has_value());
        CHECK(compresses_back(k, x, *w, tol));
        if (w->nontrivial_flag) ++nontrivial;
    }
    // the random border objective finds varied couplings most of the time
    CHECK(nontrivial >= 3);

    NcSet rb = row_ball_set(2);
    NcPoint y = NcPoint::scalar({Complex(0.3, 0), Complex(0.2, 0)});
    auto w = find_random_dilation(rb, y, rng, tol);
    REQUIRE(w.has_value());
    CHECK(compresses_back(rb, y, *w, tol));

    CHECK_THROWS_AS((void)find_random_dilation(k, herm1(2.0), rng, tol),
                    std::invalid_argument);
}
