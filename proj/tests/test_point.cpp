#include "doctest.h"
#include "ncc/point.hpp"
#include "ncc/rng.hpp"

using namespace ncc;

namespace {
NcPoint random_point(Rng& rng, int d, int n, bool herm = true) {
    std::vector<CMat> mats;
    for (int j = 0; j < d; ++j) mats.push_back(herm ? rng.hermitian(n) : rng.cmatrix(n, n));
    return NcPoint(d, n, std::move(mats));
}
}  // namespace

TEST_CASE("validate rejects malformed points") {
    CHECK_THROWS_AS(NcPoint(2, 2, {CMat::Identity(2, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(NcPoint(1, 2, {CMat::Identity(3, 3)}), std::invalid_argument);
    CHECK_NOTHROW(NcPoint(1, 2, {CMat::Identity(2, 2)}));
}

TEST_CASE("direct sum stacks blocks and adds levels") {
    Rng rng(21);
    NcPoint a = random_point(rng, 2, 2), b = random_point(rng, 2, 3);
    NcPoint s = direct_sum({a, b});
    CHECK(s.level == 5);
    CHECK(approx_equal(CMat(s.mats[0].topLeftCorner(2, 2)), a.mats[0], 1e-14));
    CHECK(approx_equal(CMat(s.mats[1].bottomRightCorner(3, 3)), b.mats[1], 1e-14));
    CHECK(max_abs(s.mats[0].topRightCorner(2, 3)) == 0.0);
}

TEST_CASE("compression by an isometry composes with direct sums") {
    Rng rng(22);
    NcPoint a = random_point(rng, 2, 3);
    CMat v = rng.isometry(3, 2);
    NcPoint c = compress(a, v);
    CHECK(c.level == 2);
    CHECK(approx_equal(c.mats[0], CMat(v.adjoint() * a.mats[0] * v), 1e-13));
}

TEST_CASE("nc combination with isometric summing weights reproduces a compression") {
    Rng rng(23);
    NcPoint a = random_point(rng, 2, 3), b = random_point(rng, 2, 2);
    // alpha_1* alpha_1 + alpha_2* alpha_2 = I via columns of a 5x2 isometry
    CMat v = rng.isometry(5, 2);
    CMat a1 = v.topRows(3), a2 = v.bottomRows(2);
    NcPoint comb = nc_combination({a, b}, {a1, a2});
    NcPoint viaSum = compress(direct_sum({a, b}), v);
    CHECK(approx_equal(comb, viaSum, 1e-12));
}

TEST_CASE("nc combination rejects weights that do not sum to identity") {
    Rng rng(24);
    NcPoint a = random_point(rng, 1, 2);
    CMat w = 0.9 * CMat::Identity(2, 2);
    CHECK_THROWS_AS(nc_combination({a}, {w}), std::invalid_argument);
}

TEST_CASE("unitary conjugation preserves hermiticity and spectra") {
    Rng rng(25);
    NcPoint a = random_point(rng, 2, 3);
    CMat u = rng.unitary(3);
    NcPoint c = unitary_conjugate(a, u);
    CHECK(c.hermitian(1e-10));
    Eigen::SelfAdjointEigenSolver<CMat> e1(a.mats[0]), e2(c.mats[0]);
    CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scalar points embed at level one") {
    NcPoint p = NcPoint::scalar({Complex(0.5, 0), Complex(-1, 0)});
    CHECK(p.d == 2);
    CHECK(p.level == 1);
    CHECK(p.mats[1](0, 0) == Complex(-1, 0));
}
