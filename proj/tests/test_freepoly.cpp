#include "doctest.h"
#include "ncc/freepoly.hpp"
#include "ncc/ncset.hpp"

using namespace ncc;

namespace {
FreePoly xpow(int k) {
    FreePoly f = FreePoly::zero(1);
    f.terms[Word(k, 0)] = 1.0;
    return f;
}
}  // namespace

TEST_CASE("eval: unit, powers, and direct sums") {
    Rng rng(71);
    NcPoint x(1, 3, {hermitian_part(rng.cmatrix(3, 3))});
    CHECK(max_abs(eval(FreePoly::unit(1), x) - CMat::Identity(3, 3)) == 0.0);
    CHECK(max_abs(eval(xpow(2), x) - x.mats[0] * x.mats[0]) < 1e-12);

    for (int trial = 0; trial < 10; ++trial) {
        FreePoly f = FreePoly::zero(2);
        for (int t = 0; t < 5; ++t) {
            Word w;
            int len = static_cast<int>(rng.uniform() * 5);
            for (int i = 0; i < len; ++i) {
                int l = static_cast<int>(rng.uniform() * 2);
                w.push_back(rng.uniform() < 0.5 ? l : ~l);
            }
            f.terms[w] += Complex(rng.gaussian(), rng.gaussian());
        }
        NcPoint a(2, 2, {rng.cmatrix(2, 2), rng.cmatrix(2, 2)});
        NcPoint b(2, 3, {rng.cmatrix(3, 3), rng.cmatrix(3, 3)});
        NcPoint ab = direct_sum({a, b});
        CMat want = CMat::Zero(5, 5);
        want.topLeftCorner(2, 2) = eval(f, a);
        want.bottomRightCorner(3, 3) = eval(f, b);
        CHECK(max_abs(eval(f, ab) - want) < 1e-10);
        // unitary equivariance
        CMat u = rng.unitary(2);
        CHECK(max_abs(eval(f, unitary_conjugate(a, u)) - u * eval(f, a) * u.adjoint()) < 1e-10);
        // adjoint matches the matrix adjoint
        CHECK(max_abs(eval(adjoint(f), a) - eval(f, a).adjoint()) < 1e-10);
    }
}

TEST_CASE("adjoint and multiply word calculus") {
    FreePoly x = FreePoly::letter(1, 0);
    FreePoly xs = adjoint(x);
    CHECK(xs.terms.count({~0}) == 1);
    CHECK(is_selfadjoint(x + xs));
    CHECK(!is_selfadjoint(multiply(x, x)));
    CHECK(is_selfadjoint(multiply(x, x), /*hermitian_letters=*/true));

    // x x* at an isometry-like matrix
    Rng rng(72);
    CMat m = rng.cmatrix(3, 3);
    NcPoint p(1, 3, {m});
    CHECK(max_abs(eval(multiply(x, xs), p) - m * m.adjoint()) < 1e-12);
    CHECK(multiply(x, xs).degree() == 2);
}

TEST_CASE("h_t evaluation and truncation") {
    CMat x = CMat::Zero(2, 2);
    x(0, 0) = 0.3;
    x(1, 1) = -0.4;
    CHECK(max_abs(h_t_eval(0.0, x) - x * x) < 1e-14);
    CHECK(max_abs(h_t_eval(0.5, CMat::Zero(2, 2))) == 0.0);
    // scalar check: h_t(a) = a^2 / (1 - t a)
    CMat s = CMat::Constant(1, 1, 0.3);
    CHECK(std::abs(h_t_eval(0.5, s)(0, 0).real() - 0.09 / 0.85) < 1e-14);
    CHECK_THROWS_AS(h_t_eval(1.0, CMat::Identity(1, 1)), std::invalid_argument);

    FreePoly tr = h_t_truncation(0.5, 8);
    CHECK(tr.degree() == 10);
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        CMat m = hermitian_part(rng.cmatrix(3, 3));
        m *= 0.5 * rng.uniform() / m.jacobiSvd().singularValues()(0);
        CHECK(max_abs(eval(tr, NcPoint(1, 3, {m})) - h_t_eval(0.5, m)) < 1e-6);
    }
}

TEST_CASE("x^2 and affine polynomials test convex; so do negated affines") {
    Tolerances tol;
    NcSet k = interval_set(-1, 1);
    CHECK(test_nc_convexity(xpow(2), k, 3, 20, 7, tol).convex);

    FreePoly aff = FreePoly::unit(1) + Complex(2, 0) * FreePoly::letter(1, 0);
    CHECK(test_nc_convexity(aff, k, 3, 20, 7, tol).convex);
    CHECK(test_nc_convexity(Complex(-1, 0) * aff, k, 3, 20, 7, tol).convex);
}

TEST_CASE("x^4 fails nc convexity at level 2 and the frozen witness certifies it") {
    Tolerances tol;
    ConvexityVerdict v = test_nc_convexity(xpow(4), interval_set(-2, 2), 2, 40, 7, tol);
    CHECK(!v.convex);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->level == 2);
    CHECK(v.witness->gap > tol.eps_psd);

    // frozen 2x2 midpoint violation, kept independent of the random search
    CMat x(2, 2), y(2, 2);
    x << Complex(-0.125, 0), Complex(0.125, -0.25), Complex(0.125, 0.25), Complex(0.125, 0);
    y << Complex(0.5, 0), Complex(-0.25, -0.125), Complex(-0.25, 0.125), Complex(0.25, 0);
    CMat z = 0.5 * (x + y);
    auto pow4 = [](const CMat& m) { return (m * m * m * m).eval(); };
    CMat slack = 0.5 * pow4(x) + 0.5 * pow4(y) - pow4(z);
    CHECK(min_eigenvalue(HMat(slack, 1e-9)) < -2e-4);
}

TEST_CASE("h_t truncation passes convexity on the half interval") {
    // the degree-8 truncation tail is ~1e-6 on ||x|| <= 1/2, so the
    // counterexample gate has to sit above that noise floor
    Tolerances tol;
    tol.eps_psd = 1e-6;
    FreePoly tr = h_t_truncation(0.5, 8);
    ConvexityVerdict v = test_nc_convexity(tr, interval_set(-0.5, 0.5), 3, 25, 7, tol);
    CHECK(v.convex);
    CHECK(v.level_checked == 3);
}

TEST_CASE("convexity verdicts agree with scalar midpoint tests on diagonals") {
    Tolerances tol;
    Rng rng(74);
    // diagonal (commuting) samples: x^4 satisfies the scalar inequality even
    // though it fails nc convexity, so no diagonal witness should appear
    NcSet k = interval_set(-2, 2);
    FreePoly f = xpow(4);
    for (int trial = 0; trial < 30; ++trial) {
        CMat x = CMat::Zero(2, 2), y = CMat::Zero(2, 2);
        for (int i = 0; i < 2; ++i) {
            x(i, i) = 4 * rng.uniform() - 2;
            y(i, i) = 4 * rng.uniform() - 2;
        }
        double lam = rng.uniform();
        NcPoint px(1, 2, {x}), py(1, 2, {y}), pz(1, 2, {(lam * x + (1 - lam) * y).eval()});
        CMat slack = lam * eval(f, px) + (1 - lam) * eval(f, py) - eval(f, pz);
        CHECK(min_eigenvalue(HMat(slack, 1e-9)) > -tol.eps_psd);
    }
}

TEST_CASE("test_nc_convexity rejects non-self-adjoint input") {
    Tolerances tol;
    CHECK_THROWS_AS(
        test_nc_convexity(Complex(0, 1) * xpow(2), interval_set(-1, 1), 2, 5, 7, tol),
        std::invalid_argument);
}
