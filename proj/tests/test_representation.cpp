#include "doctest.h"
#include "ncc/representation.hpp"

#include "ncc/dilation.hpp"

using namespace ncc;

namespace {

FreePoly xpow(int k) {
    FreePoly x = FreePoly::letter(1, 0);
    FreePoly f = FreePoly::unit(1);
    for (int i = 0; i < k; ++i) f = multiply(f, x);
    return f;
}

}  // namespace

TEST_CASE("decompose_irreducible splits diagonals and keeps irreducibles whole") {
    CMat dg = CMat::Zero(2, 2);
    dg(0, 0) = -0.3;
    dg(1, 1) = 0.7;
    auto split = decompose_irreducible(NcPoint(1, 2, {dg}));
    REQUIRE(split.size() == 2);
    CHECK(split[0].point.level == 1);
    CHECK(split[1].point.level == 1);
    CHECK(split[0].multiplicity() == 1);

    CMat sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    auto pauli = decompose_irreducible(NcPoint(2, 2, {sx, sz}));
    REQUIRE(pauli.size() == 1);
    CHECK(pauli[0].multiplicity() == 1);
    CHECK(pauli[0].point.level == 2);
}

TEST_CASE("decompose_irreducible detects multiplicity two for y + y") {
    Rng rng(3);
    CMat y1 = rng.hermitian(2), y2 = rng.hermitian(2);
    CMat a = CMat::Zero(4, 4), b = CMat::Zero(4, 4);
    a.topLeftCorner(2, 2) = y1;
    a.bottomRightCorner(2, 2) = y1;
    b.topLeftCorner(2, 2) = y2;
    b.bottomRightCorner(2, 2) = y2;
    NcPoint x(2, 4, {a, b});
    bool clean = false;
    auto split = decompose_irreducible(x, {}, 1, &clean);
    CHECK(clean);
    REQUIRE(split.size() == 1);
    CHECK(split[0].multiplicity() == 2);
    // every copy embeds the shared representative isometrically
    for (const CMat& v : split[0].isometries) {
        CHECK(max_abs(v.adjoint() * v - CMat::Identity(2, 2)) < 1e-10);
        CHECK(max_abs(v.adjoint() * a * v - split[0].point.mats[0]) < 1e-10);
        CHECK(max_abs(v.adjoint() * b * v - split[0].point.mats[1]) < 1e-10);
    }
}

TEST_CASE("integrate fixtures and the weight-sum invariant") {
    NcPoint x = NcPoint::scalar({Complex(0.4, 0)});
    NcMeasure pm{1, {{x, CMat::Identity(1, 1)}}};
    CHECK(max_abs(integrate(pm, xpow(3)) - eval(xpow(3), x)) < 1e-14);
    CHECK(max_abs(integrate(pm, FreePoly::unit(1)) - CMat::Identity(1, 1)) < 1e-14);

    const double r = 1.0 / std::sqrt(2.0);
    NcMeasure two{1,
                  {{NcPoint::scalar({Complex(-1, 0)}), CMat::Constant(1, 1, Complex(r, 0))},
                   {NcPoint::scalar({Complex(1, 0)}), CMat::Constant(1, 1, Complex(r, 0))}}};
    CHECK(std::abs(integrate(two, xpow(2))(0, 0).real() - 1.0) < 1e-14);
    CHECK(std::abs(integrate(two, xpow(1))(0, 0).real()) < 1e-14);

    NcMeasure bad{1, {{x, CMat::Constant(1, 1, Complex(0.5, 0))}}};
    CHECK_THROWS_AS((void)integrate(bad, xpow(1)), std::invalid_argument);
}

TEST_CASE("delta_0 on the interval is represented by the endpoint measure") {
    NcSet k = interval_set(-1, 1);
    UcpRep mu = UcpRep::delta(NcPoint::scalar({Complex(0, 0)}));
    DecompositionReport r = represent_on_extreme(k, mu);
    REQUIRE(!r.capped);
    REQUIRE(r.measure.atoms.size() == 2);
    CHECK(r.supported_on_extreme);
    double lo = r.measure.atoms[0].point.mats[0](0, 0).real();
    double hi = r.measure.atoms[1].point.mats[0](0, 0).real();
    if (lo > hi) std::swap(lo, hi);
    CHECK(lo == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-5));
    for (const NcMeasureAtom& a : r.measure.atoms)
        CHECK((a.weight.adjoint() * a.weight)(0, 0).real() == doctest::Approx(0.5).epsilon(1e-4));
    // classical rep: same barycenter, x^2 integrates to 1
    CHECK(std::abs(integrate(r.measure, xpow(1))(0, 0).real()) < 1e-6);
    CHECK(integrate(r.measure, xpow(2))(0, 0).real() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("measure reconstructs the maximalized representation on all short words") {
    NcSet k = interval_set(-1, 1);
    Rng rng(9);
    NcPoint x = sample_member(k, 2, rng, 0.4);
    UcpRep mu = UcpRep::delta(x);
    DecompositionReport r = represent_on_extreme(k, mu);
    REQUIRE(!r.capped);
    // rebuild the maximal point the pipeline used
    DilateResult dr = dilate_to_maximal(k, x, 8);
    REQUIRE(dr.maximal);
    UcpRep maximalized{2, dr.point, dr.embedding, false};
    for (int deg = 0; deg <= 4; ++deg)
        CHECK(max_abs(integrate(r.measure, xpow(deg)) - apply(maximalized, xpow(deg))) < 1e-6);
    // barycenter is preserved exactly through the pipeline
    CHECK(max_abs(integrate(r.measure, xpow(1)) - x.mats[0]) < 1e-6);
    // atom validity
    for (const NcMeasureAtom& a : r.measure.atoms) CHECK(membership(k, a.point).inside);
}

TEST_CASE("represent_on_extreme is idempotent on extreme points") {
    NcSet k = interval_set(-1, 1);
    UcpRep mu = UcpRep::delta(NcPoint::scalar({Complex(1, 0)}));
    DecompositionReport r = represent_on_extreme(k, mu);
    REQUIRE(!r.capped);
    REQUIRE(r.measure.atoms.size() == 1);
    CHECK(r.measure.atoms[0].point.mats[0](0, 0).real() == doctest::Approx(1.0));
    CHECK(r.supported_on_extreme);
}

TEST_CASE("row-ball coisometry point never reaches a maximal dilation") {
    NcSet k = row_ball_set(2);
    const double r = 1.0 / std::sqrt(2.0);
    UcpRep mu = UcpRep::delta(NcPoint::scalar({Complex(r, 0), Complex(r, 0)}));
    DecompositionReport rep = represent_on_extreme(k, mu, 3);
    CHECK(rep.capped);
    CHECK(rep.measure.atoms.empty());
}
