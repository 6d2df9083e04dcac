#include "doctest.h"
#include "ncc/fock.hpp"

#include <cmath>

using namespace ncc;

TEST_CASE("truncated creation operators are graded partial isometries") {
    CHECK(fock_dim(2, 0) == 1);
    CHECK(fock_dim(2, 2) == 7);
    CHECK(fock_dim(2, 8) == 511);
    CHECK(fock_dim(3, 2) == 13);

    const int cap = 3;
    auto ops = fock_creation_ops(2, cap);
    const int dim = fock_dim(2, cap);
    const int inner = fock_dim(2, cap - 1);
    // L_j* L_j projects onto words short enough to grow; ranges are orthogonal
    CMat proj = CMat::Zero(dim, dim);
    proj.topLeftCorner(inner, inner).setIdentity();
    CHECK(max_abs(ops[0].adjoint() * ops[0] - proj) < 1e-14);
    CHECK(max_abs(ops[1].adjoint() * ops[1] - proj) < 1e-14);
    CHECK(max_abs(ops[0].adjoint() * ops[1]) < 1e-14);
    // together the ranges cover exactly the nonempty words
    CMat range = ops[0] * ops[0].adjoint() + ops[1] * ops[1].adjoint();
    CMat nonempty = CMat::Identity(dim, dim);
    nonempty(0, 0) = 0;
    CHECK(max_abs(range - nonempty) < 1e-14);
}

TEST_CASE("compression defect of the semicircular square is s^2 on the vacuum line") {
    for (Complex lambda : {Complex(0.5, std::sqrt(3.0) / 2.0), Complex(0, 1)}) {
        SemicircularReport r = semicircular_defect(lambda, 8);
        const double s2 = lambda.imag() * lambda.imag();
        CHECK(r.identity_residual <= 1e-8);
        CHECK(r.defect_norm == doctest::Approx(s2).epsilon(1e-8));
        CHECK(r.s2 == doctest::Approx(s2));
        CHECK(r.space_dim == 512);
        CHECK(r.safe_dim == 128);
    }
    // real parameters give a zero defect: the two models agree on the square
    CHECK(semicircular_defect(Complex(1, 0), 8).defect_norm <= 1e-8);
    CHECK(semicircular_defect(Complex(-1, 0), 8).defect_norm <= 1e-8);

    CHECK_THROWS_AS((void)semicircular_defect(Complex(0.5, 0), 8), std::invalid_argument);
    CHECK_THROWS_AS((void)semicircular_defect(Complex(1, 0), 1), std::invalid_argument);
}

TEST_CASE("truncated Cuntz operator system accepts row contractions") {
    NcSet k = cuntz_opsys(2);
    REQUIRE(k.opsys() != nullptr);
    CHECK(k.opsys()->ambient_dim == 7);
    NcPoint mild = NcPoint::scalar({Complex(0.4, 0), Complex(0.4, 0)});
    CHECK(membership(k, mild).inside);
    // truncation shrinks the level-1 section: the symmetric boundary moves
    // from the coisometry radius 1/sqrt(2) down to 1/2 (the top adjacency
    // eigenvalue of the depth-2 binary tree), so the coisometry lands outside
    CHECK(membership(k, NcPoint::scalar({Complex(0.49, 0), Complex(0.49, 0)})).inside);
    const double r = 1.0 / std::sqrt(2.0);
    NcPoint edge = NcPoint::scalar({Complex(r, 0), Complex(r, 0)});
    CHECK(!membership(k, edge).inside);
    NcPoint outside = NcPoint::scalar({Complex(1, 0), Complex(1, 0)});
    CHECK(!membership(k, outside).inside);
}
