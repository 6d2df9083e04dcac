#include "doctest.h"
#include "ncc/io.hpp"

using namespace ncc;

TEST_CASE("matrix and point JSON round-trips preserve entries") {
    Rng rng(5);
    CMat m = rng.hermitian(3) + Complex(0, 1) * CMat::Identity(3, 3);
    CHECK(max_abs(mat_from_json(to_json(m)) - m) == 0.0);

    NcPoint x(2, 2, {rng.hermitian(2), rng.hermitian(2)});
    NcPoint back = point_from_json(to_json(x));
    CHECK(back.d == 2);
    CHECK(back.level == 2);
    CHECK(approx_equal(back, x, 0.0));

    Json broken = to_json(x);
    broken["mats"][0]["rows"] = 3;
    CHECK_THROWS_AS((void)point_from_json(broken), std::invalid_argument);
}

TEST_CASE("word strings use one-based letters with stars") {
    Word w{0, ~1, 2};
    CHECK(word_to_string(w) == "1 2* 3");
    CHECK(word_from_string("1 2* 3", 3) == w);
    CHECK(word_from_string("", 3).empty());
    CHECK_THROWS_AS((void)word_from_string("4", 3), std::invalid_argument);
    CHECK_THROWS_AS((void)word_from_string("zebra", 3), std::invalid_argument);
}

TEST_CASE("polynomial JSON round-trip merges duplicate words") {
    FreePoly f = Complex(2, 0) * FreePoly::letter(2, 0) +
                 Complex(0, 1) * multiply(FreePoly::letter(2, 1, true), FreePoly::letter(2, 0));
    FreePoly back = poly_from_json(to_json(f));
    CHECK(back.terms == f.terms);

    Json dup = Json{{"d", 1},
                    {"terms", Json::array({Json{{"word", "1"}, {"coeff", {1.0, 0.0}}},
                                           Json{{"word", "1"}, {"coeff", {-1.0, 0.0}}}})}};
    CHECK(poly_from_json(dup).terms.empty());
}

TEST_CASE("set JSON round-trips across the three presentations") {
    for (const NcSet& k : {interval_set(-1, 1), row_ball_set(2)}) {
        NcSet back = set_from_json(to_json(k));
        REQUIRE(back.pencil() != nullptr);
        CHECK(back.d() == k.d());
        CHECK(back.hermitian_points() == k.hermitian_points());
        CHECK(max_abs(back.pencil()->q - k.pencil()->q) == 0.0);
    }
    // convenience kinds normalize to pencils
    NcSet iv = set_from_json(Json{{"kind", "interval"}, {"c", -1.0}, {"d", 1.0}});
    CHECK(membership(iv, NcPoint::scalar({Complex(0, 0)})).inside);

    NcSet os = cuntz_opsys(1);
    NcSet os_back = set_from_json(to_json(os));
    REQUIRE(os_back.opsys() != nullptr);
    CHECK(os_back.opsys()->ambient_dim == 3);

    HullPresentation h;
    h.generators.push_back(NcPoint::scalar({Complex(-1, 0)}));
    h.generators.push_back(NcPoint::scalar({Complex(1, 0)}));
    NcSet hb = set_from_json(to_json(hull_set(h)));
    REQUIRE(hb.hull() != nullptr);
    CHECK(hb.hull()->generators.size() == 2);

    CHECK_THROWS_AS((void)set_from_json(Json{{"kind", "mystery"}}), std::invalid_argument);
}

TEST_CASE("ucp map JSON validates the isometry") {
    UcpRep nu{1, NcPoint(1, 2, {(CMat(2, 2) << 0, 1, 1, 0).finished()}),
              (CMat(2, 1) << 1, 0).finished(), false};
    UcpRep back = ucp_from_json(to_json(nu));
    CHECK(back.target_level == 1);
    CHECK(max_abs(back.isometry - nu.isometry) == 0.0);

    Json bad = to_json(nu);
    bad["isometry"]["data"][0] = Json::array({2.0, 0.0});
    CHECK_THROWS_AS((void)ucp_from_json(bad), std::invalid_argument);
}
