#include "doctest.h"
#include "ncc/rng.hpp"
#include "ncc/sdp.hpp"

using namespace ncc;

namespace {

SdpConstraint trace_is(int block, int dim, double value) {
    SdpConstraint c;
    for (int i = 0; i < dim; ++i) c.terms.push_back({block, i, i, Complex(1, 0)});
    c.rhs = value;
    return c;
}

}  // namespace

TEST_CASE("scalar bound: min x s.t. x >= 1 as a 1x1 psd shift") {
    // x - 1 = s >= 0, variable s is the psd block, x = s + 1 free? Simplest
    // form: block X (1x1), constraint X(0,0) - u = -1 with free u minimized.
    SdpProblem p;
    int b = p.add_block("slack", 1);
    int u = p.add_free(1);
    SdpConstraint c;
    c.terms.push_back({b, 0, 0, Complex(1, 0)});
    c.free_terms.push_back({u, Complex(-1, 0)});
    c.rhs = Complex(-1, 0);
    p.add_constraint(c);
    p.set_objective({}, {{u, Complex(1, 0)}});
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.objective - 1.0) < 1e-6);
    CHECK(std::abs(s.free_values(0) - 1.0) < 1e-6);
    CHECK(verify_sdp_solution(p, s, tol));
}

TEST_CASE("trace normalization with a linear objective hits an eigenvalue bound") {
    // min <C, X> s.t. tr X = 1, X psd: optimum is lambda_min(C)
    Rng rng(31);
    const int n = 4;
    CMat c = rng.hermitian(n);
    SdpProblem p;
    int b = p.add_block("x", n);
    p.add_constraint(trace_is(b, n, 1.0));
    std::vector<SdpTerm> obj;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) obj.push_back({b, i, j, c(j, i)});  // tr(C X)
    p.set_objective(obj);
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.objective - min_eigenvalue(HMat(c))) < 1e-6);
    CHECK(verify_sdp_solution(p, s, tol));
}

TEST_CASE("infeasible trace yields a certificate") {
    SdpProblem p;
    int b = p.add_block("x", 3);
    p.add_constraint(trace_is(b, 3, -1.0));
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Infeasible);
    CHECK(verify_sdp_solution(p, s, tol));
}

TEST_CASE("contradictory rows are caught in presolve with a certificate") {
    SdpProblem p;
    int b = p.add_block("x", 2);
    p.add_constraint(trace_is(b, 2, 1.0));
    p.add_constraint(trace_is(b, 2, 2.0));
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Infeasible);
    CHECK(verify_sdp_solution(p, s, tol));
}

TEST_CASE("duplicate consistent rows are dropped silently") {
    SdpProblem p;
    int b = p.add_block("x", 2);
    p.add_constraint(trace_is(b, 2, 1.0));
    p.add_constraint(trace_is(b, 2, 1.0));
    SdpConstraint c;  // X(0,0) = 0.25
    c.terms.push_back({b, 0, 0, Complex(1, 0)});
    c.rhs = 0.25;
    p.add_constraint(c);
    p.set_objective({{b, 1, 1, Complex(1, 0)}});
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.objective - 0.75) < 1e-6);
}

TEST_CASE("unbounded objective is detected along a psd ray") {
    // min -X(0,0), only constraint X(1,1) = 1: X(0,0) can grow freely
    SdpProblem p;
    int b = p.add_block("x", 2);
    SdpConstraint c;
    c.terms.push_back({b, 1, 1, Complex(1, 0)});
    c.rhs = 1.0;
    p.add_constraint(c);
    p.set_objective({{b, 0, 0, Complex(-1, 0)}});
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    CHECK(s.status == SdpStatus::Unbounded);
}

TEST_CASE("unconstrained free variable in the objective is unbounded") {
    SdpProblem p;
    p.add_block("x", 1);
    int u = p.add_free(1);
    SdpConstraint c;
    c.terms.push_back({0, 0, 0, Complex(1, 0)});
    c.rhs = 1.0;
    p.add_constraint(c);
    p.set_objective({}, {{u, Complex(1, 0)}});
    Tolerances tol;
    CHECK(solve_sdp(p, tol).status == SdpStatus::Unbounded);
}

TEST_CASE("complex constraints: off-diagonal pinning") {
    // X psd 2x2, tr X = 1, X(0,1) = 0.3 + 0.2i; maximize X(0,0) - X(1,1).
    SdpProblem p;
    int b = p.add_block("x", 2);
    p.add_constraint(trace_is(b, 2, 1.0));
    SdpConstraint c;
    c.terms.push_back({b, 0, 1, Complex(1, 0)});
    c.rhs = Complex(0.3, 0.2);
    p.add_constraint(c);
    p.set_objective({{b, 0, 0, Complex(-1, 0)}, {b, 1, 1, Complex(1, 0)}});
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(verify_sdp_solution(p, s, tol));
    CHECK(std::abs(s.blocks[0](0, 1) - Complex(0.3, 0.2)) < 1e-6);
    // with t = X(0,0) - 1/2: maximize 2t s.t. (1/2+t)(1/2-t) >= |X01|^2
    double r = std::sqrt(0.25 - (0.3 * 0.3 + 0.2 * 0.2));
    CHECK(std::abs(-s.objective - 2 * r) < 1e-5);
}

TEST_CASE("matrix feasibility: psd completion respects psd-ness and equalities") {
    Rng rng(33);
    const int n = 5;
    CMat g = rng.cmatrix(n, n);
    CMat target = g.adjoint() * g;  // strictly pd reference point
    SdpProblem p;
    int b = p.add_block("x", n);
    // pin a few entries of X to those of target, ask for any psd completion
    std::vector<std::pair<int, int>> pins = {{0, 0}, {0, 1}, {1, 2}, {3, 4}, {2, 2}};
    for (auto [i, j] : pins) {
        SdpConstraint c;
        c.terms.push_back({b, i, j, Complex(1, 0)});
        c.rhs = target(i, j);
        p.add_constraint(c);
    }
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(verify_sdp_solution(p, s, tol));
    for (auto [i, j] : pins) CHECK(std::abs(s.blocks[0](i, j) - target(i, j)) < 1e-6);
    CHECK(min_eigenvalue(HMat(s.blocks[0], 1e-7)) > -1e-7);
}

TEST_CASE("two blocks with a coupling row") {
    // tr X1 + tr X2 = 2, min tr X1 -> 0 (X1 -> 0, X2 absorbs the mass)
    SdpProblem p;
    int b1 = p.add_block("a", 2), b2 = p.add_block("b", 3);
    SdpConstraint c;
    for (int i = 0; i < 2; ++i) c.terms.push_back({b1, i, i, Complex(1, 0)});
    for (int i = 0; i < 3; ++i) c.terms.push_back({b2, i, i, Complex(1, 0)});
    c.rhs = 2.0;
    p.add_constraint(c);
    std::vector<SdpTerm> obj;
    for (int i = 0; i < 2; ++i) obj.push_back({b1, i, i, Complex(1, 0)});
    p.set_objective(obj);
    Tolerances tol;
    SdpSolution s = solve_sdp(p, tol);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.objective) < 1e-6);
    CHECK(verify_sdp_solution(p, s, tol));
}

TEST_CASE("solver is deterministic across repeated runs") {
    Rng rng(34);
    CMat c = rng.hermitian(3);
    auto build = [&]() {
        SdpProblem p;
        int b = p.add_block("x", 3);
        p.add_constraint(trace_is(b, 3, 1.0));
        std::vector<SdpTerm> obj;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) obj.push_back({b, i, j, c(j, i)});
        p.set_objective(obj);
        return p;
    };
    Tolerances tol;
    SdpSolution s1 = solve_sdp(build(), tol);
    SdpSolution s2 = solve_sdp(build(), tol);
    REQUIRE(s1.status == SdpStatus::Optimal);
    REQUIRE(s2.status == SdpStatus::Optimal);
    CHECK(max_abs(s1.blocks[0] - s2.blocks[0]) == 0.0);
    CHECK(s1.objective == s2.objective);
    CHECK(s1.iterations == s2.iterations);
}

TEST_CASE("objective scale invariance within tolerance") {
    Rng rng(35);
    CMat c = rng.hermitian(3);
    Tolerances tol;
    double base = 0, scaled = 0;
    for (double f : {1.0, 1e3}) {
        SdpProblem p;
        int b = p.add_block("x", 3);
        p.add_constraint(trace_is(b, 3, 1.0));
        std::vector<SdpTerm> obj;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) obj.push_back({b, i, j, f * c(j, i)});
        p.set_objective(obj);
        SdpSolution s = solve_sdp(p, tol);
        REQUIRE(s.status == SdpStatus::Optimal);
        (f == 1.0 ? base : scaled) = s.objective / f;
    }
    CHECK(std::abs(base - scaled) < 1e-5);
}

TEST_CASE("problem dump is valid json with the documented fields") {
    SdpProblem p;
    int b = p.add_block("x", 2);
    p.add_constraint(trace_is(b, 2, 1.0));
    std::string dump = p.dump_json();
    CHECK(dump.find("\"blocks\"") != std::string::npos);
    CHECK(dump.find("\"constraints\"") != std::string::npos);
    CHECK(dump.find("\"objective\"") != std::string::npos);
}
