#pragma once

// Free *-polynomials in d noncommuting letters, with evaluation at matrix
// points and randomized nc convexity testing.

#include "ncc/ncset.hpp"

#include <map>
#include <optional>

namespace ncc {

// word over the letters: j >= 0 is the letter x_j, ~j (= -j-1) is x_j*
using Word = std::vector<int>;

struct FreePoly {
    int d = 0;
    std::map<Word, Complex> terms;  // finitely many; zero coefficients pruned

    static FreePoly zero(int d);
    static FreePoly unit(int d);
    static FreePoly letter(int d, int j, bool star = false);

    int degree() const;
    void prune(double eps = 0.0);

    FreePoly& operator+=(const FreePoly& g);
    FreePoly& operator-=(const FreePoly& g);
    FreePoly& operator*=(Complex c);
};

FreePoly operator+(FreePoly f, const FreePoly& g);
FreePoly operator-(FreePoly f, const FreePoly& g);
FreePoly operator*(Complex c, FreePoly f);

FreePoly adjoint(const FreePoly& f);
FreePoly multiply(const FreePoly& f, const FreePoly& g);

/// formal self-adjointness; with hermitian_letters the stars are immaterial
/// (x_j* = x_j on Hermitian points) and words are compared star-stripped
bool is_selfadjoint(const FreePoly& f, bool hermitian_letters = false, double eps = 1e-12);

CMat eval(const FreePoly& f, const NcPoint& x);

/// h_t(x) = x^2 (1 - t x)^{-1}, operator convex on (-1, 1) for |t| <= 1
CMat h_t_eval(double t, const CMat& x);

/// degree-(cap+2) polynomial truncation sum_{k<=cap} t^k x^{k+2} (single letter)
FreePoly h_t_truncation(double t, int cap);

struct ConvexityWitness {
    NcPoint x, y;
    double lambda = 0.5;
    double gap = 0.0;  // most negative eigenvalue of the midpoint slack
    int level = 0;
};

struct ConvexityVerdict {
    bool convex = false;  // ConvexUpTo(level_checked) when true; evidence only
    int level_checked = 0;
    std::optional<ConvexityWitness> witness;  // certified when present
};

ConvexityVerdict test_nc_convexity(const FreePoly& f, const NcSet& k, int max_level,
                                   int samples, std::uint64_t seed,
                                   const Tolerances& tol = {});

}  // namespace ncc
