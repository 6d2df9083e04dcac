#pragma once

// Matrix-valued noncommutative moment relaxation: a psd moment block
// M[(v,a),(w,b)] = L(v* w)(a,b) over words up to a degree cap, with
// structural equalities, unitality, and localizing blocks from a pencil
// presentation. The single relaxation engine behind convex envelopes and
// the dilation-order feasibility check.

#include "ncc/freepoly.hpp"
#include "ncc/sdp.hpp"

namespace ncc {

// linear expression in the SDP variables
struct LinExpr {
    std::vector<SdpTerm> terms;
    std::vector<SdpFreeTerm> free_terms;
};

class MomentRelaxation {
  public:
    /// n = matrix size of the functional values; degree = word-length cap of
    /// the moment block index words (entries reach word length 2*degree).
    /// With_slack turns every psd block B into B_true - t I with a free slack
    /// t maximized by the default objective: the feasible moment set often has
    /// empty interior (forced singular moments), and the shift restores one.
    /// The relaxation is feasible to within margin iff the optimum t >= -margin.
    MomentRelaxation(const NcSet& k, int n, int degree, bool with_slack = false);

    int n() const { return n_; }
    int degree() const { return degree_; }
    const std::vector<Word>& index_words() const { return words_; }

    /// expression for L(u)(a, b); requires |u| <= 2*degree
    LinExpr entry(const Word& u, int a, int b) const;
    /// expression for sum_u f_u L(u)(a, b)
    LinExpr entry(const FreePoly& f, int a, int b) const;

    /// L(letter j) = x_j entrywise
    void constrain_barycenter(const NcPoint& x);
    /// alpha* L(u) alpha = rhs for an isometry alpha (n x m), |u| <= 2*degree
    void constrain_compressed(const Word& u, const CMat& alpha, const CMat& rhs);

    /// minimize xi* L(f) xi (f self-adjoint, xi of size n); not with_slack
    void set_objective(const FreePoly& f, const CVec& xi);

    SdpProblem& problem() { return prob_; }
    const SdpProblem& problem() const { return prob_; }

    /// read L(u) out of an Optimal solution
    CMat read(const SdpSolution& s, const Word& u) const;
    /// value of the slack variable t (with_slack only)
    double read_slack(const SdpSolution& s) const;

  private:
    Word canonical(Word w) const;
    Word star_reverse(const Word& w) const;
    void append_shift(LinExpr& e, int row, int col) const;

    int n_ = 0, degree_ = 0, d_ = 0;
    bool hermitian_ = false;
    std::vector<Word> words_;
    std::map<Word, int> index_;
    SdpProblem prob_;
    int blk_ = 0;       // moment block
    int slack_ = -1;    // free slack variable index, -1 when absent
};

}  // namespace ncc
