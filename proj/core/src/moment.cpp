#include "ncc/moment.hpp"

namespace ncc {

namespace {

void scale_into(LinExpr& dst, const LinExpr& src, Complex c) {
    for (SdpTerm t : src.terms) {
        t.coeff *= c;
        dst.terms.push_back(t);
    }
    for (SdpFreeTerm t : src.free_terms) {
        t.coeff *= c;
        dst.free_terms.push_back(t);
    }
}

}  // namespace

Word MomentRelaxation::canonical(Word w) const {
    if (hermitian_)
        for (int& l : w)
            if (l < 0) l = ~l;
    return w;
}

Word MomentRelaxation::star_reverse(const Word& w) const {
    Word out(w.rbegin(), w.rend());
    for (int& l : out) l = ~l;
    return canonical(out);
}

void MomentRelaxation::append_shift(LinExpr& e, int row, int col) const {
    if (slack_ >= 0 && row == col) e.free_terms.push_back({slack_, Complex(1, 0)});
}

LinExpr MomentRelaxation::entry(const Word& u_in, int a, int b) const {
    Word u = canonical(u_in);
    const int len = static_cast<int>(u.size());
    if (len > 2 * degree_) throw std::invalid_argument("moment: word exceeds 2*degree");
    const int s = std::max(0, len - degree_);
    Word v = star_reverse(Word(u.begin(), u.begin() + s));
    Word w(u.begin() + s, u.end());
    const int row = index_.at(v) * n_ + a;
    const int col = index_.at(w) * n_ + b;
    LinExpr e;
    e.terms.push_back({blk_, row, col, Complex(1, 0)});
    append_shift(e, row, col);
    return e;
}

LinExpr MomentRelaxation::entry(const FreePoly& f, int a, int b) const {
    LinExpr e;
    for (const auto& [w, c] : f.terms) scale_into(e, entry(w, a, b), c);
    return e;
}

MomentRelaxation::MomentRelaxation(const NcSet& k, int n, int degree, bool with_slack)
    : n_(n), degree_(degree), d_(k.d()), hermitian_(k.hermitian_points()) {
    if (n <= 0 || degree < 1) throw std::invalid_argument("moment: bad size or degree");
    // graded word enumeration over the effective alphabet
    std::vector<int> alphabet;
    for (int j = 0; j < d_; ++j) alphabet.push_back(j);
    if (!hermitian_)
        for (int j = 0; j < d_; ++j) alphabet.push_back(~j);
    words_.push_back({});
    for (std::size_t lo = 0, len = 1; len <= static_cast<std::size_t>(degree_); ++len) {
        std::size_t hi = words_.size();
        for (std::size_t i = lo; i < hi; ++i)
            for (int l : alphabet) {
                Word w = words_[i];
                w.push_back(l);
                words_.push_back(std::move(w));
            }
        lo = hi;
    }
    for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<int>(i);

    if (with_slack) {
        slack_ = prob_.add_free(1);
        prob_.set_objective({}, {{slack_, Complex(-1, 0)}});  // maximize t
    }
    const int nw = static_cast<int>(words_.size());
    blk_ = prob_.add_block("moment", nw * n_);

    // unitality M[(e,a),(e,b)] = I
    for (int a = 0; a < n_; ++a)
        for (int b = a; b < n_; ++b) {
            SdpConstraint c;
            c.terms.push_back({blk_, a, b, Complex(1, 0)});
            if (slack_ >= 0 && a == b) c.free_terms.push_back({slack_, Complex(1, 0)});
            c.rhs = (a == b) ? 1.0 : 0.0;
            prob_.add_constraint(c);
        }

    // structural equalities: every position of the same product word matches
    // its canonical entry() position
    for (int iv = 0; iv < nw; ++iv)
        for (int iw = iv; iw < nw; ++iw) {
            Word u = star_reverse(words_[iv]);
            u.insert(u.end(), words_[iw].begin(), words_[iw].end());
            u = canonical(u);
            if (u.empty()) continue;  // unitality already pins these
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) {
                    const int row = iv * n_ + a, col = iw * n_ + b;
                    LinExpr rep = entry(u, a, b);
                    if (rep.terms.size() == 1 && rep.terms[0].row == row &&
                        rep.terms[0].col == col)
                        continue;
                    SdpConstraint c;
                    c.terms.push_back({blk_, row, col, Complex(1, 0)});
                    if (slack_ >= 0 && row == col)
                        c.free_terms.push_back({slack_, Complex(1, 0)});
                    for (SdpTerm t : rep.terms) {
                        t.coeff = -t.coeff;
                        c.terms.push_back(t);
                    }
                    for (SdpFreeTerm t : rep.free_terms) {
                        t.coeff = -t.coeff;
                        c.free_terms.push_back(t);
                    }
                    c.rhs = 0;
                    prob_.add_constraint(c);
                }
        }

    // localizing blocks from the pencil: for index words v, w of length
    // <= degree-1, Q(i,i') L(v~ w) + sum_h A_h(i,i') L(v~ H_h w) >= 0
    if (auto* p = k.pencil()) {
        int nloc = 0;
        while (nloc < nw && static_cast<int>(words_[nloc].size()) <= degree_ - 1) ++nloc;
        const int kd = p->pencil_dim();
        int loc = prob_.add_block("localizing", nloc * kd * n_);
        auto coord_words = [&](int h) {
            // Hermitian coordinate H_h as a list of (letter word, coeff)
            std::vector<std::pair<Word, Complex>> out;
            if (p->hermitian) {
                out.push_back({{h}, Complex(1, 0)});
            } else {
                int j = h / 2;
                if (h % 2 == 0) {
                    out.push_back({{j}, Complex(0.5, 0)});
                    out.push_back({{~j}, Complex(0.5, 0)});
                } else {
                    out.push_back({{j}, Complex(0, -0.5)});
                    out.push_back({{~j}, Complex(0, 0.5)});
                }
            }
            return out;
        };
        for (int r1 = 0; r1 < nloc * kd * n_; ++r1)
            for (int r2 = r1; r2 < nloc * kd * n_; ++r2) {
                const int a = r1 % n_, i = (r1 / n_) % kd, iv = r1 / (n_ * kd);
                const int b = r2 % n_, i2 = (r2 / n_) % kd, iw = r2 / (n_ * kd);
                LinExpr expr;
                Word vbar = star_reverse(words_[iv]);
                auto with_mid = [&](const Word& mid) {
                    Word u = vbar;
                    u.insert(u.end(), mid.begin(), mid.end());
                    u.insert(u.end(), words_[iw].begin(), words_[iw].end());
                    return u;
                };
                if (p->q(i, i2) != Complex(0, 0))
                    scale_into(expr, entry(with_mid({}), a, b), p->q(i, i2));
                for (int h = 0; h < p->num_coords(); ++h) {
                    Complex ac = p->coeffs[h](i, i2);
                    if (ac == Complex(0, 0)) continue;
                    for (const auto& [mid, cc] : coord_words(h))
                        scale_into(expr, entry(with_mid(mid), a, b), ac * cc);
                }
                SdpConstraint c;
                c.terms.push_back({loc, r1, r2, Complex(1, 0)});
                if (slack_ >= 0 && r1 == r2) c.free_terms.push_back({slack_, Complex(1, 0)});
                for (SdpTerm t : expr.terms) {
                    t.coeff = -t.coeff;
                    c.terms.push_back(t);
                }
                for (SdpFreeTerm t : expr.free_terms) {
                    t.coeff = -t.coeff;
                    c.free_terms.push_back(t);
                }
                c.rhs = 0;
                prob_.add_constraint(c);
            }
    }
}

void MomentRelaxation::constrain_barycenter(const NcPoint& x) {
    if (x.level != n_ || x.d != d_) throw std::invalid_argument("moment: barycenter shape");
    for (int j = 0; j < d_; ++j)
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b) {
                LinExpr e = entry(Word{j}, a, b);
                SdpConstraint c;
                c.terms = e.terms;
                c.free_terms = e.free_terms;
                c.rhs = x.mats[j](a, b);
                prob_.add_constraint(c);
            }
}

void MomentRelaxation::constrain_compressed(const Word& u, const CMat& alpha, const CMat& rhs) {
    const int m = static_cast<int>(alpha.cols());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            LinExpr e;
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) {
                    Complex w = std::conj(alpha(a, i)) * alpha(b, j);
                    if (w != Complex(0, 0)) scale_into(e, entry(u, a, b), w);
                }
            SdpConstraint c;
            c.terms = e.terms;
            c.free_terms = e.free_terms;
            c.rhs = rhs(i, j);
            prob_.add_constraint(c);
        }
}

void MomentRelaxation::set_objective(const FreePoly& f, const CVec& xi) {
    if (slack_ >= 0) throw std::logic_error("moment: slack mode owns the objective");
    LinExpr e;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            Complex w = std::conj(xi(a)) * xi(b);
            if (w != Complex(0, 0)) scale_into(e, entry(f, a, b), w);
        }
    prob_.set_objective(e.terms, e.free_terms);
}

CMat MomentRelaxation::read(const SdpSolution& s, const Word& u) const {
    CMat out(n_, n_);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            LinExpr e = entry(u, a, b);
            Complex v = 0;
            for (const SdpTerm& t : e.terms) v += t.coeff * s.blocks[t.block](t.row, t.col);
            for (const SdpFreeTerm& t : e.free_terms) v += t.coeff * s.free_values(t.index);
            out(a, b) = v;
        }
    return out;
}

double MomentRelaxation::read_slack(const SdpSolution& s) const {
    if (slack_ < 0) throw std::logic_error("moment: no slack variable");
    return s.free_values(slack_);
}

}  // namespace ncc
