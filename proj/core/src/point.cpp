#include "ncc/point.hpp"

namespace ncc {

NcPoint::NcPoint(int d_, int level_, std::vector<CMat> mats_)
    : d(d_), level(level_), mats(std::move(mats_)) {
    validate();
}

NcPoint NcPoint::scalar(std::vector<Complex> values) {
    NcPoint p;
    p.d = static_cast<int>(values.size());
    p.level = 1;
    for (Complex v : values) {
        CMat m(1, 1);
        m(0, 0) = v;
        p.mats.push_back(m);
    }
    return p;
}

void NcPoint::validate() const {
    if (d < 1 || level < 1) throw std::invalid_argument("NcPoint: d and level must be >= 1");
    if (static_cast<int>(mats.size()) != d)
        throw std::invalid_argument("NcPoint: mats count != d");
    for (const CMat& m : mats) {
        if (m.rows() != level || m.cols() != level)
            throw std::invalid_argument("NcPoint: matrix shape != level");
        if (!all_finite(m)) throw std::invalid_argument("NcPoint: non-finite entries");
    }
}

bool NcPoint::hermitian(double eps_sym) const {
    for (const CMat& m : mats)
        if (max_abs(m - m.adjoint()) > eps_sym) return false;
    return true;
}

bool approx_equal(const NcPoint& a, const NcPoint& b, double eps) {
    if (a.d != b.d || a.level != b.level) return false;
    for (int j = 0; j < a.d; ++j)
        if (!approx_equal(a.mats[j], b.mats[j], eps)) return false;
    return true;
}

NcPoint direct_sum(const std::vector<NcPoint>& points) {
    if (points.empty()) throw std::invalid_argument("direct_sum: empty list");
    const int d = points[0].d;
    int total = 0;
    for (const NcPoint& p : points) {
        if (p.d != d) throw std::invalid_argument("direct_sum: mismatched d");
        total += p.level;
    }
    NcPoint out;
    out.d = d;
    out.level = total;
    for (int j = 0; j < d; ++j) {
        CMat m = CMat::Zero(total, total);
        int off = 0;
        for (const NcPoint& p : points) {
            m.block(off, off, p.level, p.level) = p.mats[j];
            off += p.level;
        }
        out.mats.push_back(std::move(m));
    }
    return out;
}

NcPoint compress(const NcPoint& x, const CMat& v) {
    if (v.rows() != x.level) throw std::invalid_argument("compress: shape mismatch");
    NcPoint out;
    out.d = x.d;
    out.level = static_cast<int>(v.cols());
    for (const CMat& m : x.mats) out.mats.push_back(v.adjoint() * m * v);
    return out;
}

NcPoint nc_combination(const std::vector<NcPoint>& points,
                       const std::vector<CMat>& weights,
                       const Tolerances& tol) {
    if (points.empty() || points.size() != weights.size())
        throw std::invalid_argument("nc_combination: list size mismatch");
    const int d = points[0].d;
    const int n = static_cast<int>(weights[0].cols());
    CMat gram = CMat::Zero(n, n);
    for (size_t i = 0; i < points.size(); ++i) {
        if (points[i].d != d) throw std::invalid_argument("nc_combination: mismatched d");
        if (weights[i].rows() != points[i].level || weights[i].cols() != n)
            throw std::invalid_argument("nc_combination: weight shape mismatch");
        gram += weights[i].adjoint() * weights[i];
    }
    if (max_abs(gram - CMat::Identity(n, n)) > tol.eps_eq)
        throw std::invalid_argument("nc_combination: weights do not sum to identity");
    NcPoint out;
    out.d = d;
    out.level = n;
    for (int j = 0; j < d; ++j) {
        CMat m = CMat::Zero(n, n);
        for (size_t i = 0; i < points.size(); ++i)
            m += weights[i].adjoint() * points[i].mats[j] * weights[i];
        out.mats.push_back(std::move(m));
    }
    return out;
}

NcPoint unitary_conjugate(const NcPoint& x, const CMat& u) {
    return compress(x, u.adjoint());
}

}  // namespace ncc
