#pragma once

#include "ncc/linalg.hpp"

#include <random>

namespace ncc {

/// Deterministic random source for sampling and property runs.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

    Complex cgaussian() { return Complex(gaussian(), gaussian()); }

    CMat cmatrix(int rows, int cols) {
        CMat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = cgaussian();
        return m;
    }

    CMat hermitian(int n) { return hermitian_part(cmatrix(n, n)); }

    /// Haar-ish unitary via QR of a Gaussian matrix.
    CMat unitary(int n) {
        Eigen::HouseholderQR<CMat> qr(cmatrix(n, n));
        CMat q = qr.householderQ() * CMat::Identity(n, n);
        CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j) {
            Complex rjj = r(j, j);
            if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
        }
        return q;
    }

    /// rows x cols isometry (rows >= cols), Haar-ish.
    CMat isometry(int rows, int cols) { return unitary(rows).leftCols(cols); }

    /// Split off an independently seeded child stream.
    Rng split() { return Rng(gen_()); }

private:
    std::mt19937_64 gen_;
};

}  // namespace ncc
