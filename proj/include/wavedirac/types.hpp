#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace wavedirac {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Operator norm (largest singular value).
double operator_norm(const Matrix& m);

/// Hybrid absolute-relative tolerance: residual <= tol * (1 + scale).
inline bool within_tol(double residual, double tol, double scale) {
    return residual <= tol * (1.0 + scale);
}

bool all_finite(const Matrix& m);

/// Numerical rank cutoff: max(rows, cols) * eps * sigma_max.
double rank_cutoff(Index rows, Index cols, double sigma_max);

/// Seedable fixture generator. Algorithm: std::mt19937_64; doubles are drawn
/// as (x >> 11) * 2^-53 so fixtures reproduce independently of the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Complex complex_box(double scale = 1.0) {
        return {scale * uniform(-1.0, 1.0), scale * uniform(-1.0, 1.0)};
    }

    Vector vector(Index n, double scale = 1.0) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = complex_box(scale);
        return v;
    }

    Matrix matrix(Index rows, Index cols, double scale = 1.0) {
        Matrix m(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) m(i, j) = complex_box(scale);
        return m;
    }

    Matrix hermitian(Index n, double scale = 1.0) {
        Matrix m = matrix(n, n, scale);
        return 0.5 * (m + m.adjoint()).eval();
    }

    /// Hermitian positive semidefinite with spectrum in roughly [0, n*scale^2].
    Matrix psd(Index n, double scale = 1.0) {
        Matrix m = matrix(n, n, scale);
        return (m.adjoint() * m).eval();
    }

    /// m x n (m >= n) with smallest singular value bounded away from zero.
    Matrix full_column_rank(Index rows, Index cols, double min_sigma = 1e-2);

    /// Square matrix whose Hermitian part is positive semidefinite.
    Matrix accretive(Index n, double scale = 1.0) {
        Matrix skew = matrix(n, n, scale);
        skew = 0.5 * (skew - skew.adjoint()).eval();
        return psd(n, scale) + skew;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace wavedirac
