#pragma once

#include <functional>

#include "wavedirac/types.hpp"

namespace wavedirac {

/// Scalar function of a real spectral parameter, possibly complex-valued
/// (e.g. lambda -> exp(-i lambda t)).
using SpectralFunction = std::function<Complex(double)>;

/// A coordinate space C^dim equipped with a Hermitian positive-definite Gram
/// matrix. The Euclidean case has gram = I; weighted spaces carry e.g. A*A.
struct InnerProductSpace {
    Index dim;
    Matrix gram;

    static InnerProductSpace euclidean(Index n);

    /// Validates Hermiticity (1e-12 relative) and positive definiteness;
    /// throws std::invalid_argument("degenerate inner product") otherwise.
    static InnerProductSpace weighted(Matrix gram);

    Complex inner(const Vector& f, const Vector& g) const;
    double norm(const Vector& f) const;
};

/// Polar factors of T: T = V_T |T| = |T*| V_T with V_T a partial isometry
/// vanishing on ker(T).
struct PolarParts {
    Matrix partial_isometry;  // V_T
    Matrix modulus;           // |T|  = (T*T)^{1/2}
    Matrix comodulus;         // |T*| = (TT*)^{1/2}
};

struct HermitianSpectrum {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // orthonormal columns

    Matrix reconstruct() const;
    Matrix apply(const SpectralFunction& phi) const;
};

Matrix adjoint(const Matrix& m);

/// Adjoint between weighted spaces: the unique M' with
/// <M f, g>_range = <f, M' g>_domain, i.e. gram_dom^{-1} M* gram_range.
Matrix weighted_adjoint(const Matrix& m, const InnerProductSpace& domain,
                        const InnerProductSpace& range);

PolarParts polar_decompose(const Matrix& t);

/// Requires ||S - S*|| <= 1e-10 ||S||; symmetrizes within that tolerance and
/// throws std::invalid_argument("not Hermitian") beyond it.
HermitianSpectrum hermitian_eig(const Matrix& s);

/// phi(S) = U phi(Lambda) U* for Hermitian S. A non-finite phi value at an
/// eigenvalue raises std::domain_error("function undefined on spectrum").
Matrix func_calc(const Matrix& s, const SpectralFunction& phi);
Matrix func_calc(const HermitianSpectrum& spec, const SpectralFunction& phi);

/// exp(t M). Normal inputs go through diagonalization, everything else
/// through Pade scaling-and-squaring; both routes agree to 1e-9 on normal
/// matrices and are exposed separately for two-path tests.
Matrix matrix_exp(const Matrix& m, double t = 1.0);
Matrix matrix_exp_pade(const Matrix& m);
Matrix matrix_exp_diagonalize(const Matrix& m);

bool is_normal(const Matrix& m, double tol = 1e-12);

/// Hermitian square root via the functional calculus.
Matrix hermitian_sqrt(const Matrix& s);

}  // namespace wavedirac
