#pragma once

#include "wavedirac/linalg.hpp"

namespace wavedirac {

/// The supercharge Q = [[0, T*], [T, 0]] of a closed operator T together
/// with the pair H1 = T*T, H2 = TT* it squares to and the polar factors
/// of T. Blocks are ordered (H1-space, H2-space): Q acts on C^n (+) C^m
/// when T is m x n.
struct SuperchargeSystem {
    Matrix T;   // m x n
    Matrix Q;   // (n+m) x (n+m)
    Matrix H1;  // n x n
    Matrix H2;  // m x m
    PolarParts polar;
    HermitianSpectrum spec_h1;
    HermitianSpectrum spec_h2;

    Index n() const { return T.cols(); }
    Index m() const { return T.rows(); }
    Index total() const { return T.cols() + T.rows(); }

    /// sigma_3 = diag(I_n, -I_m).
    Matrix sigma3() const;

    /// Orthogonal projection onto ker(Q) = ker(T) (+) ker(T*).
    Matrix kernel_projection() const;

    /// V_Q = [[0, V_T*], [V_T, 0]].
    Matrix block_partial_isometry() const;
};

SuperchargeSystem build_supercharge(const Matrix& t);

/// || V_T phi(H1) - phi(H2) V_T ||; the intertwining residual.
double check_intertwining(const SuperchargeSystem& sys, const SpectralFunction& phi);

/// Block resolvent (Q - zeta)^{-1} via the H1/H2 resolvents:
///   [[ zeta (H1 - zeta^2)^{-1},  T* (H2 - zeta^2)^{-1} ],
///    [ T (H1 - zeta^2)^{-1},     zeta (H2 - zeta^2)^{-1} ]].
/// zeta^2 within 1e-8 (1 + |zeta|^2) of the spectrum of H1 or H2 raises
/// std::domain_error("spectral point").
Matrix resolvent_q(const SuperchargeSystem& sys, Complex zeta);

struct SuperchargeDiagonalization {
    Matrix U;                 // 2^{-1/2} [[I, V_T*], [-V_T, I]]
    Matrix D;                 // diag(|T|, -|T*|)
    Matrix complement_basis;  // orthonormal columns spanning (ker Q)^perp
};

/// Diagonalizes Q on the orthogonal complement of its kernel; there the
/// compression of U is unitary and U Q U^{-1} = diag(|T|, -|T*|).
SuperchargeDiagonalization diagonalize_supercharge(const SuperchargeSystem& sys);

/// || sigma_3 Q sigma_3 + Q ||_max. Zero exactly: sign flips do not round.
double check_nelson_symmetry(const SuperchargeSystem& sys);

/// Maps an H1 eigenvector f (H1 f = lambda^2 f, lambda != 0) to g = T f and
/// verifies H2 g = lambda^2 g and that (f, lambda^{-1} T f) is a
/// Q-eigenvector with eigenvalue lambda.
Vector eigen_transfer(const SuperchargeSystem& sys, const Vector& f, double lambda);

}  // namespace wavedirac
