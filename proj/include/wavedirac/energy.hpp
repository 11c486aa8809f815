#pragma once

#include "wavedirac/linalg.hpp"

namespace wavedirac {

/// Finite-dimensional energy-space model of a full-column-rank A : C^n -> C^m.
/// The weighted space H_A is the identity coordinate chart on C^n carrying the
/// Gram matrix A*A, so the embeddings iota_A and J_A are literal identity
/// matrices between (C^n, A*A) and (C^n, I). K_A = ran(A) is represented by an
/// orthonormal column basis.
struct EnergyModel {
    Matrix A;          // m x n, ker(A) = {0}
    Matrix gram;       // A*A, the H_A inner product
    Matrix ran_basis;  // m x n orthonormal columns spanning ran(A)
    Matrix tilde_a;    // n x n, ran_basis* A: the unitary H_A -> K_A
    Matrix modulus;    // |A| = (A*A)^{1/2}
    InnerProductSpace space;  // (C^n, gram)

    Index n() const { return A.cols(); }
    Index m() const { return A.rows(); }
};

/// Throws std::invalid_argument("kernel nontrivial") when the smallest
/// singular value falls under the rank cutoff, and rejects condition numbers
/// of A*A above 1e12 (the small-spectrum emulation guard).
EnergyModel build_energy_model(const Matrix& a);

/// U_A~ = [[0, I], [-i A~, 0]] : (H_A (+) H_1) -> (H_1 (+) K_A), unitary for
/// the weighted inner products.
Matrix build_block_unitary(const EnergyModel& model);
Matrix block_unitary_inverse(const EnergyModel& model);

/// The |A| counterparts U_|A~| = [[0, I], [-i |A|, 0]] and its inverse.
Matrix modulus_unitary(const EnergyModel& model);
Matrix modulus_unitary_inverse(const EnergyModel& model);

/// Wave generator in energy coordinates, G = [[0, I], [-A*A, -R]], together
/// with the energy Gram diag(A*A, I).
struct GeneratorBlock {
    Matrix G;
    InnerProductSpace energy_space;
};

GeneratorBlock build_generator(const EnergyModel& model, const Matrix& r);

/// Compression of Q_{A,0} [I - P_ker] to H_1 (+) K_A:
/// [[0, A* W], [W* A, 0]] with W the ran(A) basis.
Matrix compressed_dirac(const EnergyModel& model, const Matrix& r);

/// || U_A~ (i G_{A,0}) U_A~^{-1} - compression of Q_{A,0}[I - P_ker] ||.
double verify_equivalence_undamped(const EnergyModel& model);

struct DampedResiduals {
    double residual_abs;   // against Q_{|A|,R} via U_|A~|
    double residual_proj;  // against the projected Q_{A,R} via U_A~
};

DampedResiduals verify_equivalence_damped(const EnergyModel& model, const Matrix& r);

/// || U_|A~| U_A~^{-1} - diag(I, V_{A*}) || in H_1 (+) K_A coordinates.
double verify_modulus_bridge(const EnergyModel& model);

/// Scaled forward-difference operator with Dirichlet ends: A is the
/// (N+1) x N matrix with stencil (u_i - u_{i-1})/h, h = 1/(N+1), so that
/// A*A is the tridiagonal (-1, 2, -1)/h^2 Dirichlet Laplacian.
EnergyModel dirichlet_derivative_model(int n_interior);

}  // namespace wavedirac
