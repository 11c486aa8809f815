#pragma once

#include <vector>

#include "wavedirac/linalg.hpp"

namespace wavedirac {

/// Quadratic operator pencil M(z) = A2 - i z R - z^2 I with A2 = |A|^2
/// Hermitian positive semidefinite.
struct QuadraticPencil {
    Matrix a2;
    Matrix r;

    Index dim() const { return a2.rows(); }
};

QuadraticPencil make_pencil(Matrix a2, Matrix r);

Matrix pencil_eval(const QuadraticPencil& p, Complex z);

/// Pencil eigenvalues from the companion linearization [[0, I], [A2, -iR]]
/// (a two-path counterpart to the spectrum of the damped Dirac operator).
/// Sorted lexicographically by (Re, Im); each pair passes the residual check
/// ||C v - z v|| <= 1e-8 ||C||.
std::vector<Complex> pencil_spectrum(const QuadraticPencil& p);

/// Damped Dirac operator Q = [[-iR, |A|], [|A|, 0]].
struct DampedDirac {
    Matrix q;      // 2n x 2n
    Matrix mod_a;  // |A| = A2^{1/2}

    Index n() const { return mod_a.rows(); }
    Matrix damping() const;  // recovers R from the top-left block
};

DampedDirac make_damped_dirac(const QuadraticPencil& p);

/// Eigenvalues of Q itself (general complex eigensolver), same ordering and
/// residual contract as pencil_spectrum.
std::vector<Complex> dirac_spectrum(const DampedDirac& d);

/// Block resolvent (Q - z)^{-1} through the pencil inverse. An invertible A2
/// admits every z (the M(z)^{-1}-based block formula, including z = 0); a
/// singular A2 uses the z != 0 form only. z within 1e-8 (1 + |z|) of the
/// pencil spectrum raises std::domain_error("pencil spectral point"); z = 0
/// with singular A2 raises std::domain_error("zero in spectrum").
Matrix resolvent_damped(const DampedDirac& d, const QuadraticPencil& p, Complex z);

struct Accretivity {
    bool is_accretive;
    double margin;  // smallest eigenvalue of (R + R*)/2
};

Accretivity accretivity_check(const Matrix& r);

/// exp(-i Q t) for t >= 0. Accretive damping implies a contraction and the
/// norm bound ||exp|| <= 1 + 1e-9 is enforced. Negative t is rejected for
/// non-Hermitian Q ("semigroup only forward in time").
Matrix evolve_contraction(const DampedDirac& d, double t);

}  // namespace wavedirac
