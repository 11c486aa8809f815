#include "wavedirac/damped.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace wavedirac {

namespace {

// Parlett-Reinsch balancing with radix-2 scale factors: D^{-1} M D has more
// nearly equal row/column norms, which steadies the QR iteration. Returns the
// diagonal scale for mapping eigenvectors back.
RealVector balance(Matrix& m) {
    const Index n = m.rows();
    RealVector scale = RealVector::Ones(n);
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Index i = 0; i < n; ++i) {
            double col = 0.0, row = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j == i) continue;
                col += std::abs(m(j, i));
                row += std::abs(m(i, j));
            }
            if (col == 0.0 || row == 0.0) continue;
            double f = 1.0;
            const double s = col + row;
            while (col < row / 2.0) {
                col *= 2.0;
                row /= 2.0;
                f *= 2.0;
            }
            while (col >= row * 2.0) {
                col /= 2.0;
                row *= 2.0;
                f /= 2.0;
            }
            if ((col + row) < 0.95 * s && f != 1.0) {
                converged = false;
                scale(i) *= f;
                m.col(i) *= f;
                m.row(i) /= f;
            }
        }
    }
    return scale;
}

std::vector<Complex> checked_eigenvalues(const Matrix& m) {
    Matrix balanced = m;
    const RealVector scale = balance(balanced);
    Eigen::ComplexEigenSolver<Matrix> es(balanced);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("complex eigensolver failed");
    const double norm = operator_norm(m);
    std::vector<Complex> values(static_cast<size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) {
        const Complex z = es.eigenvalues()(i);
        Vector v = es.eigenvectors().col(i);
        v.array() *= scale.array().cast<Complex>();  // undo the balancing
        v.normalize();
        if ((m * v - z * v).norm() > 1e-8 * (1.0 + norm))
            throw std::runtime_error("eigenpair residual too large");
        values[static_cast<size_t>(i)] = z;
    }
    std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return values;
}

bool a2_invertible(const QuadraticPencil& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.a2, Eigen::EigenvaluesOnly);
    const double top = std::max(es.eigenvalues()(p.dim() - 1), 0.0);
    return es.eigenvalues()(0) > rank_cutoff(p.dim(), p.dim(), top);
}

}  // namespace

QuadraticPencil make_pencil(Matrix a2, Matrix r) {
    if (a2.rows() != a2.cols() || r.rows() != r.cols() || a2.rows() != r.rows())
        throw std::invalid_argument("pencil blocks must be square and matching");
    const double scale = a2.norm();
    if ((a2 - a2.adjoint()).norm() > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("pencil A2 block must be Hermitian");
    a2 = 0.5 * (a2 + a2.adjoint()).eval();
    return {std::move(a2), std::move(r)};
}

Matrix pencil_eval(const QuadraticPencil& p, Complex z) {
    const Complex iz = Complex(0.0, 1.0) * z;
    return p.a2 - iz * p.r -
           z * z * Matrix::Identity(p.dim(), p.dim());
}

std::vector<Complex> pencil_spectrum(const QuadraticPencil& p) {
    const Index n = p.dim();
    Matrix companion = Matrix::Zero(2 * n, 2 * n);
    companion.topRightCorner(n, n) = Matrix::Identity(n, n);
    companion.bottomLeftCorner(n, n) = p.a2;
    companion.bottomRightCorner(n, n) = Complex(0.0, -1.0) * p.r;
    return checked_eigenvalues(companion);
}

Matrix DampedDirac::damping() const {
    return Complex(0.0, 1.0) * q.topLeftCorner(n(), n());
}

DampedDirac make_damped_dirac(const QuadraticPencil& p) {
    const Index n = p.dim();
    Matrix mod = hermitian_sqrt(p.a2);
    Matrix q = Matrix::Zero(2 * n, 2 * n);
    q.topLeftCorner(n, n) = Complex(0.0, -1.0) * p.r;
    q.topRightCorner(n, n) = mod;
    q.bottomLeftCorner(n, n) = mod;
    return {std::move(q), std::move(mod)};
}

std::vector<Complex> dirac_spectrum(const DampedDirac& d) {
    return checked_eigenvalues(d.q);
}

Matrix resolvent_damped(const DampedDirac& d, const QuadraticPencil& p, Complex z) {
    const Index n = p.dim();
    const bool invertible = a2_invertible(p);
    if (z == 0.0 && !invertible) throw std::domain_error("zero in spectrum");

    double dist = std::numeric_limits<double>::infinity();
    for (Complex w : pencil_spectrum(p)) dist = std::min(dist, std::abs(w - z));
    if (dist < 1e-8 * (1.0 + std::abs(z)))
        throw std::domain_error("pencil spectral point");

    const Matrix ident = Matrix::Identity(n, n);
    const Matrix minv = pencil_eval(p, z).partialPivLu().solve(ident);
    const Matrix& mod = d.mod_a;
    const Complex i(0.0, 1.0);

    Matrix res(2 * n, 2 * n);
    res.topLeftCorner(n, n) = z * minv;
    res.bottomLeftCorner(n, n) = mod * minv;
    if (invertible) {
        const Matrix mod_inv =
            func_calc(p.a2, [](double x) { return Complex(1.0 / std::sqrt(x), 0.0); });
        res.topRightCorner(n, n) =
            mod_inv + minv * (i * z * p.r + z * z * ident) * mod_inv;
        res.bottomRightCorner(n, n) = mod * minv * (i * p.r + z * ident) * mod_inv;
        if (z != 0.0) {
            // The Schur-style form applies too; the two must agree.
            Matrix alt(2 * n, 2 * n);
            alt.topLeftCorner(n, n) = res.topLeftCorner(n, n);
            alt.bottomLeftCorner(n, n) = res.bottomLeftCorner(n, n);
            alt.topRightCorner(n, n) = minv * mod;
            alt.bottomRightCorner(n, n) = (mod * minv * mod - ident) / z;
            const double scale = 1.0 + operator_norm(res);
            if (operator_norm(res - alt) > 1e-9 * scale)
                throw std::logic_error("resolvent block forms disagree");
        }
    } else {
        res.topRightCorner(n, n) = minv * mod;
        res.bottomRightCorner(n, n) = (mod * minv * mod - ident) / z;
    }
    return res;
}

Accretivity accretivity_check(const Matrix& r) {
    Matrix herm = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    const double margin = es.eigenvalues()(0);
    return {margin >= -1e-12, margin};
}

Matrix evolve_contraction(const DampedDirac& d, double t) {
    if (t < 0.0) {
        const double herm_defect = (d.q - d.q.adjoint()).norm();
        if (herm_defect > 1e-12 * (1.0 + d.q.norm()))
            throw std::domain_error("semigroup only forward in time");
    }
    const Matrix propagator = matrix_exp(Complex(0.0, -1.0) * d.q, t);
    if (accretivity_check(d.damping()).is_accretive && t >= 0.0) {
        if (operator_norm(propagator) > 1.0 + 1e-9)
            throw std::logic_error("contraction bound violated");
    }
    return propagator;
}

}  // namespace wavedirac
