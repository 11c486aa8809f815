#include "wavedirac/susy.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace wavedirac {

namespace {

Matrix resolvent_of(const HermitianSpectrum& spec, Complex z) {
    Vector values(spec.eigenvalues.size());
    for (Index i = 0; i < spec.eigenvalues.size(); ++i)
        values(i) = 1.0 / (spec.eigenvalues(i) - z);
    return spec.eigenvectors * values.asDiagonal() * spec.eigenvectors.adjoint();
}

double distance_to_spectrum(const HermitianSpectrum& spec, Complex z) {
    double dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < spec.eigenvalues.size(); ++i)
        dist = std::min(dist, std::abs(z - Complex(spec.eigenvalues(i), 0.0)));
    return dist;
}

}  // namespace

Matrix SuperchargeSystem::sigma3() const {
    Matrix s = Matrix::Identity(total(), total());
    s.bottomRightCorner(m(), m()) *= -1.0;
    return s;
}

Matrix SuperchargeSystem::kernel_projection() const {
    // P_ker(T) = I - V_T* V_T, P_ker(T*) = I - V_T V_T* (Nelson's identities).
    const Matrix& vt = polar.partial_isometry;
    Matrix p = Matrix::Zero(total(), total());
    p.topLeftCorner(n(), n()) = Matrix::Identity(n(), n()) - vt.adjoint() * vt;
    p.bottomRightCorner(m(), m()) = Matrix::Identity(m(), m()) - vt * vt.adjoint();
    return p;
}

Matrix SuperchargeSystem::block_partial_isometry() const {
    Matrix v = Matrix::Zero(total(), total());
    v.topRightCorner(n(), m()) = polar.partial_isometry.adjoint();
    v.bottomLeftCorner(m(), n()) = polar.partial_isometry;
    return v;
}

SuperchargeSystem build_supercharge(const Matrix& t) {
    if (!all_finite(t)) throw std::invalid_argument("non-finite entries");
    const Index n = t.cols(), m = t.rows();
    Matrix q = Matrix::Zero(n + m, n + m);
    q.topRightCorner(n, m) = t.adjoint();
    q.bottomLeftCorner(m, n) = t;
    Matrix h1 = t.adjoint() * t;
    Matrix h2 = t * t.adjoint();
    HermitianSpectrum s1 = hermitian_eig(h1);
    HermitianSpectrum s2 = hermitian_eig(h2);
    return {t, std::move(q), std::move(h1), std::move(h2),
            polar_decompose(t), std::move(s1), std::move(s2)};
}

double check_intertwining(const SuperchargeSystem& sys, const SpectralFunction& phi) {
    const Matrix lhs = sys.polar.partial_isometry * sys.spec_h1.apply(phi);
    const Matrix rhs = sys.spec_h2.apply(phi) * sys.polar.partial_isometry;
    return operator_norm(lhs - rhs);
}

Matrix resolvent_q(const SuperchargeSystem& sys, Complex zeta) {
    const Complex z2 = zeta * zeta;
    const double guard = 1e-8 * (1.0 + std::abs(z2));
    if (distance_to_spectrum(sys.spec_h1, z2) < guard ||
        distance_to_spectrum(sys.spec_h2, z2) < guard)
        throw std::domain_error("spectral point");

    const Matrix r1 = resolvent_of(sys.spec_h1, z2);
    const Matrix r2 = resolvent_of(sys.spec_h2, z2);
    const Index n = sys.n(), m = sys.m();
    Matrix res(n + m, n + m);
    res.topLeftCorner(n, n) = zeta * r1;
    res.topRightCorner(n, m) = sys.T.adjoint() * r2;
    res.bottomLeftCorner(m, n) = sys.T * r1;
    res.bottomRightCorner(m, m) = zeta * r2;
    return res;
}

SuperchargeDiagonalization diagonalize_supercharge(const SuperchargeSystem& sys) {
    const Index n = sys.n(), m = sys.m();
    const Matrix& vt = sys.polar.partial_isometry;

    Matrix u = Matrix::Zero(n + m, n + m);
    u.topLeftCorner(n, n) = Matrix::Identity(n, n);
    u.topRightCorner(n, m) = vt.adjoint();
    u.bottomLeftCorner(m, n) = -vt;
    u.bottomRightCorner(m, m) = Matrix::Identity(m, m);
    u *= 1.0 / std::sqrt(2.0);

    Matrix d = Matrix::Zero(n + m, n + m);
    d.topLeftCorner(n, n) = sys.polar.modulus;
    d.bottomRightCorner(m, m) = -sys.polar.comodulus;

    // Block-adapted basis of (ker Q)^perp = (ker T)^perp (+) (ker T*)^perp,
    // from the singular vectors of T.
    Eigen::JacobiSVD<Matrix> svd(sys.T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff =
        sv.size() == 0 ? 0.0 : rank_cutoff(sys.T.rows(), sys.T.cols(), sv(0));
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    Matrix basis = Matrix::Zero(n + m, 2 * rank);
    basis.block(0, 0, n, rank) = svd.matrixV().leftCols(rank);
    basis.block(n, rank, m, rank) = svd.matrixU().leftCols(rank);
    return {std::move(u), std::move(d), std::move(basis)};
}

double check_nelson_symmetry(const SuperchargeSystem& sys) {
    const Matrix s3 = sys.sigma3();
    return ((s3 * sys.Q * s3 + sys.Q).cwiseAbs()).maxCoeff();
}

Vector eigen_transfer(const SuperchargeSystem& sys, const Vector& f, double lambda) {
    if (lambda == 0.0) throw std::domain_error("transfer undefined at zero");
    const double l2 = lambda * lambda;
    if ((sys.H1 * f - l2 * f).norm() > 1e-8 * (1.0 + l2) * f.norm())
        throw std::invalid_argument("not an H1 eigenvector for lambda^2");

    Vector g = sys.T * f;
    if ((sys.H2 * g - l2 * g).norm() > 1e-9 * (1.0 + l2) * (1.0 + g.norm()))
        throw std::logic_error("transferred vector fails H2 eigen relation");

    Vector qvec(sys.total());
    qvec.head(sys.n()) = f;
    qvec.tail(sys.m()) = g / lambda;
    if ((sys.Q * qvec - lambda * qvec).norm() >
        1e-9 * (1.0 + std::abs(lambda)) * qvec.norm())
        throw std::logic_error("supercharge eigenvector relation fails");
    return g;
}

}  // namespace wavedirac
