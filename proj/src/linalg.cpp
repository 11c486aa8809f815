#include "wavedirac/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wavedirac {

namespace {

constexpr double kHermTol = 1e-10;

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

}  // namespace

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double rank_cutoff(Index rows, Index cols, double sigma_max) {
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * sigma_max;
}

Matrix Rng::full_column_rank(Index rows, Index cols, double min_sigma) {
    if (rows < cols) throw std::invalid_argument("full_column_rank needs rows >= cols");
    for (;;) {
        Matrix m = matrix(rows, cols);
        Eigen::JacobiSVD<Matrix> svd(m);
        if (svd.singularValues()(cols - 1) > min_sigma) return m;
    }
}

InnerProductSpace InnerProductSpace::euclidean(Index n) {
    return {n, Matrix::Identity(n, n)};
}

InnerProductSpace InnerProductSpace::weighted(Matrix gram) {
    if (gram.rows() != gram.cols() || gram.rows() < 1)
        throw std::invalid_argument("degenerate inner product");
    const double scale = gram.norm();
    if ((gram - gram.adjoint()).norm() > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("degenerate inner product");
    gram = 0.5 * (gram + gram.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0.0)
        throw std::invalid_argument("degenerate inner product");
    return {gram.rows(), std::move(gram)};
}

Complex InnerProductSpace::inner(const Vector& f, const Vector& g) const {
    return (f.adjoint() * gram * g)(0, 0);
}

double InnerProductSpace::norm(const Vector& f) const {
    return std::sqrt(std::abs(inner(f, f)));
}

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

Matrix weighted_adjoint(const Matrix& m, const InnerProductSpace& domain,
                        const InnerProductSpace& range) {
    if (m.cols() != domain.dim || m.rows() != range.dim)
        throw std::invalid_argument("operator does not map domain into range");
    return domain.gram.ldlt().solve(m.adjoint() * range.gram);
}

PolarParts polar_decompose(const Matrix& t) {
    auto svd = full_svd(t);
    const auto& sv = svd.singularValues();
    const double cutoff =
        sv.size() == 0 ? 0.0 : rank_cutoff(t.rows(), t.cols(), sv(0));

    // V_T = sum_{sigma_i > cutoff} u_i v_i^*, zero on ker(T).
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    Matrix vt = svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).adjoint();

    Matrix sigma_v = Matrix::Zero(t.cols(), t.cols());
    Matrix sigma_u = Matrix::Zero(t.rows(), t.rows());
    for (Index i = 0; i < sv.size(); ++i) {
        sigma_v(i, i) = sv(i);
        sigma_u(i, i) = sv(i);
    }
    Matrix modulus = svd.matrixV() * sigma_v * svd.matrixV().adjoint();
    Matrix comodulus = svd.matrixU() * sigma_u * svd.matrixU().adjoint();
    return {std::move(vt), std::move(modulus), std::move(comodulus)};
}

HermitianSpectrum hermitian_eig(const Matrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("not Hermitian");
    const double scale = s.norm();
    if ((s - s.adjoint()).norm() > kHermTol * (1.0 + scale))
        throw std::invalid_argument("not Hermitian");
    Matrix sym = 0.5 * (s + s.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix HermitianSpectrum::reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() *
           eigenvectors.adjoint();
}

Matrix HermitianSpectrum::apply(const SpectralFunction& phi) const {
    Vector values(eigenvalues.size());
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const Complex w = phi(eigenvalues(i));
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            throw std::domain_error("function undefined on spectrum");
        values(i) = w;
    }
    return eigenvectors * values.asDiagonal() * eigenvectors.adjoint();
}

Matrix func_calc(const Matrix& s, const SpectralFunction& phi) {
    return hermitian_eig(s).apply(phi);
}

Matrix func_calc(const HermitianSpectrum& spec, const SpectralFunction& phi) {
    return spec.apply(phi);
}

Matrix hermitian_sqrt(const Matrix& s) {
    return func_calc(s, [](double x) {
        // Clamp eigenvalue noise of PSD inputs.
        return Complex(std::sqrt(std::max(x, 0.0)), 0.0);
    });
}

bool is_normal(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = m.norm();
    return (m * m.adjoint() - m.adjoint() * m).norm() <= tol * (1.0 + scale * scale);
}

namespace {

// Pade approximants of exp with the scaling thresholds from the standard
// double-precision scaling-and-squaring method.
Matrix pade_solve(const Matrix& u, const Matrix& v) {
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade3(const Matrix& a, const Matrix& a2) {
    const Matrix ident = Matrix::Identity(a.rows(), a.cols());
    Matrix u = a * (a2 + 60.0 * ident);
    Matrix v = 12.0 * a2 + 120.0 * ident;
    return pade_solve(u, v);
}

Matrix pade5(const Matrix& a, const Matrix& a2, const Matrix& a4) {
    const Matrix ident = Matrix::Identity(a.rows(), a.cols());
    Matrix u = a * (a4 + 420.0 * a2 + 15120.0 * ident);
    Matrix v = 30.0 * a4 + 3360.0 * a2 + 30240.0 * ident;
    return pade_solve(u, v);
}

Matrix pade7(const Matrix& a, const Matrix& a2, const Matrix& a4, const Matrix& a6) {
    const Matrix ident = Matrix::Identity(a.rows(), a.cols());
    Matrix u = a * (a6 + 1512.0 * a4 + 277200.0 * a2 + 8648640.0 * ident);
    Matrix v = 56.0 * a6 + 25200.0 * a4 + 1995840.0 * a2 + 17297280.0 * ident;
    return pade_solve(u, v);
}

Matrix pade9(const Matrix& a, const Matrix& a2, const Matrix& a4, const Matrix& a6) {
    const Matrix ident = Matrix::Identity(a.rows(), a.cols());
    const Matrix a8 = a4 * a4;
    Matrix u = a * (a8 + 3960.0 * a6 + 2162160.0 * a4 + 302702400.0 * a2 +
                    8821612800.0 * ident);
    Matrix v = 90.0 * a8 + 110880.0 * a6 + 30270240.0 * a4 + 2075673600.0 * a2 +
               17643225600.0 * ident;
    return pade_solve(u, v);
}

Matrix pade13(const Matrix& a, const Matrix& a2, const Matrix& a4, const Matrix& a6) {
    const Matrix ident = Matrix::Identity(a.rows(), a.cols());
    Matrix u = a * (a6 * (a6 + 16380.0 * a4 + 40840800.0 * a2) +
                    33522128640.0 * a6 + 10559470521600.0 * a4 +
                    1187353796428800.0 * a2 + 32382376266240000.0 * ident);
    Matrix v = a6 * (182.0 * a6 + 960960.0 * a4 + 1323241920.0 * a2) +
               670442572800.0 * a6 + 129060195264000.0 * a4 +
               7771770303897600.0 * a2 + 64764752532480000.0 * ident;
    return pade_solve(u, v);
}

}  // namespace

Matrix matrix_exp_pade(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exp needs a square matrix");
    const Index n = m.rows();
    const double norm = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
    if (norm == 0.0) return Matrix::Identity(n, n);

    const Matrix a2 = m * m;
    if (norm <= 1.495585217958292e-2) return pade3(m, a2);
    const Matrix a4 = a2 * a2;
    if (norm <= 2.539398330063230e-1) return pade5(m, a2, a4);
    const Matrix a6 = a4 * a2;
    if (norm <= 9.504178996162932e-1) return pade7(m, a2, a4, a6);
    if (norm <= 2.097847961257068e0) return pade9(m, a2, a4, a6);

    const double theta13 = 5.371920351148152e0;
    int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const double scale = std::ldexp(1.0, -squarings);
    const Matrix ms = m * scale;
    Matrix result = pade13(ms, (a2 * (scale * scale)).eval(),
                           (a4 * (scale * scale * scale * scale)).eval(),
                           (a6 * std::pow(scale, 6)).eval());
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

Matrix matrix_exp_diagonalize(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exp needs a square matrix");
    Eigen::ComplexEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) return matrix_exp_pade(m);
    const Matrix& vecs = es.eigenvectors();
    Eigen::JacobiSVD<Matrix> svd(vecs);
    const auto& sv = svd.singularValues();
    // Ill-conditioned eigenbasis: the similarity transform would amplify
    // rounding, defer to the Pade route.
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e8)
        return matrix_exp_pade(m);
    Vector expvals = es.eigenvalues().array().exp();
    return vecs * expvals.asDiagonal() * vecs.partialPivLu().solve(
               Matrix::Identity(m.rows(), m.cols()));
}

Matrix matrix_exp(const Matrix& m, double t) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exp needs a square matrix");
    if (t == 0.0 || m.size() == 0 || m.norm() == 0.0)
        return Matrix::Identity(m.rows(), m.cols());
    const Matrix tm = t * m;
    if (is_normal(tm)) return matrix_exp_diagonalize(tm);
    return matrix_exp_pade(tm);
}

}  // namespace wavedirac
