#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wavedirac/linalg.hpp"

using namespace wavedirac;

namespace {

const double kPi = std::acos(-1.0);

Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    Matrix m(static_cast<Index>(rows.size()),
             static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (Complex v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

// Random unitary via Householder QR.
Matrix random_unitary(Rng& rng, Index n) {
    Eigen::HouseholderQR<Matrix> qr(rng.matrix(n, n));
    return qr.householderQ() * Matrix::Identity(n, n);
}

Matrix projector_onto_range(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() == 0 ? 0.0 : rank_cutoff(m.rows(), m.cols(), sv(0));
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    const Matrix u = svd.matrixU().leftCols(rank);
    return u * u.adjoint();
}

}  // namespace

TEST_CASE("adjoint is the conjugate transpose") {
    const Matrix m = from_rows({{0.0, 1.0}, {0.0, 0.0}});
    const Matrix expected = from_rows({{0.0, 0.0}, {1.0, 0.0}});
    CHECK((adjoint(m) - expected).norm() == 0.0);
    CHECK((adjoint(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("adjoint reverses products (finite-dim (TS)* = S* T*)") {
    Rng rng(11);
    const Matrix m = rng.matrix(3, 4);
    const Matrix s = rng.matrix(4, 2);
    CHECK((adjoint(m * s) - adjoint(s) * adjoint(m)).norm() < 1e-14);
}

TEST_CASE("adjoint is an involution") {
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        const Matrix m = rng.matrix(1 + i % 7, 1 + (i * 3) % 5);
        CHECK((adjoint(adjoint(m)) - m).norm() == 0.0);
    }
}

TEST_CASE("weighted adjoint with Euclidean grams is the plain adjoint") {
    const auto e3 = InnerProductSpace::euclidean(3);
    CHECK((weighted_adjoint(Matrix::Identity(3, 3), e3, e3) -
           Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("weighted adjoint of the identity chart J_A recovers A*A") {
    Rng rng(13);
    const Matrix a = rng.full_column_rank(5, 3);
    const Matrix gram = a.adjoint() * a;
    const auto dom = InnerProductSpace::euclidean(3);
    const auto ran = InnerProductSpace::weighted(gram);
    const Matrix j_dagger =
        weighted_adjoint(Matrix::Identity(3, 3), dom, ran);
    CHECK(operator_norm(j_dagger - gram) < 1e-10 * (1.0 + gram.norm()));

    // The defining pairing over random vectors.
    for (int k = 0; k < 100; ++k) {
        const Vector f = rng.vector(3), g = rng.vector(3);
        const Complex lhs = ran.inner(f, g);
        const Complex rhs = dom.inner(f, j_dagger * g);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("weighted adjoint satisfies the pairing identity for random grams") {
    Rng rng(14);
    const Index n = 4, m = 3;
    const auto dom = InnerProductSpace::weighted(
        rng.psd(n) + 0.5 * Matrix::Identity(n, n));
    const auto ran = InnerProductSpace::weighted(
        rng.psd(m) + 0.5 * Matrix::Identity(m, m));
    const Matrix op = rng.matrix(m, n);
    const Matrix dagger = weighted_adjoint(op, dom, ran);
    for (int k = 0; k < 100; ++k) {
        const Vector f = rng.vector(n), g = rng.vector(m);
        const Complex lhs = ran.inner(op * f, g);
        const Complex rhs = dom.inner(f, dagger * g);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
    }
    // Involution under swap of the spaces.
    const Matrix twice = weighted_adjoint(dagger, ran, dom);
    CHECK(operator_norm(twice - op) < 1e-10 * (1.0 + op.norm()));
}

TEST_CASE("degenerate gram matrices are rejected") {
    Matrix gram = Matrix::Zero(2, 2);
    gram(0, 0) = 1.0;  // singular
    CHECK_THROWS_WITH_AS(InnerProductSpace::weighted(gram),
                         "degenerate inner product", std::invalid_argument);
    Matrix skew = from_rows({{0.0, 1.0}, {-1.0, 0.0}});
    CHECK_THROWS_AS(InnerProductSpace::weighted(skew), std::invalid_argument);
}

TEST_CASE("polar decomposition of a positive diagonal") {
    const Matrix t = from_rows({{2.0, 0.0}, {0.0, 3.0}});
    const PolarParts p = polar_decompose(t);
    CHECK((p.partial_isometry - Matrix::Identity(2, 2)).norm() < 1e-14);
    CHECK((p.modulus - t).norm() < 1e-14);
}

TEST_CASE("polar decomposition of a nilpotent shift") {
    const Matrix t = from_rows({{0.0, 1.0}, {0.0, 0.0}});
    const PolarParts p = polar_decompose(t);
    CHECK((p.modulus - from_rows({{0.0, 0.0}, {0.0, 1.0}})).norm() < 1e-14);
    CHECK((p.comodulus - from_rows({{1.0, 0.0}, {0.0, 0.0}})).norm() < 1e-14);
    CHECK((p.partial_isometry - t).norm() < 1e-14);
    CHECK((p.partial_isometry * p.modulus - t).norm() < 1e-14);
}

TEST_CASE("full-rank polar factor matches T (T*T)^{-1/2}") {
    Rng rng(15);
    const Matrix t = rng.full_column_rank(4, 4);
    const PolarParts p = polar_decompose(t);
    CHECK(operator_norm(p.partial_isometry.adjoint() * p.partial_isometry -
                        Matrix::Identity(4, 4)) < 1e-10);
    const Matrix direct =
        t * func_calc(t.adjoint() * t,
                      [](double x) { return Complex(1.0 / std::sqrt(x), 0.0); });
    CHECK(operator_norm(p.partial_isometry - direct) < 1e-10);
}

TEST_CASE("polar identities hold on random matrices, rank-deficient included") {
    Rng rng(16);
    for (int trial = 0; trial < 100; ++trial) {
        const Index rows = 1 + static_cast<Index>(rng.uniform(0.0, 16.0));
        const Index cols = 1 + static_cast<Index>(rng.uniform(0.0, 16.0));
        Matrix t = rng.matrix(rows, cols);
        if (trial % 3 == 0) {
            // Force rank deficiency through a low-rank product.
            const Index k = std::max<Index>(1, std::min(rows, cols) / 2);
            t = rng.matrix(rows, k) * rng.matrix(k, cols);
        }
        const PolarParts p = polar_decompose(t);
        const Matrix& v = p.partial_isometry;
        const double scale = 1.0 + t.norm();

        CHECK(operator_norm(t - v * p.modulus) < 1e-10 * scale);
        CHECK(operator_norm(t - p.comodulus * v) < 1e-10 * scale);
        CHECK(operator_norm(t.adjoint() - v.adjoint() * p.comodulus) < 1e-10 * scale);
        CHECK(operator_norm(t.adjoint() - p.modulus * v.adjoint()) < 1e-10 * scale);
        CHECK(operator_norm(p.modulus - v.adjoint() * t) < 1e-10 * scale);
        CHECK(operator_norm(p.modulus - t.adjoint() * v) < 1e-10 * scale);
        CHECK(operator_norm(p.comodulus - v * t.adjoint()) < 1e-10 * scale);
        CHECK(operator_norm(p.comodulus - t * v.adjoint()) < 1e-10 * scale);

        // V*V and VV* are the range projections of |T| and T.
        CHECK(operator_norm(v.adjoint() * v - projector_onto_range(p.modulus)) <
              1e-10 * scale);
        CHECK(operator_norm(v * v.adjoint() - projector_onto_range(t)) <
              1e-10 * scale);
    }
}

TEST_CASE("hermitian_eig sorts eigenvalues ascending") {
    const Matrix s = from_rows({{3.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 2.0}});
    const HermitianSpectrum spec = hermitian_eig(s);
    CHECK(spec.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(spec.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(spec.eigenvalues(2) == doctest::Approx(3.0));
}

TEST_CASE("hermitian_eig matches the characteristic polynomial of [[2,1],[1,2]]") {
    const Matrix s = from_rows({{2.0, 1.0}, {1.0, 2.0}});
    const HermitianSpectrum spec = hermitian_eig(s);
    CHECK(spec.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.eigenvalues(1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("discrete Dirichlet Laplacian eigenvalues match the closed form") {
    const int n = 50;
    const double h = 1.0 / (n + 1);
    Matrix lap = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        lap(i, i) = 2.0 / (h * h);
        if (i > 0) lap(i, i - 1) = -1.0 / (h * h);
        if (i + 1 < n) lap(i, i + 1) = -1.0 / (h * h);
    }
    const HermitianSpectrum spec = hermitian_eig(lap);
    for (int k = 1; k <= n; ++k) {
        const double exact =
            (4.0 / (h * h)) * std::pow(std::sin(k * kPi * h / 2.0), 2);
        CHECK(spec.eigenvalues(k - 1) ==
              doctest::Approx(exact).epsilon(1e-9));
    }
    // Reconstruction residual contract.
    CHECK(operator_norm(spec.reconstruct() - lap) < 1e-10 * lap.norm());
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    const Matrix bad = from_rows({{0.0, 1.0}, {0.0, 0.0}});
    CHECK_THROWS_WITH_AS(hermitian_eig(bad), "not Hermitian", std::invalid_argument);
}

TEST_CASE("functional calculus on diagonal matrices") {
    const Matrix s = from_rows({{1.0, 0.0}, {0.0, 4.0}});
    CHECK(operator_norm(func_calc(s, [](double x) { return Complex(x, 0); }) - s) <
          1e-10);
    const Matrix root = func_calc(s, [](double x) { return Complex(std::sqrt(x), 0); });
    CHECK(operator_norm(root - from_rows({{1.0, 0.0}, {0.0, 2.0}})) < 1e-12);

    const Matrix c = func_calc(from_rows({{1.0, 0.0}, {0.0, 2.0}}),
                               [](double x) { return Complex(std::cos(kPi * x), 0); });
    CHECK(c(0, 0).real() == doctest::Approx(-1.0));
    CHECK(c(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("functional calculus is multiplicative") {
    Rng rng(17);
    const Matrix s = rng.hermitian(5);
    const HermitianSpectrum spec = hermitian_eig(s);
    auto phi = [](double x) { return Complex(std::exp(-x * x), 0.0); };
    auto psi = [](double x) { return Complex(std::cos(x), std::sin(x)); };
    auto both = [&](double x) { return phi(x) * psi(x); };
    CHECK(operator_norm(spec.apply(both) - spec.apply(phi) * spec.apply(psi)) < 1e-10);
}

TEST_CASE("functional calculus rejects functions undefined on the spectrum") {
    Matrix s = Matrix::Zero(2, 2);
    s(1, 1) = 1.0;
    CHECK_THROWS_WITH_AS(
        func_calc(s, [](double x) { return Complex(1.0 / x, 0); }),
        "function undefined on spectrum", std::domain_error);
}

TEST_CASE("matrix exponential basics") {
    CHECK((matrix_exp(Matrix::Zero(3, 3), 2.5) - Matrix::Identity(3, 3)).norm() ==
          0.0);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = Complex(0.3, 0.0);
    d(1, 1) = Complex(-1.2, 0.4);
    const Matrix e = matrix_exp(d, 1.0);
    CHECK(std::abs(e(0, 0) - std::exp(Complex(0.3, 0.0))) < 1e-12);
    CHECK(std::abs(e(1, 1) - std::exp(Complex(-1.2, 0.4))) < 1e-12);
}

TEST_CASE("matrix exponential of a nilpotent matrix terminates the series") {
    const Matrix n = from_rows({{0.0, 1.0}, {0.0, 0.0}});
    for (double t : {0.25, 1.0, 7.5}) {
        const Matrix e = matrix_exp(n, t);
        CHECK(std::abs(e(0, 0) - 1.0) < 1e-13);
        CHECK(std::abs(e(0, 1) - t) < 1e-13 * (1.0 + t));
        CHECK(std::abs(e(1, 0)) < 1e-13);
        CHECK(std::abs(e(1, 1) - 1.0) < 1e-13);
    }
}

TEST_CASE("semigroup property exp((s+t)M) = exp(sM) exp(tM)") {
    Rng rng(18);
    const Matrix m = rng.matrix(6, 6);
    const double s = 0.7, t = 1.9;
    const Matrix lhs = matrix_exp(m, s + t);
    const Matrix rhs = matrix_exp(m, s) * matrix_exp(m, t);
    CHECK(operator_norm(lhs - rhs) < 1e-9 * (1.0 + operator_norm(lhs)));
}

TEST_CASE("exponential of a skew-Hermitian matrix is unitary") {
    Rng rng(19);
    Matrix m = rng.matrix(5, 5);
    m = 0.5 * (m - m.adjoint()).eval();
    for (double t : {0.1, 1.0, 10.0}) {
        const Matrix u = matrix_exp(m, t);
        CHECK(operator_norm(u.adjoint() * u - Matrix::Identity(5, 5)) < 1e-10);
    }
}

TEST_CASE("diagonalization and Pade routes agree on normal matrices") {
    Rng rng(20);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 5;
        const Matrix u = random_unitary(rng, n);
        Vector d(n);
        for (Index i = 0; i < n; ++i) d(i) = rng.complex_box(2.0);
        const Matrix normal = u * d.asDiagonal() * u.adjoint();
        REQUIRE(is_normal(normal));
        const Matrix a = matrix_exp_diagonalize(normal);
        const Matrix b = matrix_exp_pade(normal);
        CHECK(operator_norm(a - b) < 1e-9 * (1.0 + operator_norm(a)));
    }
}
