#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wavedirac/damped.hpp"

using namespace wavedirac;

namespace {

QuadraticPencil scalar_pencil(double a2, double r) {
    Matrix ma(1, 1), mr(1, 1);
    ma(0, 0) = a2;
    mr(0, 0) = r;
    return make_pencil(ma, mr);
}

double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
    return worst;
}

}  // namespace

TEST_CASE("pencil evaluation at z = 0 returns the stiffness block") {
    Rng rng(71);
    const Matrix a2 = rng.psd(3);
    const QuadraticPencil p = make_pencil(a2, rng.matrix(3, 3));
    CHECK((pencil_eval(p, Complex(0, 0)) - a2).norm() < 1e-14);
}

TEST_CASE("scalar pencil arithmetic at z = i") {
    const QuadraticPencil p = scalar_pencil(1.0, 2.0);
    // M(i) = 1 - i*i*2 - i^2 = 1 + 2 + 1.
    CHECK(std::abs(pencil_eval(p, Complex(0, 1))(0, 0) - 4.0) < 1e-14);
}

TEST_CASE("pencil adjoint identity M(z)* = A2 + i conj(z) R* - conj(z)^2") {
    Rng rng(72);
    const QuadraticPencil p = make_pencil(rng.psd(4), rng.matrix(4, 4));
    const Complex z = rng.complex_box(2.0);
    const Matrix lhs = pencil_eval(p, z).adjoint();
    const Complex zc = std::conj(z);
    const Matrix rhs = p.a2 + Complex(0, 1) * zc * p.r.adjoint() -
                       zc * zc * Matrix::Identity(4, 4);
    CHECK(operator_norm(lhs - rhs) < 1e-12 * (1.0 + operator_norm(rhs)));
}

TEST_CASE("scalar pencil spectra") {
    auto spec = pencil_spectrum(scalar_pencil(1.0, 0.0));
    REQUIRE(spec.size() == 2);
    CHECK(std::abs(spec[0] - Complex(-1, 0)) < 1e-10);
    CHECK(std::abs(spec[1] - Complex(1, 0)) < 1e-10);

    // Critical damping: M(z) = -(z + i)^2.
    spec = pencil_spectrum(scalar_pencil(1.0, 2.0));
    CHECK(std::abs(spec[0] - Complex(0, -1)) < 1e-7);
    CHECK(std::abs(spec[1] - Complex(0, -1)) < 1e-7);

    Matrix a2 = Matrix::Zero(2, 2);
    a2(0, 0) = 1.0;
    a2(1, 1) = 4.0;
    const auto spec2 = pencil_spectrum(make_pencil(a2, Matrix::Zero(2, 2)));
    std::vector<double> reals;
    for (Complex z : spec2) reals.push_back(z.real());
    std::sort(reals.begin(), reals.end());
    const std::vector<double> expected = {-2.0, -1.0, 1.0, 2.0};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(reals[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("resolvent of the undamped scalar Dirac matches the direct inverse") {
    const QuadraticPencil p = scalar_pencil(1.0, 0.0);
    const DampedDirac d = make_damped_dirac(p);
    const Complex z(2.0, 0.0);
    const Matrix res = resolvent_damped(d, p, z);
    const Matrix direct =
        (d.q - z * Matrix::Identity(2, 2)).partialPivLu().solve(Matrix::Identity(2, 2));
    CHECK(operator_norm(res - direct) < 1e-12);
}

TEST_CASE("resolvent at z = 0 matches the explicit inverse block formula") {
    Rng rng(73);
    const Matrix a2 = rng.psd(3) + 0.5 * Matrix::Identity(3, 3);
    const Matrix r = rng.matrix(3, 3);
    const QuadraticPencil p = make_pencil(a2, r);
    const DampedDirac d = make_damped_dirac(p);
    const Matrix res = resolvent_damped(d, p, Complex(0, 0));
    const Matrix direct = d.q.partialPivLu().solve(Matrix::Identity(6, 6));
    CHECK(operator_norm(res - direct) < 1e-9 * (1.0 + operator_norm(direct)));

    // [[0, |A|^{-1}], [|A|^{-1}, i |A|^{-1} R |A|^{-1}]].
    const Matrix mod_inv = func_calc(
        a2, [](double x) { return Complex(1.0 / std::sqrt(x), 0.0); });
    CHECK(operator_norm(Matrix(res.topLeftCorner(3, 3))) < 1e-10);
    CHECK(operator_norm(Matrix(res.topRightCorner(3, 3)) - mod_inv) < 1e-9);
    CHECK(operator_norm(Matrix(res.bottomRightCorner(3, 3)) -
                        Complex(0, 1) * mod_inv * r * mod_inv) < 1e-9);
}

TEST_CASE("resolvent rejects spectral points and zero for singular stiffness") {
    const QuadraticPencil p = scalar_pencil(1.0, 0.0);
    const DampedDirac d = make_damped_dirac(p);
    CHECK_THROWS_WITH_AS(resolvent_damped(d, p, Complex(1.0, 0.0)),
                         "pencil spectral point", std::domain_error);

    Matrix a2 = Matrix::Zero(2, 2);
    a2(1, 1) = 1.0;
    Matrix r = Matrix::Identity(2, 2);
    const QuadraticPencil singular = make_pencil(a2, r);
    const DampedDirac ds = make_damped_dirac(singular);
    CHECK_THROWS_WITH_AS(resolvent_damped(ds, singular, Complex(0, 0)),
                         "zero in spectrum", std::domain_error);

    // Away from zero the Schur-style form still inverts Q - z.
    const Complex z(0.4, 1.3);
    const Matrix res = resolvent_damped(ds, singular, z);
    const Matrix direct =
        (ds.q - z * Matrix::Identity(4, 4)).partialPivLu().solve(Matrix::Identity(4, 4));
    CHECK(operator_norm(res - direct) < 1e-9 * (1.0 + operator_norm(direct)));
}

TEST_CASE("resolvent first column carries z M(z)^{-1} and |A| M(z)^{-1}") {
    Rng rng(74);
    const Matrix a2 = rng.psd(3) + 0.4 * Matrix::Identity(3, 3);
    const QuadraticPencil p = make_pencil(a2, rng.matrix(3, 3));
    const DampedDirac d = make_damped_dirac(p);
    const Complex z(0.7, 0.9);
    const Matrix minv =
        pencil_eval(p, z).partialPivLu().solve(Matrix::Identity(3, 3));
    const Matrix res = resolvent_damped(d, p, z);
    CHECK(operator_norm(Matrix(res.topLeftCorner(3, 3)) - z * minv) < 1e-9);
    CHECK(operator_norm(Matrix(res.bottomLeftCorner(3, 3)) - d.mod_a * minv) < 1e-9);
}

TEST_CASE("accretivity margins") {
    CHECK(accretivity_check(Matrix::Identity(2, 2)).is_accretive);
    CHECK(accretivity_check(Matrix::Identity(2, 2)).margin == doctest::Approx(1.0));

    Matrix skew(2, 2);
    skew << 0.0, 1.0, -1.0, 0.0;
    const Accretivity s = accretivity_check(skew);
    CHECK(s.is_accretive);
    CHECK(std::abs(s.margin) < 1e-12);

    const Accretivity neg = accretivity_check(-Matrix::Identity(2, 2));
    CHECK_FALSE(neg.is_accretive);
    CHECK(neg.margin == doctest::Approx(-1.0));
}

TEST_CASE("contraction semigroup basics") {
    const QuadraticPencil p = scalar_pencil(1.0, 0.0);
    const DampedDirac d = make_damped_dirac(p);
    CHECK((evolve_contraction(d, 0.0) - Matrix::Identity(2, 2)).norm() == 0.0);
    for (double t : {0.5, 2.0, 20.0}) {
        const Matrix u = evolve_contraction(d, t);
        CHECK(std::abs(operator_norm(u) - 1.0) < 1e-10);
    }
}

TEST_CASE("critically damped scalar evolution matches the nilpotent exponential") {
    const QuadraticPencil p = scalar_pencil(1.0, 2.0);
    const DampedDirac d = make_damped_dirac(p);
    const Matrix u = evolve_contraction(d, 1.0);
    // -iQ = -I + N with N^2 = 0, so exp(-iQ) = e^{-1} (I + N).
    const double e = std::exp(-1.0);
    CHECK(std::abs(u(0, 0) - 0.0) < 1e-12);
    CHECK(std::abs(u(0, 1) - Complex(0.0, -e)) < 1e-12);
    CHECK(std::abs(u(1, 0) - Complex(0.0, -e)) < 1e-12);
    CHECK(std::abs(u(1, 1) - 2.0 * e) < 1e-12);
    CHECK(operator_norm(u) <= 1.0 + 1e-12);
}

TEST_CASE("backward evolution requires a Hermitian generator") {
    const QuadraticPencil damped = scalar_pencil(1.0, 2.0);
    CHECK_THROWS_WITH_AS(evolve_contraction(make_damped_dirac(damped), -1.0),
                         "semigroup only forward in time", std::domain_error);
    const QuadraticPencil undamped = scalar_pencil(1.0, 0.0);
    const Matrix u = evolve_contraction(make_damped_dirac(undamped), -2.0);
    CHECK(std::abs(operator_norm(u) - 1.0) < 1e-10);
}

TEST_CASE("Q and the companion linearization are isospectral") {
    Rng rng(75);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.uniform(0.0, 5.0));
        const Matrix a2 = rng.psd(n) + 0.1 * Matrix::Identity(n, n);
        const Matrix r = rng.matrix(n, n);
        const QuadraticPencil p = make_pencil(a2, r);
        const DampedDirac d = make_damped_dirac(p);
        CHECK(multiset_distance(pencil_spectrum(p), dirac_spectrum(d)) < 1e-8);
    }
}

TEST_CASE("singular stiffness: spectra agree up to the point zero") {
    Rng rng(76);
    Matrix a2 = Matrix::Zero(3, 3);
    a2(1, 1) = 1.0;
    a2(2, 2) = 4.0;
    const Matrix r = rng.accretive(3);
    const QuadraticPencil p = make_pencil(a2, r);
    const DampedDirac d = make_damped_dirac(p);
    const auto pencil = pencil_spectrum(p);
    const auto dirac = dirac_spectrum(d);

    // Every nonzero pencil eigenvalue appears in sigma(Q) and vice versa;
    // zero itself belongs to sigma(M(.)) by construction.
    double zero_dist = std::numeric_limits<double>::infinity();
    for (Complex z : pencil) zero_dist = std::min(zero_dist, std::abs(z));
    CHECK(zero_dist < 1e-8);
    for (Complex z : pencil) {
        if (std::abs(z) < 1e-8) continue;
        double best = std::numeric_limits<double>::infinity();
        for (Complex w : dirac) best = std::min(best, std::abs(z - w));
        CHECK(best < 1e-8 * (1.0 + std::abs(z)));
    }
    for (Complex w : dirac) {
        if (std::abs(w) < 1e-8) continue;
        double best = std::numeric_limits<double>::infinity();
        for (Complex z : pencil) best = std::min(best, std::abs(z - w));
        CHECK(best < 1e-8 * (1.0 + std::abs(w)));
    }
}

TEST_CASE("accretive damping pushes the spectrum of -iQ into the left half plane") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 3;
        const QuadraticPencil p = make_pencil(rng.psd(n), rng.accretive(n));
        const DampedDirac d = make_damped_dirac(p);
        for (Complex z : dirac_spectrum(d)) {
            const Complex growth = Complex(0, -1) * z;  // eigenvalue of -iQ
            CHECK(growth.real() <= 1e-10);
        }
    }
}

TEST_CASE("imaginary axis solvability for accretive damping") {
    Rng rng(78);
    const Matrix a2 = rng.psd(4);
    const Matrix r = rng.accretive(4);
    const QuadraticPencil p = make_pencil(a2, r);
    for (double lambda : {0.1, 1.0, 10.0}) {
        const Matrix m = pencil_eval(p, Complex(0.0, lambda));
        Eigen::JacobiSVD<Matrix> svd(m);
        const double cond = svd.singularValues()(0) /
                            svd.singularValues()(svd.singularValues().size() - 1);
        CHECK(std::isfinite(cond));
        CHECK(svd.singularValues()(svd.singularValues().size() - 1) >
              0.9 * lambda * lambda);  // Re(f, M(i l) f) >= l^2 ||f||^2
    }
}

TEST_CASE("Neumann series route to M(i lambda)^{-1} for large lambda") {
    Rng rng(79);
    const Matrix a2 = rng.psd(3);
    const Matrix r = rng.matrix(3, 3);
    const QuadraticPencil p = make_pencil(a2, r);
    const Matrix ident = Matrix::Identity(3, 3);

    const double lambda = 40.0;
    const Matrix base = (a2 + lambda * lambda * ident).partialPivLu().solve(ident);
    const double q = lambda * operator_norm(r * base);
    REQUIRE(q < 1.0);

    Matrix series = ident;
    Matrix term = ident;
    const Matrix step = -lambda * r * base;
    for (int k = 0; k < 200 && term.norm() > 1e-17; ++k) {
        term = term * step;
        series += term;
    }
    const Matrix neumann = base * series;
    const Matrix direct =
        pencil_eval(p, Complex(0.0, lambda)).partialPivLu().solve(ident);
    CHECK(operator_norm(neumann - direct) < 1e-9 * (1.0 + operator_norm(direct)));
}
