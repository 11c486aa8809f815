#include "wavedirac/energy.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace wavedirac {

namespace {

Matrix inverse_modulus(const EnergyModel& model) {
    return func_calc(model.gram, [](double x) {
        return Complex(1.0 / std::sqrt(x), 0.0);
    });
}

Matrix block2(const Matrix& a11, const Matrix& a12, const Matrix& a21,
              const Matrix& a22) {
    Matrix b(a11.rows() + a21.rows(), a11.cols() + a12.cols());
    b << a11, a12, a21, a22;
    return b;
}

}  // namespace

EnergyModel build_energy_model(const Matrix& a) {
    if (!all_finite(a)) throw std::invalid_argument("non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_cutoff(a.rows(), a.cols(), sv(0));
    if (sv(sv.size() - 1) <= cutoff)
        throw std::invalid_argument("kernel nontrivial");
    const double kappa = sv(0) / sv(sv.size() - 1);
    if (kappa * kappa > 1e12)
        throw std::invalid_argument("condition number guard exceeded");

    Matrix gram = a.adjoint() * a;
    gram = 0.5 * (gram + gram.adjoint()).eval();
    Matrix basis = svd.matrixU();
    Matrix tilde = basis.adjoint() * a;
    Matrix modulus = hermitian_sqrt(gram);
    auto space = InnerProductSpace::weighted(gram);
    return {a, std::move(gram), std::move(basis), std::move(tilde),
            std::move(modulus), std::move(space)};
}

Matrix build_block_unitary(const EnergyModel& model) {
    const Index n = model.n();
    const Complex mi(0.0, -1.0);
    return block2(Matrix::Zero(n, n), Matrix::Identity(n, n),
                  mi * model.tilde_a, Matrix::Zero(n, n));
}

Matrix block_unitary_inverse(const EnergyModel& model) {
    const Index n = model.n();
    const Complex pi(0.0, 1.0);
    Matrix tilde_inv = model.tilde_a.partialPivLu().solve(Matrix::Identity(n, n));
    return block2(Matrix::Zero(n, n), pi * tilde_inv,
                  Matrix::Identity(n, n), Matrix::Zero(n, n));
}

Matrix modulus_unitary(const EnergyModel& model) {
    const Index n = model.n();
    const Complex mi(0.0, -1.0);
    return block2(Matrix::Zero(n, n), Matrix::Identity(n, n),
                  mi * model.modulus, Matrix::Zero(n, n));
}

Matrix modulus_unitary_inverse(const EnergyModel& model) {
    const Index n = model.n();
    const Complex pi(0.0, 1.0);
    return block2(Matrix::Zero(n, n), pi * inverse_modulus(model),
                  Matrix::Identity(n, n), Matrix::Zero(n, n));
}

GeneratorBlock build_generator(const EnergyModel& model, const Matrix& r) {
    const Index n = model.n();
    if (r.rows() != n || r.cols() != n)
        throw std::invalid_argument("damping operator dimension mismatch");
    Matrix g = block2(Matrix::Zero(n, n), Matrix::Identity(n, n),
                      -model.gram, -r);
    Matrix egram = Matrix::Identity(2 * n, 2 * n);
    egram.topLeftCorner(n, n) = model.gram;
    return {std::move(g), InnerProductSpace::weighted(std::move(egram))};
}

Matrix compressed_dirac(const EnergyModel& model, const Matrix& r) {
    const Index n = model.n();
    const Complex mi(0.0, -1.0);
    return block2(mi * r, model.A.adjoint() * model.ran_basis,
                  model.ran_basis.adjoint() * model.A, Matrix::Zero(n, n));
}

namespace {

Matrix conjugated_generator(const Matrix& u, const Matrix& g, const Matrix& u_inv) {
    return Complex(0.0, 1.0) * u * g * u_inv;
}

}  // namespace

double verify_equivalence_undamped(const EnergyModel& model) {
    const Index n = model.n();
    const Matrix g = build_generator(model, Matrix::Zero(n, n)).G;
    const Matrix lhs = conjugated_generator(build_block_unitary(model), g,
                                            block_unitary_inverse(model));
    return operator_norm(lhs - compressed_dirac(model, Matrix::Zero(n, n)));
}

DampedResiduals verify_equivalence_damped(const EnergyModel& model, const Matrix& r) {
    const Index n = model.n();
    const Matrix g = build_generator(model, r).G;

    const Matrix lhs_abs = conjugated_generator(modulus_unitary(model), g,
                                                modulus_unitary_inverse(model));
    const Complex mi(0.0, -1.0);
    const Matrix q_mod = block2(mi * r, model.modulus,
                                model.modulus, Matrix::Zero(n, n));
    const double res_abs = operator_norm(lhs_abs - q_mod);

    const Matrix lhs_proj = conjugated_generator(build_block_unitary(model), g,
                                                 block_unitary_inverse(model));
    const double res_proj = operator_norm(lhs_proj - compressed_dirac(model, r));
    return {res_abs, res_proj};
}

double verify_modulus_bridge(const EnergyModel& model) {
    const Index n = model.n();
    const Matrix bridge = modulus_unitary(model) * block_unitary_inverse(model);

    // diag(I, V_{A*}) restricted to K_A, expressed in the ran(A) basis.
    const Matrix va = polar_decompose(model.A).partial_isometry;
    Matrix expected = Matrix::Zero(2 * n, 2 * n);
    expected.topLeftCorner(n, n) = Matrix::Identity(n, n);
    expected.bottomRightCorner(n, n) = va.adjoint() * model.ran_basis;
    return operator_norm(bridge - expected);
}

EnergyModel dirichlet_derivative_model(int n_interior) {
    if (n_interior < 2)
        throw std::invalid_argument("dirichlet model needs at least two interior points");
    const Index n = n_interior;
    const double h = 1.0 / static_cast<double>(n + 1);
    Matrix a = Matrix::Zero(n + 1, n);
    for (Index i = 0; i < n; ++i) {
        a(i, i) = 1.0 / h;
        a(i + 1, i) = -1.0 / h;
    }
    return build_energy_model(a);
}

}  // namespace wavedirac
