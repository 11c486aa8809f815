#include "wavedirac/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "wavedirac/linalg.hpp"

namespace wavedirac {

namespace {

constexpr double kCriticalWindow = 1e-8;

void check_state(const SpectralModel& m, const WaveState& s) {
    if (s.u.size() != m.count() || s.v.size() != m.count())
        throw std::invalid_argument("state size does not match node count");
}

double checked_damping(const DampingProfile& d, double lambda) {
    const double f = d(lambda);
    if (!std::isfinite(f) || f < 0.0)
        throw std::invalid_argument(
            "damping profile must be finite and nonnegative at every node");
    return f;
}

SpectralModel build_model(std::vector<double> nodes, std::vector<double> weights,
                          bool allow_zero) {
    if (nodes.empty() || nodes.size() != weights.size())
        throw std::invalid_argument("nodes and weights must match and be nonempty");
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    SpectralModel m;
    m.nodes.reserve(nodes.size());
    m.weights.reserve(nodes.size());
    for (std::size_t k : order) {
        const double node = nodes[k], weight = weights[k];
        if (!std::isfinite(node) || node < 0.0)
            throw std::invalid_argument("nodes must be finite and nonnegative");
        if (node == 0.0 && !allow_zero)
            throw std::invalid_argument("zero node requires the explicit kernel fixture");
        if (!std::isfinite(weight) || weight <= 0.0)
            throw std::invalid_argument("weights must be positive");
        m.nodes.push_back(node);
        m.weights.push_back(weight);
    }
    return m;
}

}  // namespace

SpectralModel SpectralModel::make(std::vector<double> nodes,
                                  std::vector<double> weights) {
    return build_model(std::move(nodes), std::move(weights), false);
}

SpectralModel SpectralModel::with_zero_node(std::vector<double> nodes,
                                            std::vector<double> weights) {
    return build_model(std::move(nodes), std::move(weights), true);
}

bool SpectralModel::has_zero_node() const {
    return !nodes.empty() && nodes.front() == 0.0;
}

DampingProfile DampingProfile::none() {
    return {[](double) { return 0.0; }};
}

DampingProfile DampingProfile::power(double c, double alpha) {
    if (c < 0.0) throw std::invalid_argument("damping coefficient must be nonnegative");
    return {[c, alpha](double lambda) {
        if (lambda == 0.0 && alpha == 0.0) return 0.5 * c;
        return 0.5 * c * std::pow(lambda, alpha);
    }};
}

DampingProfile DampingProfile::custom(std::function<double(double)> f) {
    return {std::move(f)};
}

GammaKernels gamma_kernels(double lambda, double f, double t) {
    const double mu = lambda * lambda - f * f;
    if (std::abs(mu) < kCriticalWindow) {
        // c = sum (-mu)^k t^{2k}/(2k)!, s = sum (-mu)^k t^{2k+1}/(2k+1)!
        const double t2 = t * t;
        double c = 1.0, s = t;
        double term_c = 1.0, term_s = t;
        for (int k = 1; k <= 4; ++k) {
            term_c *= -mu * t2 / ((2 * k - 1) * (2 * k));
            term_s *= -mu * t2 / ((2 * k) * (2 * k + 1));
            c += term_c;
            s += term_s;
        }
        return {c, s};
    }
    if (mu > 0.0) {
        const double g = std::sqrt(mu);
        return {std::cos(g * t), std::sin(g * t) / g};
    }
    const double g = std::sqrt(-mu);
    return {std::cosh(g * t), std::sinh(g * t) / g};
}

namespace {

// Kernels parametrized directly by stiffness S (mu = S - F^2), shared by the
// wave and plate propagators.
GammaKernels stiffness_kernels(double stiffness, double f, double t) {
    const double lambda = std::sqrt(std::max(stiffness, 0.0));
    if (stiffness >= 0.0) return gamma_kernels(lambda, f, t);
    // Negative stiffness never arises for |A|^2 nodes but keep mu exact.
    GammaKernels k = gamma_kernels(0.0, std::sqrt(f * f - stiffness), t);
    return k;
}

}  // namespace

Eigen::Matrix2d wave_node_matrix(double stiffness, double f, double t) {
    const GammaKernels k = stiffness_kernels(stiffness, f, t);
    const double decay = std::exp(-f * t);
    Eigen::Matrix2d m;
    m << k.c + f * k.s, k.s, -stiffness * k.s, k.c - f * k.s;
    return decay * m;
}

Eigen::Matrix2cd dirac_node_matrix(double lambda, double f, double t) {
    const GammaKernels k = gamma_kernels(lambda, f, t);
    const double decay = std::exp(-f * t);
    const Complex mi(0.0, -1.0);
    Eigen::Matrix2cd m;
    m << Complex(k.c - f * k.s, 0.0), mi * lambda * k.s,
         mi * lambda * k.s, Complex(k.c + f * k.s, 0.0);
    return decay * m;
}

WaveState semigroup_commuting(const SpectralModel& m, const DampingProfile& d,
                              double t, const WaveState& state) {
    if (t < 0.0) throw std::invalid_argument("semigroup defined for t >= 0");
    check_state(m, state);
    WaveState out{state.u, state.v};
    for (std::size_t k = 0; k < m.count(); ++k) {
        const double lambda = m.nodes[k];
        const Eigen::Matrix2d p = wave_node_matrix(lambda * lambda, checked_damping(d, lambda), t);
        out.u[k] = p(0, 0) * state.u[k] + p(0, 1) * state.v[k];
        out.v[k] = p(1, 0) * state.u[k] + p(1, 1) * state.v[k];
    }
    return out;
}

std::vector<Eigen::Matrix2cd> dirac_semigroup_commuting(const SpectralModel& m,
                                                        const DampingProfile& d,
                                                        double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup defined for t >= 0");
    std::vector<Eigen::Matrix2cd> mats;
    mats.reserve(m.count());
    for (double lambda : m.nodes)
        mats.push_back(dirac_node_matrix(lambda, checked_damping(d, lambda), t));
    return mats;
}

namespace {

double node_norm_closed(double lambda, double f, double t) {
    const GammaKernels k = gamma_kernels(lambda, f, t);
    const double fs = f * std::abs(k.s);
    return std::exp(-f * t) * (std::sqrt(1.0 + fs * fs) + fs);
}

double node_norm_svd(double lambda, double f, double t) {
    const Eigen::Matrix2cd m = dirac_node_matrix(lambda, f, t);
    return m.jacobiSvd().singularValues()(0);
}

}  // namespace

double semigroup_norm(const SpectralModel& m, const DampingProfile& d, double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup defined for t >= 0");
    double best = 0.0;
    for (double lambda : m.nodes) {
        const double f = checked_damping(d, lambda);
        const double closed = node_norm_closed(lambda, f, t);
        const double direct = node_norm_svd(lambda, f, t);
        if (std::abs(closed - direct) > 1e-8 * (1.0 + closed))
            throw std::logic_error("norm formula disagrees with node SVD");
        best = std::max(best, closed);
    }
    return best;
}

double growth_bound(const SpectralModel& m, const DampingProfile& d) {
    double omega = std::numeric_limits<double>::infinity();
    for (double lambda : m.nodes) {
        const double f = checked_damping(d, lambda);
        const double over = std::max(f * f - lambda * lambda, 0.0);
        omega = std::min(omega, f - std::sqrt(over));
    }
    return omega;
}

bool has_critical_node(const SpectralModel& m, const DampingProfile& d, double tol) {
    for (double lambda : m.nodes) {
        const double f = checked_damping(d, lambda);
        if (std::abs(f * f - lambda * lambda) <= tol * (1.0 + lambda * lambda))
            return true;
    }
    return false;
}

double fitted_decay_rate(const SpectralModel& m, const DampingProfile& d,
                         double t1, double t2, int samples) {
    if (samples < 2 || t2 <= t1) throw std::invalid_argument("bad fit window");
    // Least squares for log||e^{-iQt}|| = a - rate * t.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = t1 + (t2 - t1) * i / (samples - 1);
        const double y = std::log(semigroup_norm(m, d, t));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double n = samples;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

double semigroup_two_path_residual(const SpectralModel& m, const DampingProfile& d,
                                   double t) {
    double worst = 0.0;
    for (double lambda : m.nodes) {
        const double f = checked_damping(d, lambda);

        Matrix gen_wave(2, 2);
        gen_wave << 0.0, 1.0, -lambda * lambda, -2.0 * f;
        Matrix exp_wave = matrix_exp(gen_wave, t);
        const Eigen::Matrix2d closed_wave = wave_node_matrix(lambda * lambda, f, t);
        worst = std::max(worst,
                         (exp_wave - closed_wave.cast<Complex>()).cwiseAbs().maxCoeff());

        Matrix gen_dirac(2, 2);
        gen_dirac << Complex(0.0, -2.0 * f) /* -2iF */, Complex(lambda, 0.0),
            Complex(lambda, 0.0), Complex(0.0, 0.0);
        Matrix exp_dirac = matrix_exp(Complex(0.0, -1.0) * gen_dirac, t);
        const Eigen::Matrix2cd closed_dirac = dirac_node_matrix(lambda, f, t);
        worst = std::max(
            worst, (exp_dirac - Matrix(closed_dirac)).cwiseAbs().maxCoeff());
    }
    return worst;
}

WaveState solve_acp2(const SpectralModel& m, const DampingProfile& d,
                     const std::vector<Complex>& u0, const std::vector<Complex>& u1,
                     double t) {
    return semigroup_commuting(m, d, t, WaveState{u0, u1});
}

EnergyReport conserved_family(const SpectralModel& m, const DampingProfile& d,
                              const std::function<double(double)>& b,
                              const WaveState& state) {
    check_state(m, state);
    double energy = 0.0, dissipation = 0.0;
    for (std::size_t k = 0; k < m.count(); ++k) {
        const double lambda = m.nodes[k], w = m.weights[k];
        const double bk = b(lambda);
        if (!std::isfinite(bk)) throw std::domain_error("B undefined at a node");
        const double b2 = bk * bk;
        energy += w * (b2 * std::norm(state.v[k]) +
                       lambda * lambda * b2 * std::norm(state.u[k]));
        // R = 2F: -2 Re(conj(B v) B 2F v) = -4 F |B|^2 |v|^2.
        dissipation += -4.0 * w * checked_damping(d, lambda) * b2 * std::norm(state.v[k]);
    }
    return {energy, dissipation};
}

EnergyReport plate_energy(const SpectralModel& m, const DampingProfile& d,
                          const std::function<double(double)>& b,
                          const std::function<double(double)>& c, double alpha,
                          const WaveState& state) {
    check_state(m, state);
    double energy = 0.0, dissipation = 0.0;
    for (std::size_t k = 0; k < m.count(); ++k) {
        const double lambda = m.nodes[k], w = m.weights[k];
        const double bk = std::abs(b(lambda)), ck = std::abs(c(lambda));
        const double ba = std::pow(bk, alpha);
        const double ba2 = std::pow(bk, alpha + 2.0);
        const double b2a = std::pow(bk, 2.0 * alpha);
        energy += w * (ba * ba * std::norm(state.v[k]) +
                       ba2 * ba2 * std::norm(state.u[k]) +
                       ck * ck * b2a * b2a * std::norm(state.u[k]));
        dissipation += -4.0 * w * checked_damping(d, lambda) * ba * ba * std::norm(state.v[k]);
    }
    return {energy, dissipation};
}

WaveState plate_evolve(const SpectralModel& m, const DampingProfile& d,
                       const std::function<double(double)>& b,
                       const std::function<double(double)>& c, double alpha,
                       const WaveState& state, double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup defined for t >= 0");
    check_state(m, state);
    WaveState out{state.u, state.v};
    for (std::size_t k = 0; k < m.count(); ++k) {
        const double lambda = m.nodes[k];
        const double bk = std::abs(b(lambda)), ck = std::abs(c(lambda));
        const double stiffness = std::pow(bk, 4.0) +
                                 ck * ck * std::pow(bk, 2.0 * alpha);
        const Eigen::Matrix2d p = wave_node_matrix(stiffness, checked_damping(d, lambda), t);
        out.u[k] = p(0, 0) * state.u[k] + p(0, 1) * state.v[k];
        out.v[k] = p(1, 0) * state.u[k] + p(1, 1) * state.v[k];
    }
    return out;
}

EquipartitionIdentity equipartition_identity(const SpectralModel& m,
                                             const std::vector<Complex>& psi1,
                                             const std::vector<Complex>& psi2,
                                             double t) {
    if (psi1.size() != m.count() || psi2.size() != m.count())
        throw std::invalid_argument("state size does not match node count");
    double lhs = 0.0;
    double total = 0.0;
    Complex cross(0.0, 0.0);
    for (std::size_t k = 0; k < m.count(); ++k) {
        const double lambda = m.nodes[k], w = m.weights[k];
        const double ct = std::cos(lambda * t), st = std::sin(lambda * t);
        const Complex mi(0.0, -1.0);
        const Complex p1t = ct * psi1[k] + mi * st * psi2[k];
        lhs += w * std::norm(p1t);
        total += w * (std::norm(psi1[k]) + std::norm(psi2[k]));
        const Complex phase = std::exp(Complex(0.0, 2.0 * lambda * t));
        cross += w * std::conj(psi1[k] + psi2[k]) * phase * (psi1[k] - psi2[k]);
    }
    const double rhs = 0.5 * total + 0.5 * cross.real();
    return {lhs, rhs};
}

CesaroMeans cesaro_equipartition(const SpectralModel& m,
                                 const std::vector<Complex>& u0,
                                 const std::vector<Complex>& u1, double big_t) {
    if (big_t <= 0.0) throw std::invalid_argument("averaging horizon must be positive");
    if (u0.size() != m.count() || u1.size() != m.count())
        throw std::invalid_argument("state size does not match node count");

    double mean_k = 0.0, mean_p = 0.0, target = 0.0;
    double bound = 0.0, zero_defect = 0.0;
    for (std::size_t k = 0; k < m.count(); ++k) {
        const double lambda = m.nodes[k], w = m.weights[k];
        const double nu0 = std::norm(u0[k]), nu1 = std::norm(u1[k]);
        target += 0.5 * w * (lambda * lambda * nu0 + nu1);
        if (lambda == 0.0) {
            // u = u0 + t u1: kinetic energy is constant, potential vanishes.
            mean_k += w * nu1;
            zero_defect += 0.5 * w * nu1;
            continue;
        }
        const double l2 = lambda * lambda;
        const double cross = std::real(std::conj(u0[k]) * u1[k]);
        const double avg_s2 = 0.5 - std::sin(2.0 * lambda * big_t) / (4.0 * lambda * big_t);
        const double avg_c2 = 0.5 + std::sin(2.0 * lambda * big_t) / (4.0 * lambda * big_t);
        const double avg_sc =
            (1.0 - std::cos(2.0 * lambda * big_t)) / (4.0 * lambda * big_t);
        mean_k += w * (l2 * nu0 * avg_s2 + nu1 * avg_c2 - 2.0 * lambda * cross * avg_sc);
        mean_p += w * (l2 * nu0 * avg_c2 + nu1 * avg_s2 + 2.0 * lambda * cross * avg_sc);
        bound += w * ((l2 * nu0 + nu1) / (4.0 * lambda) +
                      std::sqrt(nu0) * std::sqrt(nu1));
    }
    return {mean_k, mean_p, target, bound, zero_defect};
}

}  // namespace wavedirac
