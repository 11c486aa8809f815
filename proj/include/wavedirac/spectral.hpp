#pragma once

#include <functional>
#include <vector>

#include "wavedirac/types.hpp"

namespace wavedirac {

/// Discrete measure {(lambda_k, w_k)} realizing |A| as multiplication by
/// lambda. Nodes are kept sorted ascending; every weight is positive, so the
/// essential sup/inf over the spectrum are plain max/min over nodes. A zero
/// node (kernel emulation) only enters through the explicit factory.
struct SpectralModel {
    std::vector<double> nodes;
    std::vector<double> weights;

    static SpectralModel make(std::vector<double> nodes, std::vector<double> weights);
    static SpectralModel with_zero_node(std::vector<double> nodes,
                                        std::vector<double> weights);

    std::size_t count() const { return nodes.size(); }
    bool has_zero_node() const;
};

/// Damping profile F with R = 2 F(|A|) >= 0. The built-in family is
/// F(lambda) = (c/2) lambda^alpha.
struct DampingProfile {
    std::function<double(double)> f;

    static DampingProfile none();
    static DampingProfile power(double c, double alpha);
    static DampingProfile custom(std::function<double(double)> f);

    double operator()(double lambda) const { return f(lambda); }
};

struct WaveState {
    std::vector<Complex> u;
    std::vector<Complex> v;  // du/dt
};

/// Damped oscillator kernels at mu = lambda^2 - F^2:
///   c = cos(sqrt(mu) t)            (cosh for mu < 0, 1 at mu = 0)
///   s = sin(sqrt(mu) t)/sqrt(mu)   (sinh analog for mu < 0, t at mu = 0)
/// Both are entire functions of mu; near-critical |mu| < 1e-8 switches to a
/// 4th-order Taylor expansion in mu to avoid cancellation.
struct GammaKernels {
    double c;
    double s;
};

GammaKernels gamma_kernels(double lambda, double f, double t);

/// One node of e^{G t} for u'' + 2F u' + S u = 0 (S the stiffness):
/// e^{-Ft} [[c + F s, s], [-S s, c - F s]] with mu = S - F^2.
Eigen::Matrix2d wave_node_matrix(double stiffness, double f, double t);

/// One node of e^{-i Q t}: e^{-Ft} [[c - F s, -i lambda s], [-i lambda s, c + F s]].
Eigen::Matrix2cd dirac_node_matrix(double lambda, double f, double t);

/// Applies the commuting-damping wave semigroup nodewise to (u, v).
WaveState semigroup_commuting(const SpectralModel& m, const DampingProfile& d,
                              double t, const WaveState& state);

/// Per-node matrices of the damped Dirac semigroup.
std::vector<Eigen::Matrix2cd> dirac_semigroup_commuting(const SpectralModel& m,
                                                        const DampingProfile& d,
                                                        double t);

/// Max over nodes of the larger singular value of the node matrix, computed
/// both in closed form and by direct 2x2 SVD; the two must agree to 1e-8.
double semigroup_norm(const SpectralModel& m, const DampingProfile& d, double t);

/// omega = min over nodes of F(lambda) - sqrt((F^2 - lambda^2)_+), the decay
/// rate of the semigroup norm.
double growth_bound(const SpectralModel& m, const DampingProfile& d);

/// Some node has F(lambda) = lambda (the t e^{-omega t} envelope case).
bool has_critical_node(const SpectralModel& m, const DampingProfile& d,
                       double tol = 1e-12);

/// Least-squares slope of -log ||e^{-iQt}|| over uniform samples of [t1, t2].
double fitted_decay_rate(const SpectralModel& m, const DampingProfile& d,
                         double t1, double t2, int samples);

/// Max over max wave/Dirac node deviation from matrix_exp of the node
/// generators; the two-path agreement residual.
double semigroup_two_path_residual(const SpectralModel& m, const DampingProfile& d,
                                   double t);

/// Nodewise solution of u'' + 2F u' + lambda^2 u = 0 with given initial data.
WaveState solve_acp2(const SpectralModel& m, const DampingProfile& d,
                     const std::vector<Complex>& u0, const std::vector<Complex>& u1,
                     double t);

struct EnergyReport {
    double energy;
    double dissipation;  // analytic dE/dt
};

/// E_B = sum w (|B v|^2 + lambda^2 |B u|^2) and its derivative
/// -2 Re (B v, B R v) along the damped wave flow.
EnergyReport conserved_family(const SpectralModel& m, const DampingProfile& d,
                              const std::function<double(double)>& b,
                              const WaveState& state);

/// Energy of u'' + R u' + [(B*B)^2 + C*C (B*B)^alpha] u = 0:
/// sum w (||B|^a v|^2 + ||B|^{a+2} u|^2 + ||C||B|^{2a} u|^2), with its
/// dissipation -2 Re (|B|^a R v, |B|^a v).
EnergyReport plate_energy(const SpectralModel& m, const DampingProfile& d,
                          const std::function<double(double)>& b,
                          const std::function<double(double)>& c, double alpha,
                          const WaveState& state);

/// Propagates the plate equation state; stiffness per node is
/// B^4 + C^2 B^{2 alpha}.
WaveState plate_evolve(const SpectralModel& m, const DampingProfile& d,
                       const std::function<double(double)>& b,
                       const std::function<double(double)>& c, double alpha,
                       const WaveState& state, double t);

struct EquipartitionIdentity {
    double lhs;  // ||psi_1(t)||^2 under e^{-iQt}, F = 0
    double rhs;  // 1/2 ||Psi(0)||^2 + 1/2 Re <psi1 + psi2, e^{2 i |A| t}(psi1 - psi2)>
};

/// The exact kinetic-energy identity of the undamped Dirac evolution; in the
/// multiplication model V_A = I. |lhs - rhs| <= 1e-10 for every t.
EquipartitionIdentity equipartition_identity(const SpectralModel& m,
                                             const std::vector<Complex>& psi1,
                                             const std::vector<Complex>& psi2,
                                             double t);

struct CesaroMeans {
    double mean_kinetic;    // (1/T) int_0^T ||u'(s)||^2 ds, analytic per node
    double mean_potential;  // (1/T) int_0^T |||A| u(s)||^2 ds
    double target;          // half the conserved total energy
    double defect_bound;    // C with |mean - target| <= C/T (no zero node)
    double zero_mode_defect;  // persistent defect carried by E_{|A|}({0})
};

/// Closed-form Cesaro averages of kinetic and potential energy for the
/// undamped flow with data (u0, u1). T must be positive.
CesaroMeans cesaro_equipartition(const SpectralModel& m,
                                 const std::vector<Complex>& u0,
                                 const std::vector<Complex>& u1, double big_t);

}  // namespace wavedirac
