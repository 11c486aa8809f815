#include "wavedirac/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wavedirac {

namespace {

using nlohmann::json;

std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

Complex parse_entry(const json& v) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Complex(v[0].get<double>(), v[1].get<double>());
    throw ParseError("matrix entries must be numbers or [re, im] pairs");
}

Matrix parse_matrix(const json& rows) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
        throw ParseError("matrix must be a nonempty array of rows");
    const Index nrows = static_cast<Index>(rows.size());
    const Index ncols = static_cast<Index>(rows[0].size());
    Matrix m(nrows, ncols);
    for (Index i = 0; i < nrows; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != ncols)
            throw ParseError("matrix rows must have equal lengths");
        for (Index j = 0; j < ncols; ++j)
            m(i, j) = parse_entry(row[static_cast<std::size_t>(j)]);
    }
    return m;
}

struct DampingSpec {
    enum class Kind { kNone, kPower, kMatrix } kind = Kind::kNone;
    double c = 0.0;
    double alpha = 0.0;
    Matrix matrix;
};

DampingSpec parse_damping(const json& model) {
    DampingSpec spec;
    if (!model.contains("damping") || model["damping"].is_null()) return spec;
    const json& d = model["damping"];
    if (d.is_string() && d.get<std::string>() == "none") return spec;
    if (d.is_object() && d.contains("power")) {
        const json& p = d["power"];
        if (!p.contains("c") || !p.contains("alpha"))
            throw ParseError("power damping needs c and alpha");
        spec.kind = DampingSpec::Kind::kPower;
        spec.c = p["c"].get<double>();
        spec.alpha = p["alpha"].get<double>();
        if (spec.c < 0.0) throw ParseError("power damping needs c >= 0");
        return spec;
    }
    if (d.is_object() && d.contains("matrix")) {
        spec.kind = DampingSpec::Kind::kMatrix;
        spec.matrix = parse_matrix(d["matrix"]);
        return spec;
    }
    throw ParseError("damping must be \"none\", {power:{c,alpha}} or {matrix:[..]}");
}

SpectralModel spectral_from_dense(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    std::vector<double> nodes, weights;
    for (Index i = svd.singularValues().size() - 1; i >= 0; --i) {
        nodes.push_back(svd.singularValues()(i));
        weights.push_back(1.0);
    }
    return SpectralModel::make(std::move(nodes), std::move(weights));
}

ScenarioModel realize_model(const json& model) {
    if (!model.is_object() || !model.contains("type"))
        throw ParseError("scenario needs a model object with a type");
    const std::string type = model["type"].get<std::string>();
    const DampingSpec damping = parse_damping(model);

    ScenarioModel out;
    out.commuting_damping = damping.kind != DampingSpec::Kind::kMatrix;
    out.spectral_available = true;

    if (type == "dense" || type == "dirichlet") {
        if (type == "dense") {
            if (!model.contains("A")) throw ParseError("dense model needs A");
            out.a = parse_matrix(model["A"]);
            if (out.a.rows() < out.a.cols())
                throw ModelError("dense model needs rows >= cols for full column rank");
        } else {
            const int n = model.value("N", 0);
            if (n < 2 || n > 512) throw ParseError("dirichlet model needs 2 <= N <= 512");
            out.a = dirichlet_derivative_model(n).A;
        }
        try {
            out.spectrum = spectral_from_dense(out.a);
        } catch (const std::invalid_argument&) {
            // Singular A has no strictly positive node model; matrix tasks
            // still apply.
            out.spectral_available = false;
        }
    } else if (type == "spectral") {
        if (!model.contains("nodes")) throw ParseError("spectral model needs nodes");
        std::vector<double> nodes = model["nodes"].get<std::vector<double>>();
        std::vector<double> weights =
            model.contains("weights") ? model["weights"].get<std::vector<double>>()
                                      : std::vector<double>(nodes.size(), 1.0);
        if (nodes.size() > 10000) throw ParseError("spectral model capped at 10^4 nodes");
        const bool allow_zero = model.value("allow_zero_node", false);
        try {
            out.spectrum = allow_zero
                               ? SpectralModel::with_zero_node(std::move(nodes),
                                                               std::move(weights))
                               : SpectralModel::make(std::move(nodes), std::move(weights));
        } catch (const std::invalid_argument& e) {
            throw ModelError(e.what());
        }
        const Index n = static_cast<Index>(out.spectrum.count());
        out.a = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) out.a(i, i) = out.spectrum.nodes[static_cast<std::size_t>(i)];
    } else {
        throw ParseError("unknown model type: " + type);
    }

    // Damping: matrix as given, profile realized through |A|.
    const Index n = out.a.cols();
    switch (damping.kind) {
        case DampingSpec::Kind::kNone:
            out.r = Matrix::Zero(n, n);
            out.profile = DampingProfile::none();
            break;
        case DampingSpec::Kind::kPower: {
            out.profile = DampingProfile::power(damping.c, damping.alpha);
            const Matrix mod = hermitian_sqrt(out.a.adjoint() * out.a);
            const double c = damping.c, alpha = damping.alpha;
            try {
                out.r = func_calc(mod, [c, alpha](double x) {
                    x = std::max(x, 0.0);
                    if (x == 0.0 && alpha < 0.0)
                        throw std::domain_error("function undefined on spectrum");
                    const double value = (x == 0.0 && alpha == 0.0)
                                             ? c
                                             : c * std::pow(x, alpha);
                    return Complex(value, 0.0);
                });
            } catch (const std::domain_error&) {
                throw ModelError("power damping undefined on the kernel of |A|");
            }
            break;
        }
        case DampingSpec::Kind::kMatrix:
            if (damping.matrix.rows() != n || damping.matrix.cols() != n)
                throw ModelError("damping matrix dimension mismatch");
            out.r = damping.matrix;
            out.profile = DampingProfile::none();
            break;
    }
    return out;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

class TaskBuilder {
public:
    TaskBuilder(std::string name, const std::map<std::string, double>& tols)
        : tols_(tols), start_(std::chrono::steady_clock::now()) {
        result_.name = std::move(name);
    }

    double tol(const std::string& name) const {
        auto it = tols_.find(name);
        if (it == tols_.end()) throw std::logic_error("unknown tolerance: " + name);
        return it->second;
    }

    void residual(const std::string& name, double value, const std::string& tol_name) {
        residual_abs(name, value, tol(tol_name));
    }

    void residual_abs(const std::string& name, double value, double tolerance) {
        const bool pass = value <= tolerance;
        result_.residuals.emplace_back(name, ResidualEntry{value, tolerance, pass});
        result_.pass = result_.pass && pass;
    }

    void info(const std::string& name, double value) {
        result_.info.emplace_back(name, value);
    }

    void artifact(const std::string& path) { result_.artifacts.push_back(path); }

    TaskResult finish() {
        result_.wall_time = elapsed_seconds(start_);
        return std::move(result_);
    }

private:
    const std::map<std::string, double>& tols_;
    std::chrono::steady_clock::time_point start_;
    TaskResult result_;
};

// --- individual tasks -------------------------------------------------------

TaskResult task_verify_undamped(const Scenario& sc,
                                const std::map<std::string, double>& tols) {
    TaskBuilder task("verify-undamped", tols);
    const EnergyModel model = build_energy_model(sc.model.a);
    task.residual("equivalence_undamped", verify_equivalence_undamped(model),
                  "equivalence");
    Eigen::JacobiSVD<Matrix> svd(sc.model.a);
    task.info("sigma_min", svd.singularValues()(svd.singularValues().size() - 1));
    return task.finish();
}

TaskResult task_verify_damped(const Scenario& sc,
                              const std::map<std::string, double>& tols) {
    TaskBuilder task("verify-damped", tols);
    const EnergyModel model = build_energy_model(sc.model.a);
    const DampedResiduals damped = verify_equivalence_damped(model, sc.model.r);
    task.residual("equivalence_modulus", damped.residual_abs, "equivalence");
    task.residual("equivalence_projected", damped.residual_proj, "equivalence");
    const Index n = model.n();
    const DampedResiduals undamped =
        verify_equivalence_damped(model, Matrix::Zero(n, n));
    task.residual("equivalence_modulus_undamped", undamped.residual_abs, "equivalence");
    task.residual("modulus_bridge", verify_modulus_bridge(model), "equivalence");
    return task.finish();
}

TaskResult task_pencil(const Scenario& sc, const std::map<std::string, double>& tols,
                       Rng& rng) {
    TaskBuilder task("pencil", tols);
    const QuadraticPencil pencil =
        make_pencil(sc.model.a.adjoint() * sc.model.a, sc.model.r);
    const DampedDirac dirac = make_damped_dirac(pencil);

    const auto pencil_eigs = pencil_spectrum(pencil);
    const auto dirac_eigs = dirac_spectrum(dirac);
    double pairing = 0.0;
    for (std::size_t i = 0; i < pencil_eigs.size(); ++i)
        pairing = std::max(pairing, std::abs(pencil_eigs[i] - dirac_eigs[i]) /
                                        (1.0 + std::abs(pencil_eigs[i])));
    task.residual("spectrum_pairing", pairing, "spectrum");

    double radius = 1.0;
    for (Complex z : pencil_eigs) radius = std::max(radius, std::abs(z));
    const Index dim = dirac.q.rows();
    const Matrix ident = Matrix::Identity(dim, dim);
    double worst = 0.0;
    int accepted = 0;
    while (accepted < std::max(1, sc.samples / 5)) {
        const Complex z = rng.complex_box(2.0 * radius);
        double dist = std::numeric_limits<double>::infinity();
        for (Complex w : pencil_eigs) dist = std::min(dist, std::abs(w - z));
        if (dist < 1e-3 * (1.0 + std::abs(z))) continue;
        ++accepted;
        const Matrix res = resolvent_damped(dirac, pencil, z);
        worst = std::max(worst, operator_norm((dirac.q - z * ident) * res - ident));
    }
    task.residual("resolvent_identity", worst, "resolvent");

    double dist0 = std::numeric_limits<double>::infinity();
    for (Complex z : dirac_eigs) dist0 = std::min(dist0, std::abs(z));
    task.info("dist_sigma_q_to_zero", dist0);
    task.info("accretive_margin", accretivity_check(sc.model.r).margin);
    return task.finish();
}

TaskResult task_susy(const Scenario& sc, const std::map<std::string, double>& tols,
                     Rng& rng) {
    TaskBuilder task("susy", tols);
    const SuperchargeSystem sys = build_supercharge(sc.model.a);

    const double lam_max =
        std::max(sys.spec_h1.eigenvalues(sys.n() - 1), sys.spec_h2.eigenvalues(sys.m() - 1));
    const double zero_cut = 1e-10 * (1.0 + lam_max);

    task.residual("intertwine_exp",
                  check_intertwining(sys, [](double x) { return Complex(std::exp(-x), 0.0); }),
                  "intertwining");
    task.residual("intertwine_resolvent",
                  check_intertwining(sys,
                                     [](double x) { return Complex(1.0 / (1.0 + x), 0.0); }),
                  "intertwining");
    task.residual("intertwine_indicator",
                  check_intertwining(sys,
                                     [zero_cut](double x) {
                                         return Complex(x > zero_cut ? 1.0 : 0.0, 0.0);
                                     }),
                  "intertwining");

    std::vector<double> nz1, nz2;
    for (Index i = 0; i < sys.n(); ++i)
        if (sys.spec_h1.eigenvalues(i) > zero_cut) nz1.push_back(sys.spec_h1.eigenvalues(i));
    for (Index i = 0; i < sys.m(); ++i)
        if (sys.spec_h2.eigenvalues(i) > zero_cut) nz2.push_back(sys.spec_h2.eigenvalues(i));
    double iso = nz1.size() == nz2.size() ? 0.0 : std::numeric_limits<double>::infinity();
    if (nz1.size() == nz2.size())
        for (std::size_t i = 0; i < nz1.size(); ++i)
            iso = std::max(iso, std::abs(nz1[i] - nz2[i]) / (1.0 + std::abs(nz1[i])));
    task.residual("isospectral_nonzero", iso, "isospectral");

    // Random off-spectrum resolvent point.
    Complex zeta;
    for (;;) {
        zeta = rng.complex_box(1.0 + std::sqrt(lam_max));
        const Complex z2 = zeta * zeta;
        double dist = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < sys.n(); ++i)
            dist = std::min(dist, std::abs(z2 - Complex(sys.spec_h1.eigenvalues(i), 0)));
        for (Index i = 0; i < sys.m(); ++i)
            dist = std::min(dist, std::abs(z2 - Complex(sys.spec_h2.eigenvalues(i), 0)));
        if (dist > 1e-3 * (1.0 + std::abs(z2))) break;
    }
    const Matrix ident = Matrix::Identity(sys.total(), sys.total());
    const Matrix res = resolvent_q(sys, zeta);
    task.residual("resolvent_block",
                  operator_norm((sys.Q - zeta * ident) * res - ident), "resolvent");

    const SuperchargeDiagonalization diag = diagonalize_supercharge(sys);
    const Matrix& basis = diag.complement_basis;
    const Matrix uc = basis.adjoint() * diag.U * basis;
    const Matrix qc = basis.adjoint() * sys.Q * basis;
    const Matrix dc = basis.adjoint() * diag.D * basis;
    const Index r = basis.cols();
    task.residual("diagonalization",
                  operator_norm(uc * qc * uc.adjoint() - dc), "diagonalization");
    task.residual("diagonalizer_unitary",
                  operator_norm(uc.adjoint() * uc - Matrix::Identity(r, r)),
                  "diagonalization");
    task.residual_abs("nelson_symmetry", check_nelson_symmetry(sys), 0.0);
    task.info("kernel_dim_h1", static_cast<double>(sys.n()) - static_cast<double>(nz1.size()));
    task.info("kernel_dim_h2", static_cast<double>(sys.m()) - static_cast<double>(nz2.size()));
    return task.finish();
}

void require_spectral(const Scenario& sc, const char* task_name) {
    if (!sc.model.commuting_damping)
        throw ModelError(std::string(task_name) +
                         " needs a commuting damping profile");
    if (!sc.model.spectral_available)
        throw ModelError(std::string(task_name) +
                         " needs a model with trivial kernel");
}

TaskResult task_dynamics(const Scenario& sc, const std::map<std::string, double>& tols,
                         const std::filesystem::path& out_dir) {
    TaskBuilder task("dynamics", tols);
    require_spectral(sc, "dynamics");
    const SpectralModel& m = sc.model.spectrum;
    const DampingProfile& d = sc.model.profile;

    double two_path = 0.0;
    for (double t : {0.1, 1.0, std::max(1.0, sc.horizon / 5.0)})
        two_path = std::max(two_path, semigroup_two_path_residual(m, d, t));
    task.residual("two_path_semigroup", two_path, "two_path");

    double contraction = 0.0;
    for (double t : {0.1, 1.0, 10.0})
        contraction = std::max(contraction, semigroup_norm(m, d, t) - 1.0);
    task.residual("contraction_excess", contraction, "contraction");

    const double omega = growth_bound(m, d);
    const bool critical = has_critical_node(m, d);
    std::vector<double> ts(static_cast<std::size_t>(sc.samples));
    std::vector<double> norms(ts.size()), bounds(ts.size());
    double cfit = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = sc.horizon * static_cast<double>(i) /
                static_cast<double>(ts.size() - 1);
        norms[i] = semigroup_norm(m, d, ts[i]);
        // For the t e^{-wt} envelope skip the initial ramp where the
        // constant is not identified.
        if (!critical || ts[i] >= 1.0)
            cfit = std::max(cfit, norms[i] * std::exp(omega * ts[i]) /
                                      (critical ? ts[i] : 1.0));
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
        bounds[i] = cfit * std::exp(-omega * ts[i]) * (critical ? ts[i] : 1.0);
    const std::string file = sc.name + "_dynamics.csv";
    emit_timeseries({{"t", ts}, {"semigroup_norm", norms}, {"envelope", bounds}},
                    out_dir / file);
    task.artifact(file);
    task.info("omega", omega);
    task.info("envelope_constant", cfit);
    return task.finish();
}

TaskResult task_equipartition(const Scenario& sc,
                              const std::map<std::string, double>& tols, Rng& rng,
                              const std::filesystem::path& out_dir) {
    TaskBuilder task("equipartition", tols);
    if (!sc.model.spectral_available)
        throw ModelError("equipartition needs a model with trivial kernel");
    const SpectralModel& m = sc.model.spectrum;
    const std::size_t n = m.count();

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> psi1(n), psi2(n);
        for (std::size_t k = 0; k < n; ++k) {
            psi1[k] = rng.complex_box();
            psi2[k] = rng.complex_box();
        }
        const double t = rng.uniform(0.0, sc.horizon);
        const auto id = equipartition_identity(m, psi1, psi2, t);
        worst = std::max(worst, std::abs(id.lhs - id.rhs));
    }
    task.residual("kinetic_identity", worst, "identity");

    std::vector<Complex> u0(n), u1(n);
    for (std::size_t k = 0; k < n; ++k) {
        u0[k] = rng.complex_box();
        u1[k] = rng.complex_box();
    }
    const CesaroMeans means = cesaro_equipartition(m, u0, u1, sc.horizon);
    const double slack = means.defect_bound / sc.horizon + 1e-12;
    task.residual_abs("cesaro_kinetic_defect",
                      std::abs(means.mean_kinetic - means.target - means.zero_mode_defect),
                      slack);
    task.residual_abs("cesaro_potential_defect",
                      std::abs(means.mean_potential - means.target + means.zero_mode_defect),
                      slack);
    const CesaroMeans twice = cesaro_equipartition(m, u0, u1, 2.0 * sc.horizon);
    const double d1 = std::abs(means.mean_kinetic - means.target - means.zero_mode_defect);
    const double d2 = std::abs(twice.mean_kinetic - twice.target - twice.zero_mode_defect);
    task.info("defect_ratio_2T", d1 > 0.0 ? d2 / d1 : 0.0);
    task.info("zero_mode_defect", means.zero_mode_defect);
    task.info("defect_bound", means.defect_bound);

    std::vector<double> ts(static_cast<std::size_t>(sc.samples));
    std::vector<double> kin(ts.size()), pot(ts.size()), mean_k(ts.size()),
        mean_p(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = sc.horizon * static_cast<double>(i + 1) / static_cast<double>(ts.size());
        const WaveState st = solve_acp2(m, DampingProfile::none(), u0, u1, ts[i]);
        double kk = 0.0, pp = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            kk += m.weights[k] * std::norm(st.v[k]);
            pp += m.weights[k] * m.nodes[k] * m.nodes[k] * std::norm(st.u[k]);
        }
        kin[i] = kk;
        pot[i] = pp;
        const CesaroMeans cm = cesaro_equipartition(m, u0, u1, ts[i]);
        mean_k[i] = cm.mean_kinetic;
        mean_p[i] = cm.mean_potential;
    }
    const std::string file = sc.name + "_equipartition.csv";
    emit_timeseries({{"t", ts},
                     {"kinetic", kin},
                     {"potential", pot},
                     {"cesaro_kinetic", mean_k},
                     {"cesaro_potential", mean_p}},
                    out_dir / file);
    task.artifact(file);
    return task.finish();
}

TaskResult task_growth(const Scenario& sc, const std::map<std::string, double>& tols,
                       const std::filesystem::path& out_dir) {
    TaskBuilder task("growth", tols);
    require_spectral(sc, "growth");
    const SpectralModel& m = sc.model.spectrum;
    const DampingProfile& d = sc.model.profile;

    const double omega = growth_bound(m, d);
    // Fit over the tail of the horizon where transients have settled.
    const double t1 = sc.horizon / 2.0;
    const double t2 = sc.horizon;
    task.info("omega", omega);

    if (!has_critical_node(m, d)) {
        const double rate = fitted_decay_rate(m, d, t1, t2, std::max(sc.samples, 64));
        task.info("fitted_rate", rate);
        task.residual("growth_rate_misfit",
                      std::abs(rate - omega) / (1e-6 + std::abs(omega)), "growth_fit");
    } else {
        // t e^{-omega t} envelope: norm(t)/t should decay at exactly omega.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int samples = std::max(sc.samples, 64);
        double cfit = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double t = t1 + (t2 - t1) * i / (samples - 1);
            const double y = std::log(semigroup_norm(m, d, t) / t);
            cfit = std::max(cfit, semigroup_norm(m, d, t) * std::exp(omega * t) / t);
            sx += t;
            sy += y;
            sxx += t * t;
            sxy += t * y;
        }
        const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
        task.info("fitted_rate", -slope);
        task.info("envelope_constant", cfit);
        task.residual("growth_rate_misfit",
                      std::abs(-slope - omega) / (1e-6 + std::abs(omega)), "growth_fit");
    }

    std::vector<double> ts, norms, envelope;
    for (int i = 0; i < sc.samples; ++i) {
        const double t = sc.horizon * i / std::max(1, sc.samples - 1);
        ts.push_back(t);
        norms.push_back(semigroup_norm(m, d, t));
        envelope.push_back(std::exp(-omega * t) *
                           (has_critical_node(m, d) ? t : 1.0));
    }
    const std::string file = sc.name + "_growth.csv";
    emit_timeseries({{"t", ts}, {"semigroup_norm", norms}, {"shape", envelope}},
                    out_dir / file);
    task.artifact(file);
    return task.finish();
}

}  // namespace

const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> tasks = {
        "verify-undamped", "verify-damped", "pencil", "susy",
        "dynamics",        "equipartition", "growth"};
    return tasks;
}

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> tols = {
        {"equivalence", 1e-9},   {"spectrum", 1e-8},
        {"resolvent", 1e-9},     {"intertwining", 1e-10},
        {"isospectral", 1e-9},   {"diagonalization", 1e-10},
        {"identity", 1e-10},     {"contraction", 1e-9},
        {"two_path", 1e-9},      {"growth_fit", 2e-2},
        {"conservation", 1e-10}, {"dissipation", 1e-5}};
    return tols;
}

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid scenario JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object");

    Scenario sc;
    sc.name = doc.value("name", name);
    if (!doc.contains("model")) throw ParseError("scenario needs a model");
    sc.model = realize_model(doc["model"]);

    if (!doc.contains("tasks") || !doc["tasks"].is_array() || doc["tasks"].empty())
        throw ParseError("scenario needs a nonempty tasks list");
    for (const auto& t : doc["tasks"]) {
        const std::string task = t.get<std::string>();
        if (std::find(known_tasks().begin(), known_tasks().end(), task) ==
            known_tasks().end())
            throw ParseError("unknown task: " + task);
        sc.tasks.push_back(task);
    }

    sc.horizon = doc.value("horizon", 10.0);
    sc.samples = doc.value("samples", 101);
    sc.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("tolerances")) {
        for (const auto& [key, value] : doc["tolerances"].items()) {
            if (default_tolerances().count(key) == 0)
                throw ParseError("unknown tolerance name: " + key);
            sc.tolerances[key] = value.get<double>();
        }
    }
    const bool needs_dynamics =
        std::find_if(sc.tasks.begin(), sc.tasks.end(), [](const std::string& t) {
            return t == "dynamics" || t == "equipartition" || t == "growth";
        }) != sc.tasks.end();
    if (needs_dynamics && sc.horizon <= 0.0)
        throw ParseError("dynamics tasks need horizon > 0");
    if (sc.samples < 2 || sc.samples > 100000)
        throw ParseError("samples out of range");
    return sc;
}

Scenario parse_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open scenario file: " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str(), file.stem().string());
}

Report run_scenario(const Scenario& scenario, const RunOptions& options) {
    std::map<std::string, double> tols = default_tolerances();
    for (const auto& [k, v] : scenario.tolerances) tols[k] = v;
    for (const auto& [k, v] : options.tolerances) {
        if (tols.count(k) == 0) throw ParseError("unknown tolerance name: " + k);
        tols[k] = v;
    }

    Report report;
    report.scenario = scenario.name;
    report.seed = options.seed.value_or(scenario.seed);
    std::filesystem::create_directories(options.out_dir);

    Rng rng(report.seed);
    for (const std::string& name : scenario.tasks) {
        TaskResult result;
        if (name == "verify-undamped") result = task_verify_undamped(scenario, tols);
        else if (name == "verify-damped") result = task_verify_damped(scenario, tols);
        else if (name == "pencil") result = task_pencil(scenario, tols, rng);
        else if (name == "susy") result = task_susy(scenario, tols, rng);
        else if (name == "dynamics") result = task_dynamics(scenario, tols, options.out_dir);
        else if (name == "equipartition")
            result = task_equipartition(scenario, tols, rng, options.out_dir);
        else if (name == "growth") result = task_growth(scenario, tols, options.out_dir);
        else throw ParseError("unknown task: " + name);
        report.pass = report.pass && result.pass;
        report.tasks.push_back(std::move(result));
    }
    return report;
}

std::string serialize_report(const Report& report, bool include_wall_time) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"scenario\": \"" << escape_json(report.scenario) << "\",\n";
    out << "  \"seed\": " << report.seed << ",\n";
    out << "  \"status\": \"" << (report.pass ? "pass" : "fail") << "\",\n";
    out << "  \"tasks\": [";
    for (std::size_t i = 0; i < report.tasks.size(); ++i) {
        const TaskResult& t = report.tasks[i];
        out << (i == 0 ? "\n" : ",\n");
        out << "    {\n";
        out << "      \"name\": \"" << escape_json(t.name) << "\",\n";
        out << "      \"status\": \"" << (t.pass ? "pass" : "fail") << "\",\n";
        if (include_wall_time)
            out << "      \"wall_time\": " << format17(t.wall_time) << ",\n";
        out << "      \"residuals\": {";
        for (std::size_t j = 0; j < t.residuals.size(); ++j) {
            const auto& [rname, entry] = t.residuals[j];
            out << (j == 0 ? "\n" : ",\n");
            out << "        \"" << escape_json(rname) << "\": {\"value\": "
                << format17(entry.value) << ", \"tolerance\": "
                << format17(entry.tolerance) << ", \"pass\": "
                << (entry.pass ? "true" : "false") << "}";
        }
        out << (t.residuals.empty() ? "},\n" : "\n      },\n");
        out << "      \"info\": {";
        for (std::size_t j = 0; j < t.info.size(); ++j) {
            const auto& [iname, value] = t.info[j];
            out << (j == 0 ? "\n" : ",\n");
            out << "        \"" << escape_json(iname) << "\": " << format17(value);
        }
        out << (t.info.empty() ? "},\n" : "\n      },\n");
        out << "      \"artifacts\": [";
        for (std::size_t j = 0; j < t.artifacts.size(); ++j) {
            out << (j == 0 ? "" : ", ") << "\"" << escape_json(t.artifacts[j]) << "\"";
        }
        out << "]\n    }";
    }
    out << (report.tasks.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
    return out.str();
}

void emit_timeseries(
    const std::vector<std::pair<std::string, std::vector<double>>>& columns,
    const std::filesystem::path& path) {
    if (!columns.empty()) {
        const std::size_t len = columns.front().second.size();
        for (const auto& [name, values] : columns)
            if (values.size() != len)
                throw std::invalid_argument("timeseries columns must have equal lengths");
    }
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings everywhere
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < columns.size(); ++j)
        out << (j == 0 ? "" : ",") << columns[j].first;
    out << "\n";
    const std::size_t len = columns.empty() ? 0 : columns.front().second.size();
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << (j == 0 ? "" : ",") << format17(columns[j].second[i]);
        out << "\n";
    }
}

std::string version_string() { return "wavedirac 0.1.0"; }

}  // namespace wavedirac
