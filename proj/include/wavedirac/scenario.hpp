#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavedirac/damped.hpp"
#include "wavedirac/energy.hpp"
#include "wavedirac/spectral.hpp"
#include "wavedirac/susy.hpp"

namespace wavedirac {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario model realized both as a dense operator pair (A, R) and as a
/// spectral model with a commuting damping profile. Dense models derive their
/// spectral twin from the singular values of A (unit weights); spectral
/// models materialize as diagonal matrices.
struct ScenarioModel {
    Matrix a;
    Matrix r;
    SpectralModel spectrum;
    DampingProfile profile;
    bool commuting_damping;   // damping given as a profile, not a raw matrix
    bool spectral_available;  // dense models with a kernel have no spectral twin
};

struct Scenario {
    std::string name;
    ScenarioModel model;
    std::vector<std::string> tasks;
    double horizon = 10.0;
    int samples = 101;
    std::uint64_t seed = 0;
    std::map<std::string, double> tolerances;
};

struct ResidualEntry {
    double value;
    double tolerance;
    bool pass;
};

struct TaskResult {
    std::string name;
    bool pass = true;
    double wall_time = 0.0;
    std::vector<std::pair<std::string, ResidualEntry>> residuals;
    std::vector<std::pair<std::string, double>> info;
    std::vector<std::string> artifacts;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    bool pass = true;
    std::vector<TaskResult> tasks;
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::map<std::string, double> tolerances;
};

/// Names accepted in a scenario's "tasks" list.
const std::vector<std::string>& known_tasks();

/// Default residual tolerances keyed by name; scenario "tolerances" and
/// --tol overrides replace single entries.
const std::map<std::string, double>& default_tolerances();

Scenario parse_scenario(const std::filesystem::path& file);
Scenario parse_scenario_text(const std::string& text, const std::string& name);

Report run_scenario(const Scenario& scenario, const RunOptions& options);

/// Canonical report serialization; doubles carry 17 significant digits, keys
/// are emitted in a fixed order, lines end with LF. Wall times are the only
/// nondeterministic field and can be suppressed.
std::string serialize_report(const Report& report, bool include_wall_time = true);

/// CSV with a header row, one row per sample, 17-significant-digit decimal
/// text, LF line endings. Columns must have equal lengths.
void emit_timeseries(
    const std::vector<std::pair<std::string, std::vector<double>>>& columns,
    const std::filesystem::path& path);

std::string version_string();

}  // namespace wavedirac
