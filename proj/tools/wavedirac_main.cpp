#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wavedirac/scenario.hpp"

namespace {

int run_command(const std::string& scenario_path, const std::string& out_flag,
                const std::vector<std::string>& tol_flags, std::int64_t seed_flag) {
    using namespace wavedirac;

    RunOptions options;
    if (const char* env = std::getenv("WAVEDIRAC_OUT_DIR")) options.out_dir = env;
    if (!out_flag.empty()) options.out_dir = out_flag;
    if (seed_flag >= 0) options.seed = static_cast<std::uint64_t>(seed_flag);
    for (const std::string& spec : tol_flags) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --tol expects NAME=VALUE, got '" << spec << "'\n";
            return 2;
        }
        try {
            options.tolerances[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
        } catch (const std::exception&) {
            std::cerr << "error: bad tolerance value in '" << spec << "'\n";
            return 2;
        }
    }

    Scenario scenario;
    try {
        scenario = parse_scenario(scenario_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    }

    Report report;
    try {
        report = run_scenario(scenario, options);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    }

    const std::string body = serialize_report(report, true);
    const auto report_path = options.out_dir / (scenario.name + "_report.json");
    std::ofstream out(report_path, std::ios::binary);
    out << body;
    out.close();
    std::cout << body;
    std::cout << "report: " << report_path.string() << "\n";

    if (!report.pass) {
        for (const auto& task : report.tasks)
            for (const auto& [name, entry] : task.residuals)
                if (!entry.pass)
                    std::cerr << "FAIL " << task.name << "/" << name << ": "
                              << entry.value << " > " << entry.tolerance << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped wave equation / Dirac operator verification lab"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    std::vector<std::string> tol_flags;
    std::int64_t seed_flag = -1;

    CLI::App* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory for reports and CSV");
    run->add_option("--tol", tol_flags, "override a tolerance, NAME=VALUE");
    run->add_option("--seed", seed_flag, "override the scenario seed");

    CLI::App* list = app.add_subcommand("list-tasks", "List available task names");
    CLI::App* version = app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& name : wavedirac::known_tasks()) std::cout << name << "\n";
        return 0;
    }
    if (version->parsed()) {
        std::cout << wavedirac::version_string() << "\n";
        return 0;
    }
    return run_command(scenario_path, out_dir, tol_flags, seed_flag);
}
