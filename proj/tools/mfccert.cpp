// Command-line driver: analysis, steady states, ROA estimates, simulation,
// falsification and end-to-end reproduction of the mass-spring-damper study.

#include "mfccert/config.hpp"
#include "mfccert/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, config_error = 1, numerical_failure = 2, mismatch = 3 };

struct Options {
    std::string config_path;
    std::string preset = "scenario1";
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    std::optional<double> horizon;
    std::optional<std::size_t> samples;
    std::string tolerance_profile;
    std::string scenario;
};

mfc::ScenarioConfig resolve(const Options& o, const std::string& preset_name)
{
    mfc::ScenarioConfig cfg = o.config_path.empty() ? mfc::preset(preset_name) : mfc::load_config(o.config_path);
    json j = mfc::to_json(cfg);
    if (o.step)
        j["step"] = *o.step;
    if (o.horizon)
        j["horizon"] = *o.horizon;
    if (o.seed || o.samples) {
        json f = j["falsify"].is_null() ? json{{"samples", 500}, {"seed", 1}} : j["falsify"];
        if (o.seed)
            f["seed"] = *o.seed;
        if (o.samples)
            f["samples"] = *o.samples;
        j["falsify"] = f;
    }
    return mfc::parse_config(j);
}

fs::path prepare(const Options& o)
{
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream(path) << j.dump(2) << '\n';
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn)
{
    std::ofstream os(path);
    fn(os);
}

void run_analyze(const mfc::ScenarioConfig& cfg, const fs::path& dir)
{
    const json j = mfc::to_json(mfc::analyze(cfg));
    write_json(dir / "analysis.json", j);
    std::cout << j.dump(2) << '\n';
}

void run_steady_state(const mfc::ScenarioConfig& cfg, const fs::path& dir)
{
    const auto s = mfc::steady_states(mfc::analyze(cfg));
    const json j = mfc::to_json(s);
    write_json(dir / "steady_state.json", j);
    write_file(dir / "steady_state_sweep.csv", [&](std::ostream& os) { mfc::write_sweep_csv(os, s.sweep); });
    std::cout << j.dump(2) << '\n';
}

void run_roa(const mfc::ScenarioConfig& cfg, const fs::path& dir)
{
    const auto r = mfc::roa(mfc::analyze(cfg));
    const json j = mfc::to_json(r);
    write_json(dir / "roa.json", j);
    write_file(dir / "roa_boundaries.csv", [&](std::ostream& os) { mfc::write_boundary_csv(os, r, cfg.boundary_points); });
    std::cout << j.dump(2) << '\n';
}

json run_simulate(const mfc::ScenarioConfig& cfg, const fs::path& dir, bool print)
{
    const auto a = mfc::analyze(cfg);
    const auto runs = mfc::simulate_all(a, mfc::steady_states(a));
    json j = json::array();
    fs::create_directories(dir / "trajectories");
    for (const auto& run : runs) {
        j.push_back(mfc::to_json(run));
        if (run.trajectory)
            write_file(dir / "trajectories" / (run.label + ".csv"),
                       [&](std::ostream& os) { mfc::write_trajectory_csv(os, *run.trajectory); });
    }
    write_json(dir / "simulation.json", j);
    if (print)
        std::cout << j.dump(2) << '\n';
    return j;
}

bool run_falsify(const mfc::ScenarioConfig& cfg, const fs::path& dir)
{
    if (!cfg.falsify)
        throw mfc::ConfigError("falsify", "falsification is disabled in this configuration");
    const auto a = mfc::analyze(cfg);
    const auto reports = mfc::falsify_all(a, mfc::roa(a));
    json j = json::array();
    bool clean = true;
    for (const auto& r : reports) {
        j.push_back(mfc::to_json(r));
        clean = clean && r.violations.empty();
    }
    write_json(dir / "falsify.json", j);
    write_file(dir / "violations.csv", [&](std::ostream& os) {
        os << "estimate,";
        bool header = true;
        for (const auto& r : reports) {
            std::ostringstream part;
            mfc::write_violations_csv(part, r);
            std::istringstream lines(part.str());
            std::string line;
            std::getline(lines, line);
            if (header) {
                os << line << '\n';
                header = false;
            }
            while (std::getline(lines, line))
                os << mfc::to_string(r.kind) << ',' << line << '\n';
        }
        if (header)
            os << "index,mode,time,x1,x2,xstar1,xstar2\n";
    });
    std::cout << j.dump(2) << '\n';
    return clean;
}

int run_reproduce(const Options& o)
{
    mfc::ScenarioConfig cfg = resolve(o, o.scenario);
    cfg.name = o.scenario;
    mfc::Tolerances tol = mfc::Tolerances::defaults();
    if (!o.tolerance_profile.empty()) {
        std::ifstream in(o.tolerance_profile);
        if (!in)
            throw mfc::ConfigError("--tolerance-profile", "cannot open " + o.tolerance_profile);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw mfc::ConfigError("--tolerance-profile", e.what());
        }
        tol.apply(j);
    }

    const fs::path dir = prepare(o);
    const mfc::Reproduction rep = mfc::reproduce(cfg, tol);

    write_json(dir / "config.json", mfc::to_json(cfg));
    write_json(dir / "analysis.json", mfc::to_json(rep.analysis));
    write_json(dir / "steady_state.json", mfc::to_json(rep.steady));
    write_file(dir / "steady_state_sweep.csv", [&](std::ostream& os) { mfc::write_sweep_csv(os, rep.steady.sweep); });
    write_json(dir / "roa.json", mfc::to_json(rep.roa));
    write_file(dir / "roa_boundaries.csv",
               [&](std::ostream& os) { mfc::write_boundary_csv(os, rep.roa, cfg.boundary_points); });

    json sims = json::array();
    fs::create_directories(dir / "trajectories");
    for (const auto& run : rep.runs) {
        sims.push_back(mfc::to_json(run));
        if (run.trajectory)
            write_file(dir / "trajectories" / (run.label + ".csv"),
                       [&](std::ostream& os) { mfc::write_trajectory_csv(os, *run.trajectory); });
    }
    write_json(dir / "simulation.json", sims);

    json fals = json::array();
    for (const auto& r : rep.falsification)
        fals.push_back(mfc::to_json(r));
    write_json(dir / "falsify.json", fals);

    write_json(dir / "summary.json", mfc::to_json(rep.summary));
    write_file(dir / "summary.csv", [&](std::ostream& os) { mfc::write_summary_csv(os, rep.summary); });

    for (const auto& row : rep.summary) {
        std::cout << (row.check == mfc::Check::info ? "[info] " : row.pass ? "[pass] " : "[FAIL] ") << row.id << "  "
                  << row.quantity << "  computed=" << row.computed;
        if (row.check != mfc::Check::info)
            std::cout << "  reference=" << row.reference << "  tol=" << row.tolerance;
        if (!row.note.empty())
            std::cout << "  (" << row.note << ")";
        std::cout << '\n';
    }
    std::cout << (rep.all_pass() ? "reproduction matches" : "reproduction MISMATCH") << " -> " << dir.string() << '\n';
    return rep.all_pass() ? ok : mismatch;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Model-following control design and certification for the mass-spring-damper benchmark"};
    app.fallthrough();
    app.require_subcommand(1);

    Options o;
    app.add_option("--config", o.config_path, "Scenario configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--preset", o.preset, "Built-in scenario when no --config is given")
        ->check(CLI::IsMember({"scenario1", "scenario2"}));
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--seed", o.seed, "Falsification seed");
    app.add_option("--step", o.step, "Integrator step [s]")->check(CLI::PositiveNumber);
    app.add_option("--horizon", o.horizon, "Simulation horizon [s]")->check(CLI::PositiveNumber);
    app.add_option("--samples", o.samples, "Falsification samples per estimate")->check(CLI::PositiveNumber);
    app.add_option("--tolerance-profile", o.tolerance_profile, "JSON object overriding reproduction tolerances")
        ->check(CLI::ExistingFile);

    auto* analyze = app.add_subcommand("analyze", "Gains, Lyapunov matrix and robustness bounds");
    auto* steady = app.add_subcommand("steady-state", "Equilibria of all loops and the y_d sweep");
    auto* roa = app.add_subcommand("roa", "Region-of-attraction estimates and boundaries");
    auto* simulate = app.add_subcommand("simulate", "Closed-loop trajectories and metrics");
    auto* falsify = app.add_subcommand("falsify", "Monte-Carlo check of every certified set");
    auto* reproduce = app.add_subcommand("reproduce", "Run everything and compare with the published figures");
    reproduce->add_option("scenario", o.scenario, "scenario1 or scenario2")
        ->required()
        ->check(CLI::IsMember({"scenario1", "scenario2"}));
    auto* config = app.add_subcommand("config", "Write the resolved configuration as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    try {
        if (reproduce->parsed())
            return run_reproduce(o);

        const mfc::ScenarioConfig cfg = resolve(o, o.preset);
        const fs::path dir = prepare(o);
        if (config->parsed()) {
            const json j = mfc::to_json(cfg);
            write_json(dir / "config.json", j);
            std::cout << j.dump(2) << '\n';
        } else if (analyze->parsed()) {
            run_analyze(cfg, dir);
        } else if (steady->parsed()) {
            run_steady_state(cfg, dir);
        } else if (roa->parsed()) {
            run_roa(cfg, dir);
        } else if (simulate->parsed()) {
            const json runs = run_simulate(cfg, dir, true);
            for (const auto& r : runs)
                if (r.contains("failure"))
                    return numerical_failure;
        } else if (falsify->parsed()) {
            return run_falsify(cfg, dir) ? ok : mismatch;
        }
        return ok;
    } catch (const mfc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const mfc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_failure;
    }
}
