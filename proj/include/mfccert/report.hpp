#pragma once

#include "mfccert/config.hpp"
#include "mfccert/falsify.hpp"
#include "mfccert/roa.hpp"
#include "mfccert/simulate.hpp"
#include "mfccert/steady_state.hpp"
#include "mfccert/synthesis.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mfc {

struct Analysis {
    ScenarioConfig config;
    GainSet gains;
    LyapunovCertificate cert;
};

Analysis analyze(const ScenarioConfig& cfg);
nlohmann::json to_json(const Analysis& a);

struct SteadyStates {
    EquilibriumSet sl;
    EquilibriumSet slhg;
    EquilibriumSet mfc;
    Vector2 fflin;           // equilibrium of the standalone feedforward loop
    double multiplicity_loss = 0.0; // y_d where the k* single loop drops to one root (NaN if never)
    std::vector<SweepRow> sweep;
};

SteadyStates steady_states(const Analysis& a);
nlohmann::json to_json(const EquilibriumSet& eq);
nlohmann::json to_json(const SteadyStates& s);
/// Columns y_d,n_sl,sl_root1..3,n_mfc,mfc_root1..3; missing roots are empty.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct RoaResult {
    RoaInputs inputs;
    std::vector<RoaEstimate> estimates;
    Radius r_a;
    double c_star_bound = 0.0;
    std::optional<LevelComparison> comparison;
    std::optional<Mfc2Region> region;
    double slhg_area = 0.0;

    const RoaEstimate* find(RoaKind kind) const;
};

RoaResult roa(const Analysis& a);
nlohmann::json to_json(const RoaEstimate& e);
nlohmann::json to_json(const RoaResult& r);
/// Columns kind,x1,x2. Kinds: one per valid estimate, MSTAR (model-loop
/// level c* around x_d), MFC2_UNION and MFC2_ENVELOPE polygons.
void write_boundary_csv(std::ostream& os, const RoaResult& r, std::size_t points);

struct SimulationRun {
    std::string label;
    ControllerKind kind = ControllerKind::MFC;
    Vector2 x0;
    Vector2 x0_star;
    Vector2 x_s;
    std::optional<Trajectory> trajectory;
    std::optional<Metrics> metrics;
    double reconverge_time = 0.0; // MFC: |x - x*| < 0.01 from here on
    std::string failure;
    double failure_time = 0.0;
};

std::vector<SimulationRun> simulate_all(const Analysis& a, const SteadyStates& s);
nlohmann::json to_json(const SimulationRun& run);

std::vector<FalsificationReport> falsify_all(const Analysis& a, const RoaResult& r);
nlohmann::json to_json(const FalsificationReport& rep);

/// Per-row tolerances for `reproduce`, keyed by row id.
struct Tolerances {
    std::map<std::string, double> values;

    static Tolerances defaults();
    /// Overrides from a JSON object of id -> number; unknown ids are rejected.
    void apply(const nlohmann::json& j);
    double at(const std::string& id) const;
};

enum class Check { relative, absolute, below, above, info };

struct SummaryRow {
    std::string id;
    std::string quantity;
    double computed = 0.0;
    double reference = 0.0;
    Check check = Check::info;
    double tolerance = 0.0;
    bool pass = true;
    std::string note;
};

struct Reproduction {
    Analysis analysis;
    SteadyStates steady;
    RoaResult roa;
    std::vector<SimulationRun> runs;
    std::vector<FalsificationReport> falsification;
    std::vector<SummaryRow> summary;

    bool all_pass() const;
};

/// Runs every stage and compares against the published case-study figures
/// for scenario1 / scenario2 (other names get no reference rows).
Reproduction reproduce(const ScenarioConfig& cfg, const Tolerances& tol);

nlohmann::json to_json(const std::vector<SummaryRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

} // namespace mfc
