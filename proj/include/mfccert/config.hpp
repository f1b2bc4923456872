#pragma once

#include "mfccert/plant.hpp"
#include "mfccert/roa.hpp"
#include "mfccert/simulate.hpp"

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfc {

/// Invalid configuration; `field()` is the JSON path of the offending value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct FalsifyConfig {
    std::size_t samples = 500;
    std::uint64_t seed = 1;
};

struct SweepConfig {
    double y_d_min = 0.0;
    double y_d_max = 2.5;
    std::size_t count = 251;
};

struct ScenarioConfig {
    std::string name = "custom";
    MsdParams plant;
    Box domain = default_msd_domain();
    std::vector<std::complex<double>> poles{-2.0, -2.0};
    double epsilon = 0.1;
    std::optional<double> vartheta; // default 100 / epsilon
    double y_d = 0.75;
    Vector2 x0 = Vector2::Zero();
    Vector2 x0_star = Vector2::Zero();
    double horizon = 10.0;
    double step = 1e-3;
    std::vector<ControllerKind> controllers{ControllerKind::SL, ControllerKind::SLHG, ControllerKind::MFC, ControllerKind::FFLIN};
    std::vector<RoaKind> roa_kinds{RoaKind::MFC1, RoaKind::MFC2, RoaKind::SL, RoaKind::SLHG};
    std::optional<FalsifyConfig> falsify = FalsifyConfig{};
    SweepConfig sweep;
    std::vector<Vector2> perturbed_x0; // extra MFC runs with x0* as configured
    std::size_t boundary_points = 360;
    std::size_t region_samples = 90;

    double vartheta_value() const { return vartheta.value_or(100.0 / epsilon); }
};

/// Parses and validates; every failure names its field path.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

/// `scenario1` (y_d = 0.75) or `scenario2` (y_d = 2); throws ConfigError otherwise.
ScenarioConfig preset(const std::string& name);

} // namespace mfc
