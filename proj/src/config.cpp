#include "mfccert/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace mfc {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw ConfigError(path, "expected a finite number");
    return v;
}

std::size_t count(const json& j, const std::string& path)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ConfigError(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

Vector2 vec2(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(path, "expected an array of two numbers");
    return Vector2(number(j[0], index(path, 0)), number(j[1], index(path, 1)));
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known)
{
    const std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(join(path, it.key()), "unknown field");
}

void require_object(const json& j, const std::string& path)
{
    if (!j.is_object())
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

MsdParams parse_plant(const json& j, const std::string& path)
{
    require_object(j, path);
    reject_unknown(j, path, {"k", "c_d", "alpha", "m", "g0", "delta_k", "delta_c_d", "delta_alpha"});
    MsdParams p;
    auto field = [&](const char* key, double& out) {
        if (j.contains(key))
            out = number(j.at(key), join(path, key));
    };
    field("k", p.k);
    field("c_d", p.c_d);
    field("alpha", p.alpha);
    field("m", p.m);
    field("g0", p.g0);
    field("delta_k", p.delta_k);
    field("delta_c_d", p.delta_c_d);
    field("delta_alpha", p.delta_alpha);
    for (auto [key, value] : {std::pair{"m", p.m}, {"k", p.k}, {"c_d", p.c_d}, {"alpha", p.alpha}})
        if (!(value > 0.0))
            throw ConfigError(join(path, key), "must be positive");
    return p;
}

std::complex<double> parse_pole(const json& j, const std::string& path)
{
    if (j.is_number())
        return {number(j, path), 0.0};
    if (j.is_array() && j.size() == 2)
        return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
    throw ConfigError(path, "expected a number or a [re, im] pair");
}

template <class Kind, class Parse>
std::vector<Kind> parse_kinds(const json& j, const std::string& path, Parse parse)
{
    if (!j.is_array())
        throw ConfigError(path, "expected an array of names");
    std::vector<Kind> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string())
            throw ConfigError(index(path, i), "expected a string");
        const auto k = parse(j[i].get<std::string>());
        if (!k)
            throw ConfigError(index(path, i), "unknown name '" + j[i].get<std::string>() + "'");
        if (std::find(out.begin(), out.end(), *k) == out.end())
            out.push_back(*k);
    }
    if (out.empty())
        throw ConfigError(path, "at least one entry is required");
    return out;
}

} // namespace

ScenarioConfig parse_config(const json& j)
{
    require_object(j, "");
    reject_unknown(j, "",
                   {"name", "plant", "domain", "poles", "epsilon", "vartheta", "y_d", "x0", "x0_star", "horizon", "step",
                    "controllers", "roa_kinds", "falsify", "sweep", "perturbed_x0", "boundary_points", "region_samples"});

    ScenarioConfig c;
    if (j.contains("name")) {
        if (!j["name"].is_string())
            throw ConfigError("name", "expected a string");
        c.name = j["name"].get<std::string>();
    }
    if (j.contains("plant"))
        c.plant = parse_plant(j["plant"], "plant");

    if (j.contains("domain")) {
        const json& d = j["domain"];
        require_object(d, "domain");
        reject_unknown(d, "domain", {"lower", "upper"});
        if (!d.contains("lower") || !d.contains("upper"))
            throw ConfigError("domain", "needs both 'lower' and 'upper'");
        const Vector2 lo = vec2(d["lower"], "domain.lower");
        const Vector2 hi = vec2(d["upper"], "domain.upper");
        try {
            c.domain = Box(Vector(lo), Vector(hi));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("domain", e.what());
        }
    }

    if (j.contains("poles")) {
        const json& p = j["poles"];
        if (!p.is_array())
            throw ConfigError("poles", "expected an array");
        c.poles.clear();
        for (std::size_t i = 0; i < p.size(); ++i)
            c.poles.push_back(parse_pole(p[i], index("poles", i)));
    }
    if (c.poles.size() != 2)
        throw ConfigError("poles", "the mass-spring-damper needs exactly two poles");
    for (std::size_t i = 0; i < c.poles.size(); ++i)
        if (!(c.poles[i].real() < 0.0))
            throw ConfigError(index("poles", i), "real part must be negative");

    if (j.contains("epsilon"))
        c.epsilon = number(j["epsilon"], "epsilon");
    if (!(c.epsilon > 0.0 && c.epsilon <= 1.0))
        throw ConfigError("epsilon", "must lie in (0, 1]");
    if (j.contains("vartheta") && !j["vartheta"].is_null()) {
        c.vartheta = number(j["vartheta"], "vartheta");
        if (!(*c.vartheta > 0.0))
            throw ConfigError("vartheta", "must be positive");
    }

    if (j.contains("y_d"))
        c.y_d = number(j["y_d"], "y_d");
    if (j.contains("x0"))
        c.x0 = vec2(j["x0"], "x0");
    if (j.contains("x0_star"))
        c.x0_star = vec2(j["x0_star"], "x0_star");

    if (j.contains("step"))
        c.step = number(j["step"], "step");
    if (!(c.step > 0.0))
        throw ConfigError("step", "must be positive");
    if (j.contains("horizon"))
        c.horizon = number(j["horizon"], "horizon");
    if (!(c.horizon >= c.step))
        throw ConfigError("horizon", "must be at least one step");

    if (j.contains("controllers"))
        c.controllers = parse_kinds<ControllerKind>(j["controllers"], "controllers",
                                                    [](const std::string& s) { return parse_controller_kind(s); });
    if (j.contains("roa_kinds"))
        c.roa_kinds = parse_kinds<RoaKind>(j["roa_kinds"], "roa_kinds",
                                           [](const std::string& s) { return parse_roa_kind(s); });

    if (j.contains("falsify")) {
        const json& f = j["falsify"];
        if (f.is_null()) {
            c.falsify.reset();
        } else {
            require_object(f, "falsify");
            reject_unknown(f, "falsify", {"samples", "seed"});
            FalsifyConfig fc;
            if (f.contains("samples"))
                fc.samples = count(f["samples"], "falsify.samples");
            if (fc.samples == 0)
                throw ConfigError("falsify.samples", "must be at least 1");
            if (f.contains("seed")) {
                if (!f["seed"].is_number_unsigned() && !(f["seed"].is_number_integer() && f["seed"].get<long long>() >= 0))
                    throw ConfigError("falsify.seed", "expected a non-negative integer");
                fc.seed = f["seed"].get<std::uint64_t>();
            }
            c.falsify = fc;
        }
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        require_object(s, "sweep");
        reject_unknown(s, "sweep", {"y_d_min", "y_d_max", "count"});
        if (s.contains("y_d_min"))
            c.sweep.y_d_min = number(s["y_d_min"], "sweep.y_d_min");
        if (s.contains("y_d_max"))
            c.sweep.y_d_max = number(s["y_d_max"], "sweep.y_d_max");
        if (s.contains("count"))
            c.sweep.count = count(s["count"], "sweep.count");
    }
    if (c.sweep.count < 2)
        throw ConfigError("sweep.count", "must be at least 2");
    if (!(c.sweep.y_d_max > c.sweep.y_d_min))
        throw ConfigError("sweep.y_d_max", "must exceed sweep.y_d_min");

    if (j.contains("perturbed_x0")) {
        const json& p = j["perturbed_x0"];
        if (!p.is_array())
            throw ConfigError("perturbed_x0", "expected an array of states");
        for (std::size_t i = 0; i < p.size(); ++i)
            c.perturbed_x0.push_back(vec2(p[i], index("perturbed_x0", i)));
    }

    if (j.contains("boundary_points"))
        c.boundary_points = count(j["boundary_points"], "boundary_points");
    if (c.boundary_points < 3)
        throw ConfigError("boundary_points", "must be at least 3");
    if (j.contains("region_samples"))
        c.region_samples = count(j["region_samples"], "region_samples");
    if (c.region_samples < 16)
        throw ConfigError("region_samples", "must be at least 16");

    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config", "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const ScenarioConfig& c)
{
    json j;
    j["name"] = c.name;
    j["plant"] = {{"k", c.plant.k},
                  {"c_d", c.plant.c_d},
                  {"alpha", c.plant.alpha},
                  {"m", c.plant.m},
                  {"g0", c.plant.g0},
                  {"delta_k", c.plant.delta_k},
                  {"delta_c_d", c.plant.delta_c_d},
                  {"delta_alpha", c.plant.delta_alpha}};
    j["domain"] = {{"lower", {c.domain.lower(0), c.domain.lower(1)}}, {"upper", {c.domain.upper(0), c.domain.upper(1)}}};
    json poles = json::array();
    for (const auto& p : c.poles) {
        if (p.imag() == 0.0)
            poles.push_back(p.real());
        else
            poles.push_back({p.real(), p.imag()});
    }
    j["poles"] = poles;
    j["epsilon"] = c.epsilon;
    j["vartheta"] = c.vartheta ? json(*c.vartheta) : json(nullptr);
    j["y_d"] = c.y_d;
    j["x0"] = {c.x0(0), c.x0(1)};
    j["x0_star"] = {c.x0_star(0), c.x0_star(1)};
    j["horizon"] = c.horizon;
    j["step"] = c.step;
    json ctrl = json::array();
    for (auto k : c.controllers)
        ctrl.push_back(std::string(to_string(k)));
    j["controllers"] = ctrl;
    json roa = json::array();
    for (auto k : c.roa_kinds)
        roa.push_back(std::string(to_string(k)));
    j["roa_kinds"] = roa;
    j["falsify"] = c.falsify ? json{{"samples", c.falsify->samples}, {"seed", c.falsify->seed}} : json(nullptr);
    j["sweep"] = {{"y_d_min", c.sweep.y_d_min}, {"y_d_max", c.sweep.y_d_max}, {"count", c.sweep.count}};
    json pert = json::array();
    for (const auto& x : c.perturbed_x0)
        pert.push_back({x(0), x(1)});
    j["perturbed_x0"] = pert;
    j["boundary_points"] = c.boundary_points;
    j["region_samples"] = c.region_samples;
    return j;
}

ScenarioConfig preset(const std::string& name)
{
    ScenarioConfig c;
    c.name = name;
    c.vartheta = 1000.0;
    if (name == "scenario1") {
        c.y_d = 0.75;
        c.perturbed_x0 = {Vector2(0.1, -8.0), Vector2(-0.25, 6.0)};
    } else if (name == "scenario2") {
        c.y_d = 2.0;
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "' (expected scenario1 or scenario2)");
    }
    return c;
}

} // namespace mfc
