// config.cpp — defaults, JSON merge, validation, echo, hashing.

#include "jcdyn/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace jcdyn {

using nlohmann::json;

namespace {

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw ConfigError("config: " + where + " must be a number");
    return v.get<double>();
}

int as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        throw ConfigError("config: " + where + " must be an integer");
    return v.get<int>();
}

const json& as_object(const json& v, const std::string& where) {
    if (!v.is_object())
        throw ConfigError("config: " + where + " must be an object");
    return v;
}

void merge_system(const json& obj, SystemParams& sys) {
    for (const auto& [key, val] : obj.items()) {
        const std::string where = "system." + key;
        if (key == "g") sys.g = as_number(val, where);
        else if (key == "kappa") sys.kappa = as_number(val, where);
        else if (key == "gamma_x") sys.gamma_x = as_number(val, where);
        else if (key == "P_x") sys.P_x = as_number(val, where);
        else if (key == "gamma_theta") sys.gamma_theta = as_number(val, where);
        else if (key == "P_theta" || key == "omega_x" || key == "omega_c")
            throw ConfigError("config: system." + key +
                              " is derived from the thermal model per temperature");
        else
            throw ConfigError("config: unknown field system." + key);
    }
}

void merge_thermal(const json& obj, ThermalModel& th) {
    for (const auto& [key, val] : obj.items()) {
        const std::string where = "thermal." + key;
        if (key == "omega_c0") th.omega_c0 = as_number(val, where);
        else if (key == "a_idx") th.a_idx = as_number(val, where);
        else if (key == "E_g0") th.E_g0 = as_number(val, where);
        else if (key == "alpha_v") th.alpha_v = as_number(val, where);
        else if (key == "beta_v") th.beta_v = as_number(val, where);
        else if (key == "P_tilde") th.P_tilde = as_number(val, where);
        else if (key == "A") th.A = as_number(val, where);
        else if (key == "B") th.B = as_number(val, where);
        else if (key == "T_prime") th.T_prime = as_number(val, where);
        else
            throw ConfigError("config: unknown field thermal." + key);
    }
}

void merge_sweep(const json& obj, SweepSpec& sw) {
    for (const auto& [key, val] : obj.items()) {
        const std::string where = "sweep." + key;
        if (key == "T_min") sw.T_min = as_number(val, where);
        else if (key == "T_max") sw.T_max = as_number(val, where);
        else if (key == "steps") sw.steps = as_integer(val, where);
        else
            throw ConfigError("config: unknown field sweep." + key);
    }
}

void merge_numerics(const json& obj, NumericsSpec& nu) {
    for (const auto& [key, val] : obj.items()) {
        const std::string where = "numerics." + key;
        if (key == "n_max") nu.n_max = as_integer(val, where);
        else if (key == "omega_points") nu.omega_points = as_integer(val, where);
        else if (key == "omega_span_g") nu.omega_span_g = as_number(val, where);
        else if (key == "min_prominence") nu.min_prominence = as_number(val, where);
        else if (key == "tie_tol") nu.tie_tol = as_number(val, where);
        else
            throw ConfigError("config: unknown field numerics." + key);
    }
}

void merge_blocks(const json& obj, BlockScaling& bl) {
    for (const auto& [key, val] : obj.items()) {
        const std::string where = "blocks." + key;
        if (key == "kappa_over_g") bl.kappa_over_g = as_number(val, where);
        else if (key == "gamma_x_over_g") bl.gamma_x_over_g = as_number(val, where);
        else if (key == "P_tilde_over_g") bl.P_tilde_over_g = as_number(val, where);
        else if (key == "coeff_delta_over_g")
            bl.coeff_delta_over_g = as_number(val, where);
        else
            throw ConfigError("config: unknown field blocks." + key);
    }
}

const std::vector<std::string>& known_figures() {
    static const std::vector<std::string> f = {"spectra", "peaks", "blocks",
                                               "ep_map", "coefficients"};
    return f;
}

void merge_outputs(const json& obj, OutputSpec& out) {
    for (const auto& [key, val] : obj.items()) {
        if (key == "dir") {
            if (!val.is_string())
                throw ConfigError("config: outputs.dir must be a string");
            out.dir = val.get<std::string>();
        } else if (key == "figures") {
            if (!val.is_array())
                throw ConfigError("config: outputs.figures must be an array");
            out.figures.clear();
            for (const auto& item : val) {
                if (!item.is_string())
                    throw ConfigError("config: outputs.figures entries must be strings");
                out.figures.push_back(item.get<std::string>());
            }
        } else {
            throw ConfigError("config: unknown field outputs." + key);
        }
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.system.g = 0.3;
    cfg.system.kappa = 0.1;
    cfg.system.gamma_x = 0.001;
    cfg.system.P_x = 0.06;
    cfg.system.gamma_theta = 0.0;
    return cfg;  // thermal/sweep/numerics/blocks/outputs carry their own defaults
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config: top level must be an object");

    RunConfig cfg = default_config();
    for (const auto& [key, val] : doc.items()) {
        if (key == "system") merge_system(as_object(val, key), cfg.system);
        else if (key == "thermal") merge_thermal(as_object(val, key), cfg.thermal);
        else if (key == "sweep") merge_sweep(as_object(val, key), cfg.sweep);
        else if (key == "numerics") merge_numerics(as_object(val, key), cfg.numerics);
        else if (key == "blocks") merge_blocks(as_object(val, key), cfg.blocks);
        else if (key == "outputs") merge_outputs(as_object(val, key), cfg.outputs);
        else throw ConfigError("config: unknown section " + key);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void RunConfig::validate() const {
    try {
        system.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: system: ") + e.what());
    }
    try {
        thermal.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: thermal: ") + e.what());
    }
    if (!(system.g > 0.0))
        throw ConfigError("config: system.g must be > 0");
    if (!(sweep.T_min >= 0.0))
        throw ConfigError("config: sweep.T_min must be >= 0");
    if (!(sweep.T_min < sweep.T_max))
        throw ConfigError("config: sweep.T_min must be < sweep.T_max");
    if (sweep.steps < 2)
        throw ConfigError("config: sweep.steps must be >= 2");
    if (numerics.n_max < 2)
        throw ConfigError("config: numerics.n_max must be >= 2");
    if (numerics.omega_points < 3)
        throw ConfigError("config: numerics.omega_points must be >= 3");
    if (!(numerics.omega_span_g > 0.0))
        throw ConfigError("config: numerics.omega_span_g must be > 0");
    if (!(numerics.min_prominence > 0.0) || !(numerics.min_prominence < 1.0))
        throw ConfigError("config: numerics.min_prominence must be in (0, 1)");
    if (!(numerics.tie_tol > 0.0))
        throw ConfigError("config: numerics.tie_tol must be > 0");
    if (!(blocks.kappa_over_g > 0.0))
        throw ConfigError("config: blocks.kappa_over_g must be > 0");
    if (!(blocks.gamma_x_over_g >= 0.0))
        throw ConfigError("config: blocks.gamma_x_over_g must be >= 0");
    if (!(blocks.P_tilde_over_g > 0.0))
        throw ConfigError("config: blocks.P_tilde_over_g must be > 0");
    if (!std::isfinite(blocks.coeff_delta_over_g))
        throw ConfigError("config: blocks.coeff_delta_over_g must be finite");
    if (outputs.dir.empty())
        throw ConfigError("config: outputs.dir must not be empty");
    for (const std::string& f : outputs.figures) {
        const auto& known = known_figures();
        if (std::find(known.begin(), known.end(), f) == known.end())
            throw ConfigError("config: unknown figure in outputs.figures: " + f);
    }
}

std::string RunConfig::to_json() const {
    json doc;
    doc["system"] = {{"g", system.g},
                     {"kappa", system.kappa},
                     {"gamma_x", system.gamma_x},
                     {"P_x", system.P_x},
                     {"gamma_theta", system.gamma_theta}};
    doc["thermal"] = {{"omega_c0", thermal.omega_c0}, {"a_idx", thermal.a_idx},
                      {"E_g0", thermal.E_g0},         {"alpha_v", thermal.alpha_v},
                      {"beta_v", thermal.beta_v},     {"P_tilde", thermal.P_tilde},
                      {"A", thermal.A},               {"B", thermal.B},
                      {"T_prime", thermal.T_prime}};
    doc["sweep"] = {{"T_min", sweep.T_min},
                    {"T_max", sweep.T_max},
                    {"steps", sweep.steps}};
    doc["numerics"] = {{"n_max", numerics.n_max},
                       {"omega_points", numerics.omega_points},
                       {"omega_span_g", numerics.omega_span_g},
                       {"min_prominence", numerics.min_prominence},
                       {"tie_tol", numerics.tie_tol}};
    doc["blocks"] = {{"kappa_over_g", blocks.kappa_over_g},
                     {"gamma_x_over_g", blocks.gamma_x_over_g},
                     {"P_tilde_over_g", blocks.P_tilde_over_g},
                     {"coeff_delta_over_g", blocks.coeff_delta_over_g}};
    doc["outputs"] = {{"dir", outputs.dir}, {"figures", outputs.figures}};
    return doc.dump(2) + "\n";
}

std::uint64_t RunConfig::hash() const {
    const std::string s = to_json();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace jcdyn
