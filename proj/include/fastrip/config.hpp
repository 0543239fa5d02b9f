#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastrip/chain_spec.hpp"
#include "fastrip/errors.hpp"

namespace fastrip {

// Full experiment description, parsed from flat `key = value` text.
// Unknown keys are a hard error. `emit_config(parse_config(text))` is the
// normalized fixed-point.
struct ExperimentConfig {
    ChainRecipe recipe;
    std::uint64_t trials = 1000;
    std::string out;
    std::string method = "monte-carlo";  // rip: monte-carlo | exact
    std::string probe = "e0";            // chaos: e0 | random
    int max_iters = 200;
    double tol = 1e-10;
    double step = 1.0;
    int instances = 100;  // recover: instances per run
    std::vector<std::size_t> n_list;
    int repeats = 11;
    bool timing = false;  // emit wall-clock columns (breaks byte determinism)
};

namespace detail {

inline std::vector<std::size_t> parse_n_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ConfigParse("empty entry in n_list");
        out.push_back(parse_u64(tok, "n_list"));
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1]) throw ConfigParse("n_list must be strictly ascending");
    return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigParse("bad boolean '" + s + "' for key '" + key + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    for (const auto& [key, value] : detail::parse_flat(text)) {
        if (key == "construction") cfg.recipe.construction = construction_from_string(value);
        else if (key == "transform") cfg.recipe.transform = transform_from_string(value);
        else if (key == "n") cfg.recipe.n = detail::parse_u64(value, key);
        else if (key == "k") cfg.recipe.k = detail::parse_u64(value, key);
        else if (key == "s") cfg.recipe.s = detail::parse_u64(value, key);
        else if (key == "omega") set_omega_from_string(cfg.recipe, value);
        else if (key == "c_kappa") cfg.recipe.c_kappa = detail::parse_double(value, key);
        else if (key == "kappa_override")
            cfg.recipe.kappa_override = detail::parse_double(value, key);
        else if (key == "master_seed") cfg.recipe.seed = detail::parse_u64(value, key);
        else if (key == "trials") cfg.trials = detail::parse_u64(value, key);
        else if (key == "out") cfg.out = value;
        else if (key == "method") {
            if (value != "monte-carlo" && value != "exact")
                throw ConfigParse("method must be monte-carlo or exact");
            cfg.method = value;
        } else if (key == "probe") {
            if (value != "e0" && value != "random")
                throw ConfigParse("probe must be e0 or random");
            cfg.probe = value;
        } else if (key == "max_iters")
            cfg.max_iters = static_cast<int>(detail::parse_u64(value, key));
        else if (key == "tol") cfg.tol = detail::parse_double(value, key);
        else if (key == "step") cfg.step = detail::parse_double(value, key);
        else if (key == "instances")
            cfg.instances = static_cast<int>(detail::parse_u64(value, key));
        else if (key == "n_list") cfg.n_list = detail::parse_n_list(value);
        else if (key == "repeats")
            cfg.repeats = static_cast<int>(detail::parse_u64(value, key));
        else if (key == "timing") cfg.timing = detail::parse_bool(value, key);
        else throw ConfigParse("unknown config key '" + key + "'");
    }
    return cfg;
}

inline std::string emit_config(const ExperimentConfig& cfg) {
    std::string out;
    out += "construction = " + to_string(cfg.recipe.construction) + "\n";
    out += "transform = " + to_string(cfg.recipe.transform) + "\n";
    out += "n = " + std::to_string(cfg.recipe.n) + "\n";
    out += "k = " + std::to_string(cfg.recipe.k) + "\n";
    out += "s = " + std::to_string(cfg.recipe.s) + "\n";
    out += "omega = " + omega_to_string(cfg.recipe) + "\n";
    out += "c_kappa = " + detail::format_double(cfg.recipe.c_kappa) + "\n";
    if (cfg.recipe.kappa_override)
        out += "kappa_override = " + detail::format_double(*cfg.recipe.kappa_override) + "\n";
    out += "master_seed = " + std::to_string(cfg.recipe.seed) + "\n";
    out += "trials = " + std::to_string(cfg.trials) + "\n";
    if (!cfg.out.empty()) out += "out = " + cfg.out + "\n";
    out += "method = " + cfg.method + "\n";
    out += "probe = " + cfg.probe + "\n";
    out += "max_iters = " + std::to_string(cfg.max_iters) + "\n";
    out += "tol = " + detail::format_double(cfg.tol) + "\n";
    out += "step = " + detail::format_double(cfg.step) + "\n";
    out += "instances = " + std::to_string(cfg.instances) + "\n";
    if (!cfg.n_list.empty()) {
        out += "n_list = ";
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(cfg.n_list[i]);
        }
        out += "\n";
    }
    out += "repeats = " + std::to_string(cfg.repeats) + "\n";
    out += std::string("timing = ") + (cfg.timing ? "true" : "false") + "\n";
    return out;
}

// Single-line form embedded in CSV header comments; enough to reproduce
// the run byte for byte.
inline std::string config_summary_line(const ExperimentConfig& cfg) {
    std::string flat = emit_config(cfg);
    std::string line = "# config:";
    std::string token;
    std::istringstream in(flat);
    while (std::getline(in, token)) {
        std::string compact;
        for (const char c : token)
            if (c != ' ') compact += c;
        // the output path does not affect any result and would break
        // byte-comparison of otherwise identical artifacts
        if (compact.rfind("out=", 0) == 0) continue;
        line += " " + compact + ";";
    }
    return line;
}

}  // namespace fastrip
