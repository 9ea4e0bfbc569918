// config.hpp: declarative run configuration, JSON (de)serialization,
// dotted-key overrides and the figure presets.

#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cavity_ssh/errors.hpp"
#include "cavity_ssh/model.hpp"

namespace cavity_ssh::cli {

using nlohmann::json;

enum class Command { spectrum_scan, topology_scan, bloch_traj, dynamics, rwa_bands, convergence };

inline constexpr std::string_view command_name(Command c) {
    switch (c) {
        case Command::spectrum_scan: return "spectrum-scan";
        case Command::topology_scan: return "topology-scan";
        case Command::bloch_traj: return "bloch-traj";
        case Command::dynamics: return "dynamics";
        case Command::rwa_bands: return "rwa-bands";
        case Command::convergence: return "convergence";
    }
    return "?";
}

inline Command parse_command(std::string_view s) {
    for (auto c : {Command::spectrum_scan, Command::topology_scan, Command::bloch_traj,
                   Command::dynamics, Command::rwa_bands, Command::convergence}) {
        if (command_name(c) == s) return c;
    }
    throw Error(ErrorCode::ConfigInvalid, "command: unknown value '" + std::string(s) + "'");
}

struct Grids {
    double omega_min{1.0};
    double omega_max{8.0};
    int omega_points{241};
    std::vector<double> omegas;  // explicit list; replaces the range when nonempty
    int k_points{512};
    double t_max{200.0};
    int t_points{1000};

    std::vector<double> omega_grid() const {
        if (!omegas.empty()) return omegas;
        std::vector<double> g(static_cast<std::size_t>(omega_points));
        for (int i = 0; i < omega_points; ++i) {
            g[static_cast<std::size_t>(i)] =
                omega_points == 1 ? omega_min
                                  : omega_min + (omega_max - omega_min) * i / (omega_points - 1);
        }
        return g;
    }
};

/// A named parameter set run in its own subdirectory.
struct Variant {
    std::string label;
    ModelParams params;
};

struct RunConfig {
    Command command{Command::spectrum_scan};
    ModelParams params;
    Grids grids;
    int block_n{0};          // photon subspace n of the RWA block
    int initial_site{24};    // 1-based
    int initial_photons{5};
    int levels{10};          // convergence check
    bool many_body{true};    // many-body Zak phases in topology scans
    std::uint64_t seed{0};   // 0: no gauge randomization
    std::string output_dir{"out"};
    std::vector<Variant> variants;
};

namespace detail {

inline json params_to_json(const ModelParams& p) {
    return {{"J", p.J}, {"Jp", p.Jp}, {"g", p.g}, {"omega", p.omega},
            {"n_sites", p.n_sites}, {"n_max", p.n_max}};
}

[[noreturn]] inline void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ConfigInvalid, field + ": " + what);
}

inline void reject_unknown(const json& j, const std::string& where,
                           std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) invalid(where + key, "unknown key");
    }
}

template <typename T>
T get_field(const json& j, const std::string& where, const std::string& key) {
    const auto it = j.find(key);
    if (it == j.end()) invalid(where + key, "missing required field");
    try {
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!it->is_number_integer() && !it->is_number_unsigned()) {
                invalid(where + key, "expected an integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) invalid(where + key, "expected a number");
        }
        return it->template get<T>();
    } catch (const json::exception& e) {
        invalid(where + key, e.what());
    }
}

template <typename T>
void get_optional(const json& j, const std::string& where, const std::string& key, T& out) {
    if (j.contains(key)) out = get_field<T>(j, where, key);
}

inline ModelParams params_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) invalid(where.empty() ? "params" : where, "expected an object");
    reject_unknown(j, where, {"J", "Jp", "g", "omega", "n_sites", "n_max"});
    ModelParams p;
    p.J = get_field<double>(j, where, "J");
    p.Jp = get_field<double>(j, where, "Jp");
    p.g = get_field<double>(j, where, "g");
    p.omega = get_field<double>(j, where, "omega");
    p.n_sites = get_field<int>(j, where, "n_sites");
    p.n_max = get_field<int>(j, where, "n_max");
    try {
        p.validate();
    } catch (const Error& e) {
        invalid(where.empty() ? "params" : where.substr(0, where.size() - 1), e.what());
    }
    return p;
}

} // namespace detail

inline json to_json(const RunConfig& c) {
    json variants = json::array();
    for (const auto& v : c.variants) {
        variants.push_back({{"label", v.label}, {"params", detail::params_to_json(v.params)}});
    }
    return {
        {"command", std::string(command_name(c.command))},
        {"params", detail::params_to_json(c.params)},
        {"grids",
         {{"omega_min", c.grids.omega_min},
          {"omega_max", c.grids.omega_max},
          {"omega_points", c.grids.omega_points},
          {"omegas", c.grids.omegas},
          {"k_points", c.grids.k_points},
          {"t_max", c.grids.t_max},
          {"t_points", c.grids.t_points}}},
        {"block_n", c.block_n},
        {"initial_site", c.initial_site},
        {"initial_photons", c.initial_photons},
        {"levels", c.levels},
        {"many_body", c.many_body},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"variants", variants},
    };
}

/// Checks grids and indices against the command. Throws ConfigInvalid
/// naming the offending field.
inline void validate(const RunConfig& c) {
    const auto& g = c.grids;
    if (g.omegas.empty()) {
        if (g.omega_points < 1) detail::invalid("grids.omega_points", "must be >= 1");
        if (!(g.omega_max >= g.omega_min)) detail::invalid("grids.omega_max", "must be >= omega_min");
        if (!(g.omega_min > 0.0)) detail::invalid("grids.omega_min", "must be > 0");
    }
    for (double w : g.omegas) {
        if (!(w > 0.0)) detail::invalid("grids.omegas", "entries must be > 0");
    }
    const int min_k = c.command == Command::bloch_traj ? 256 : 64;
    if (g.k_points < min_k) detail::invalid("grids.k_points", "must be >= " + std::to_string(min_k));
    if (g.t_points < 1) detail::invalid("grids.t_points", "must be >= 1");
    if (!(g.t_max >= 0.0)) detail::invalid("grids.t_max", "must be >= 0");
    if (c.block_n < 0) detail::invalid("block_n", "must be >= 0");
    if (c.levels < 1) detail::invalid("levels", "must be >= 1");
    if (c.output_dir.empty()) detail::invalid("output_dir", "must be nonempty");

    std::set<std::string> labels;
    std::vector<ModelParams> sets{c.params};
    for (const auto& v : c.variants) {
        if (v.label.empty() || v.label.find_first_of("/\\") != std::string::npos) {
            detail::invalid("variants.label", "'" + v.label + "' is not a plain directory name");
        }
        if (!labels.insert(v.label).second) detail::invalid("variants.label", "duplicate '" + v.label + "'");
        sets.push_back(v.params);
    }
    for (const auto& p : sets) {
        if (c.command == Command::dynamics) {
            if (c.initial_site < 1 || c.initial_site > p.n_sites) {
                detail::invalid("initial_site", "must lie in [1, n_sites]");
            }
            if (c.initial_photons < 0 || c.initial_photons > p.n_max) {
                detail::invalid("initial_photons", "must lie in [0, n_max]");
            }
        }
        if (c.command == Command::convergence && p.n_max < 2) {
            detail::invalid("params.n_max", "convergence needs n_max >= 2");
        }
    }
}

inline RunConfig from_json(const json& j) {
    using detail::get_optional;
    if (!j.is_object()) detail::invalid("config", "expected a JSON object");
    detail::reject_unknown(j, "", {"command", "params", "grids", "block_n", "initial_site",
                                   "initial_photons", "levels", "many_body", "seed", "output_dir",
                                   "variants"});
    RunConfig c;
    c.command = parse_command(detail::get_field<std::string>(j, "", "command"));
    if (!j.contains("params")) detail::invalid("params", "missing required field");
    c.params = detail::params_from_json(j.at("params"), "params.");

    if (j.contains("grids")) {
        const auto& g = j.at("grids");
        if (!g.is_object()) detail::invalid("grids", "expected an object");
        detail::reject_unknown(g, "grids.", {"omega_min", "omega_max", "omega_points", "omegas",
                                             "k_points", "t_max", "t_points"});
        get_optional(g, "grids.", "omega_min", c.grids.omega_min);
        get_optional(g, "grids.", "omega_max", c.grids.omega_max);
        get_optional(g, "grids.", "omega_points", c.grids.omega_points);
        get_optional(g, "grids.", "omegas", c.grids.omegas);
        get_optional(g, "grids.", "k_points", c.grids.k_points);
        get_optional(g, "grids.", "t_max", c.grids.t_max);
        get_optional(g, "grids.", "t_points", c.grids.t_points);
    }
    get_optional(j, "", "block_n", c.block_n);
    get_optional(j, "", "initial_site", c.initial_site);
    get_optional(j, "", "initial_photons", c.initial_photons);
    get_optional(j, "", "levels", c.levels);
    get_optional(j, "", "many_body", c.many_body);
    get_optional(j, "", "seed", c.seed);
    get_optional(j, "", "output_dir", c.output_dir);
    if (j.contains("variants")) {
        const auto& vs = j.at("variants");
        if (!vs.is_array()) detail::invalid("variants", "expected an array");
        for (const auto& v : vs) {
            if (!v.is_object()) detail::invalid("variants", "entries must be objects");
            detail::reject_unknown(v, "variants.", {"label", "params"});
            Variant var;
            var.label = detail::get_field<std::string>(v, "variants.", "label");
            if (!v.contains("params")) detail::invalid("variants.params", "missing required field");
            var.params = detail::params_from_json(v.at("params"), "variants.params.");
            c.variants.push_back(std::move(var));
        }
    }
    validate(c);
    return c;
}

inline RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        detail::invalid("config", e.what());
    }
    return from_json(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) detail::invalid("config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Applies "key=value" with a dotted key (params.g, grids.k_points, seed).
/// Bare model-parameter names are shorthand for params.<name>. The value is
/// read as JSON when it parses, otherwise as a string.
inline RunConfig apply_override(const RunConfig& c, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        detail::invalid("--set", "expected key=value, got '" + std::string(assignment) + "'");
    }
    std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    static const std::set<std::string> param_names{"J", "Jp", "g", "omega", "n_sites", "n_max"};
    if (param_names.count(key)) key = "params." + key;

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json j = to_json(c);
    json* node = &j;
    std::string_view rest = key;
    while (true) {
        const auto dot = rest.find('.');
        const std::string part(rest.substr(0, dot));
        if (!node->is_object() || !node->contains(part)) detail::invalid(key, "unknown key");
        node = &(*node)[part];
        if (dot == std::string_view::npos) break;
        rest.remove_prefix(dot + 1);
    }
    *node = value;
    return from_json(j);
}

/// Named parameter sets behind the figure presets.
inline RunConfig preset(std::string_view name) {
    RunConfig c;
    ModelParams topo;  // J = 1, J' = 2
    topo.J = 1.0;
    topo.Jp = 2.0;
    topo.n_sites = 24;
    topo.n_max = 6;
    ModelParams trivial = topo;
    trivial.J = 2.0;
    trivial.Jp = 1.0;

    if (name == "fig1") {
        c.command = Command::spectrum_scan;
        c.params = topo;
        c.params.g = 0.35;
        c.params.omega = 1.0;
        c.grids.omega_min = 1.0;
        c.grids.omega_max = 8.0;
        c.grids.omega_points = 241;
    } else if (name == "fig2a") {
        c.command = Command::topology_scan;
        c.params = topo;
        c.params.g = 0.1;
        c.params.omega = 7.0;
        c.grids.omega_min = 2.5;
        c.grids.omega_max = 8.0;
        c.grids.omega_points = 121;
        c.grids.k_points = 512;
    } else if (name == "fig2b") {
        c.command = Command::bloch_traj;
        c.params = topo;
        c.params.g = 0.1;
        c.params.omega = 7.0;
        c.grids.omegas = {7.0, 6.0, 4.5};
        c.grids.k_points = 512;
    } else if (name == "fig2c") {
        c.command = Command::dynamics;
        c.params.J = 1.0;
        c.params.Jp = 0.5;
        c.params.g = 0.1;
        c.params.omega = 2.5;
        c.params.n_sites = 24;
        c.params.n_max = 10;
        c.initial_site = 24;
        c.initial_photons = 5;
    } else if (name == "appendix-dynamics") {
        c.command = Command::dynamics;
        c.params = topo;
        c.params.g = 0.1;
        c.params.n_max = 10;
        c.params.omega = 10.0;
        c.initial_site = 24;
        c.initial_photons = 5;
        auto with = [](ModelParams p, double omega) {
            p.g = 0.1;
            p.n_max = 10;
            p.omega = omega;
            return p;
        };
        c.variants = {{"detuned-topological", with(topo, 10.0)},
                      {"resonant-trivial", with(trivial, 4.0)},
                      {"resonant-topological", with(topo, 4.0)}};
    } else if (name == "appendix-zak") {
        c.command = Command::topology_scan;
        c.params = topo;
        c.params.g = 0.1;
        c.params.omega = 7.0;
        c.grids.omega_min = 1.0;
        c.grids.omega_max = 8.0;
        c.grids.omega_points = 141;
        auto with = [](ModelParams p) {
            p.g = 0.1;
            p.omega = 7.0;
            return p;
        };
        c.variants = {{"topological", with(topo)}, {"trivial", with(trivial)}};
    } else {
        throw Error(ErrorCode::UnknownPreset, "no preset named '" + std::string(name) + "'");
    }
    c.output_dir = "out/" + std::string(name);
    validate(c);
    return c;
}

inline std::vector<std::string> preset_names() {
    return {"fig1", "fig2a", "fig2b", "fig2c", "appendix-dynamics", "appendix-zak"};
}

} // namespace cavity_ssh::cli
