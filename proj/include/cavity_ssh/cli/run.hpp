// run.hpp: executes a RunConfig and writes CSV artifacts, a parameter
// sidecar and a checksummed manifest. Output is byte-identical for a fixed
// config: results are gathered by index and written from one thread.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "cavity_ssh/cli/config.hpp"
#include "cavity_ssh/dynamics.hpp"
#include "cavity_ssh/manybody.hpp"
#include "cavity_ssh/parallel.hpp"
#include "cavity_ssh/rwa.hpp"
#include "cavity_ssh/topology.hpp"

namespace cavity_ssh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

/// Files keyed by path relative to the output directory.
using Artifacts = std::map<std::string, std::string>;

struct RunResult {
    int exit_code{kExitOk};
    std::vector<std::string> files;  // relative paths, manifest included
    std::vector<std::string> messages;
};

namespace detail {

inline void add_spectrum(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                         int workers, Artifacts& out, RunResult& res) {
    const auto scan = spectrum_scan(p, c.grids.omega_grid(), workers);
    std::string s = "omega,level_index,energy,edge_weight\n";
    std::string g = "omega,bulk_gap,resonant_edge_levels,failure\n";
    for (std::size_t i = 0; i < scan.omegas.size(); ++i) {
        const double w = scan.omegas[i];
        if (scan.failures[i]) {
            res.messages.push_back(*scan.failures[i]);
            res.exit_code = kExitNumerical;
            g += fmt(w) + ",,," + *scan.failures[i] + "\n";
            continue;
        }
        const auto& e = scan.energies[i];
        for (Eigen::Index j = 0; j < e.size(); ++j) {
            s += fmt(w) + "," + std::to_string(j) + "," + fmt(e[j]) + "," +
                 fmt(scan.edge_weight[i][j]) + "\n";
        }
        g += fmt(w) + "," + fmt(scan.bulk_gap[i]) + "," +
             std::to_string(resonant_edge_levels(e, scan.edge_weight[i], w, p.n_max)) + ",\n";
    }
    out[prefix + "spectrum.csv"] = std::move(s);
    out[prefix + "gaps.csv"] = std::move(g);
}

inline std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }
inline std::string opt_zak(const std::optional<ZakPhase>& z) {
    return z ? fmt(z->in_units_of_pi()) : "";
}

inline void add_topology(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                         int workers, Artifacts& out, RunResult& res) {
    const auto grid = c.grids.omega_grid();
    std::vector<TopologyReport> reports(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        ModelParams q = p;
        q.omega = grid[i];
        try {
            reports[i] = invariant_decomposition(
                q, c.block_n, {c.grids.k_points, c.many_body, c.seed});
        } catch (const Error& e) {
            errors[i] = "omega=" + fmt(q.omega) + ": " + e.what();
        }
    });
    std::string t = "omega,nu0,nu_tilde,nu_total,zak_ground,zak_first_excited,flags\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!errors[i].empty()) {
            res.messages.push_back(errors[i]);
            res.exit_code = kExitNumerical;
            t += fmt(grid[i]) + ",,,,,,error\n";
            continue;
        }
        const auto& r = reports[i];
        std::string flags;
        for (const auto& f : r.closure_flags) {
            if (!flags.empty()) flags += ";";
            flags += "closure:" + f.source + "@k=" + fmt(f.k);
        }
        for (const auto& w : r.warnings) {
            res.messages.push_back("omega=" + fmt(r.omega) + ": " + w);
            if (!flags.empty()) flags += ";";
            flags += "zak_tracking_failed";
        }
        t += fmt(r.omega) + "," + opt_int(r.nu0) + "," + opt_int(r.nu_tilde) + "," +
             opt_int(r.nu_total) + "," + opt_zak(r.zak_ground) + "," +
             opt_zak(r.zak_first_excited) + "," + flags + "\n";
    }
    out[prefix + "topology.csv"] = std::move(t);
}

inline void add_bloch(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                      Artifacts& out) {
    std::string summary = "omega,winding,encloses_origin,origin_on_path,min_radius\n";
    for (double w : c.grids.omega_grid()) {
        ModelParams q = p;
        q.omega = w;
        const auto tr = bloch_trajectory(c.block_n, c.grids.k_points, q);
        std::string s = "k,v_x,v_y\n";
        for (std::size_t j = 0; j < tr.ks.size(); ++j) {
            s += fmt(tr.ks[j]) + "," + fmt(tr.points[j][0]) + "," + fmt(tr.points[j][1]) + "\n";
        }
        out[prefix + "trajectory_omega_" + fmt(w) + ".csv"] = std::move(s);
        summary += fmt(w) + "," + std::to_string(tr.winding) + "," +
                   (tr.encloses_origin ? "1" : "0") + "," + (tr.origin_on_path ? "1" : "0") +
                   "," + fmt(tr.min_radius) + "\n";
    }
    out[prefix + "bloch_summary.csv"] = std::move(summary);
}

inline void add_dynamics(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                         int workers, Artifacts& out) {
    const auto basis = ManyBodyBasis::real_space(p);
    const auto psi0 = initial_edge_state(c.initial_site, c.initial_photons, basis);
    const auto times = time_grid(c.grids.t_max, c.grids.t_points);
    const auto tr = evolve(build_obc_hamiltonian(p), psi0, times, basis, workers);
    const auto edge = return_probability(tr, edge_region(c.initial_site, p.n_sites));

    std::string s = "t,observable,index,value\n";
    double window_min = 1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto ti = static_cast<Eigen::Index>(i);
        const std::string t = fmt(times[i]);
        for (int site = 0; site < p.n_sites; ++site) {
            s += t + ",site_occupation," + std::to_string(site + 1) + "," +
                 fmt(tr.site_occupation(site, ti)) + "\n";
        }
        double window = 0.0;
        for (int n = 0; n <= p.n_max; ++n) {
            const double pn = tr.photon_populations(n, ti);
            s += t + ",photon_population," + std::to_string(n) + "," + fmt(pn) + "\n";
            if (std::abs(n - c.initial_photons) <= 1) window += pn;
        }
        window_min = std::min(window_min, window);
        s += t + ",edge_return,0," + fmt(edge[i]) + "\n";
        s += t + ",norm,0," + fmt(tr.norm_series[i]) + "\n";
        s += t + ",energy,0," + fmt(tr.energy_series[i]) + "\n";
    }
    out[prefix + "dynamics.csv"] = std::move(s);

    double max_dev = 0.0;
    for (Eigen::Index ti = 0; ti < tr.photon_populations.cols(); ++ti) {
        max_dev = std::max(max_dev, 1.0 - tr.photon_populations(c.initial_photons, ti));
    }
    out[prefix + "dynamics_summary.csv"] =
        "metric,value\nedge_return_average," + fmt(time_average(edge)) +
        "\nmin_photon_window_population," + fmt(window_min) +
        "\nmax_initial_photon_depletion," + fmt(max_dev) + "\n";
}

inline void add_rwa_bands(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                          Artifacts& out) {
    std::string s = "k,n,rwa_minus,rwa_plus\n";
    for (int n = 0; n < std::max(1, p.n_max); ++n) {
        for (int j = 0; j < c.grids.k_points; ++j) {
            const double k = bz_point(j, c.grids.k_points);
            const auto b = rwa_bands(n, k, p);
            s += fmt(k) + "," + std::to_string(n) + "," + fmt(b.minus) + "," + fmt(b.plus) + "\n";
        }
    }
    out[prefix + "rwa_bands.csv"] = std::move(s);
}

inline void add_convergence(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                            Artifacts& out, RunResult& res) {
    const auto r = truncation_convergence_check(p, c.levels);
    std::string s = "level_index,energy,energy_ref,shift\n";
    for (Eigen::Index i = 0; i < r.energies.size(); ++i) {
        s += std::to_string(i) + "," + fmt(r.energies[i]) + "," + fmt(r.energies_ref[i]) + "," +
             fmt(std::abs(r.energies[i] - r.energies_ref[i])) + "\n";
    }
    out[prefix + "convergence.csv"] = std::move(s);
    out[prefix + "convergence_summary.csv"] = "metric,value\nn_max," + std::to_string(r.n_max) +
                                              "\nmax_shift," + fmt(r.max_shift) + "\npass," +
                                              (r.pass ? "1" : "0") + "\n";
    if (!r.pass) {
        res.exit_code = kExitNumerical;
        res.messages.push_back(Error(ErrorCode::TruncationTooSmall,
                                     "n_max = " + std::to_string(r.n_max) + ", max shift " +
                                         fmt(r.max_shift))
                                   .what());
    }
}

inline void run_one(const RunConfig& c, const ModelParams& p, const std::string& prefix,
                    int workers, Artifacts& out, RunResult& res) {
    switch (c.command) {
        case Command::spectrum_scan: add_spectrum(c, p, prefix, workers, out, res); break;
        case Command::topology_scan: add_topology(c, p, prefix, workers, out, res); break;
        case Command::bloch_traj: add_bloch(c, p, prefix, out); break;
        case Command::dynamics: add_dynamics(c, p, prefix, workers, out); break;
        case Command::rwa_bands: add_rwa_bands(c, p, prefix, out); break;
        case Command::convergence: add_convergence(c, p, prefix, out, res); break;
    }
}

} // namespace detail

/// Computes every artifact in memory. Module errors propagate.
inline Artifacts compute_artifacts(const RunConfig& c, int workers, RunResult& res) {
    validate(c);
    Artifacts out;
    if (c.variants.empty()) {
        detail::run_one(c, c.params, "", workers, out, res);
    } else {
        for (const auto& v : c.variants) {
            try {
                detail::run_one(c, v.params, v.label + "/", workers, out, res);
            } catch (const Error& e) {
                throw Error(e.code(), "variant " + v.label + ": " + e.what());
            }
        }
    }
    out["params.json"] = to_json(c).dump(2) + "\n";
    return out;
}

/// Runs the config and writes artifacts plus manifest.json into output_dir.
/// Errors are reported through the exit code: 2 for configuration, 3 for
/// numerical failures.
inline RunResult run(const RunConfig& c, int workers = default_workers()) {
    RunResult res;
    Artifacts files;
    try {
        files = compute_artifacts(c, workers, res);
    } catch (const Error& e) {
        const bool config = e.code() == ErrorCode::ConfigInvalid ||
                            e.code() == ErrorCode::UnknownPreset ||
                            e.code() == ErrorCode::InvalidParams;
        res.exit_code = config ? kExitConfig : kExitNumerical;
        res.messages.push_back(e.what());
        return res;
    }

    namespace fs = std::filesystem;
    const fs::path root(c.output_dir);
    json manifest = {{"command", std::string(command_name(c.command))},
                     {"seed", c.seed},
                     {"files", json::array()}};
    try {
        for (const auto& [rel, content] : files) {
            const fs::path path = root / rel;
            fs::create_directories(path.parent_path());
            std::ofstream f(path, std::ios::binary);
            f << content;
            if (!f) throw std::runtime_error("cannot write " + path.string());
            manifest["files"].push_back(
                {{"path", rel}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
            res.files.push_back(rel);
        }
        std::ofstream m(root / "manifest.json", std::ios::binary);
        m << manifest.dump(2) << "\n";
        if (!m) throw std::runtime_error("cannot write manifest.json");
        res.files.push_back("manifest.json");
    } catch (const std::exception& e) {
        res.exit_code = kExitConfig;
        res.messages.push_back(std::string("ConfigInvalid: output_dir: ") + e.what());
    }
    return res;
}

} // namespace cavity_ssh::cli
