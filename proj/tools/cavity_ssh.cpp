// cavity-ssh: command-line front end

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavity_ssh/cli/config.hpp"
#include "cavity_ssh/cli/run.hpp"

int main(int argc, char** argv) {
    namespace cli = cavity_ssh::cli;

    CLI::App app{"Cavity-coupled SSH chain: spectra, invariants and dynamics"};
    std::string command, config_file, preset_name, out_dir;
    std::vector<std::string> sets;
    int workers = cavity_ssh::default_workers();
    bool dump = false;

    app.add_option("command", command,
                   "spectrum-scan | topology-scan | bloch-traj | dynamics | rwa-bands | convergence")
        ->required();
    app.add_option("--config", config_file, "JSON run configuration");
    app.add_option("--preset", preset_name, "fig1 | fig2a | fig2b | fig2c | appendix-dynamics | appendix-zak");
    app.add_option("--set", sets, "override, e.g. --set params.g=0.2 (repeatable)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--dump-config", dump, "print the resolved configuration and exit");
    CLI11_PARSE(app, argc, argv);

    cli::RunConfig cfg;
    try {
        if (!config_file.empty() && !preset_name.empty()) {
            throw cavity_ssh::Error(cavity_ssh::ErrorCode::ConfigInvalid,
                                    "--config and --preset are mutually exclusive");
        }
        if (!config_file.empty()) {
            cfg = cli::load_config(config_file);
        } else if (!preset_name.empty()) {
            cfg = cli::preset(preset_name);
        } else {
            cfg = cli::preset("fig1");
        }
        cfg.command = cli::parse_command(command);
        for (const auto& s : sets) cfg = cli::apply_override(cfg, s);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        cli::validate(cfg);
    } catch (const cavity_ssh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitConfig;
    }

    if (dump) {
        std::cout << cli::to_json(cfg).dump(2) << "\n";
        return cli::kExitOk;
    }

    const auto res = cli::run(cfg, workers);
    for (const auto& m : res.messages) std::cerr << "error: " << m << "\n";
    if (res.exit_code == cli::kExitOk) {
        std::cout << "wrote " << res.files.size() << " files to " << cfg.output_dir << "\n";
    }
    return res.exit_code;
}
