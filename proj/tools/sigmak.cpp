#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sigmak/app.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sigmak: sigma_k curvature equations on the periodic box"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* check = app.add_subcommand("check", "symmetric-function suites and operator certificates");
    check->add_option("--config", config_path, "run configuration")->required();
    check->add_option("--out", out_dir, "directory for certificates.txt");

    auto* solve = app.add_subcommand("solve", "continuation (A, B) or direct Newton (C)");
    solve->add_option("--config", config_path, "run configuration")->required();
    solve->add_option("--out", out_dir, "output directory");

    auto* verify = app.add_subcommand("verify", "manufactured-solution convergence study");
    verify->add_option("--config", config_path, "run configuration")->required();
    verify->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : sigmak::kExitInvalidConfig;
    }

    sigmak::RunConfig cfg;
    try {
        cfg = sigmak::load_config(config_path);
    } catch (const sigmak::IoError& e) {
        std::cerr << "sigmak: " << e.what() << '\n';
        return sigmak::kExitIo;
    } catch (const sigmak::Error& e) {
        std::cerr << "sigmak: invalid config: " << e.what() << '\n';
        return sigmak::kExitInvalidConfig;
    }
    if (out_dir.empty()) out_dir = cfg.output_dir;

    if (check->parsed()) {
        cfg.subcommand = "check";
        return sigmak::run_check(cfg, out_dir);
    }
    if (solve->parsed()) {
        cfg.subcommand = "solve";
        return sigmak::run_solve(cfg, out_dir);
    }
    cfg.subcommand = "verify";
    return sigmak::run_verify(cfg, out_dir);
}
