// dirac-hardy <command> --config <path> [--out <dir>]
//
// Exit status: 0 success or inequality holds, 2 inequality fails or no
// eigenvalue, 1 any error.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dirac_hardy/experiment.hpp"

int main(int argc, char** argv)
{
    namespace ex = dirac_hardy::experiment;

    CLI::App app{"Hardy-Dirac inequalities and Dirac-Coulomb spectra on radial grids"};
    app.set_version_flag("--version", std::string(dirac_hardy::version));
    app.require_subcommand(1);
    std::string config;
    std::string out_dir = ".";
    for (const std::string& name : ex::commands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        const ex::ExperimentConfig cfg = ex::load_config(config, command);
        const ex::RunResult r = ex::run(cfg, out_dir, config);
        std::cout << command << ": " << r.summary << "\n" << "wrote " << r.csv.string() << "\n";
        return r.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "dirac-hardy: " << e.what() << "\n";
        return 1;
    }
}
