#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spdelab/config.hpp"
#include "spdelab/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spdelab: semilinear stochastic heat equation laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long seed = -1;
    int threads = 0;

    auto* run = app.add_subcommand("run", "execute an experiment from a JSON config");
    run->add_option("--config", config_path, "path to the JSON config")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--seed", seed, "base seed (overrides the config)");
    run->add_option("--threads", threads, "worker count (results are thread-count independent)");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse and validate a JSON config");
    validate->add_option("--config", validate_path, "path to the JSON config")->required();

    auto* presets = app.add_subcommand("presets", "coefficient presets");
    auto* presets_list = presets->add_subcommand("list", "list available presets");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return spdelab::run_from_config(config_path, out_dir, seed, threads);

    if (validate->parsed()) {
        try {
            spdelab::load_run_config(validate_path);
            std::cout << "ok\n";
            return 0;
        } catch (const spdelab::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    if (presets->parsed()) {
        if (presets_list->parsed() || presets->get_subcommands().empty()) {
            for (const auto& name : spdelab::preset_names()) std::cout << name << "\n";
            return 0;
        }
    }
    return 0;
}
