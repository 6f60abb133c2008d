#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qsurr/io.hpp"
#include "qsurr/simulator.hpp"
#include "qsurr/tasks.hpp"

namespace {

constexpr const char* kTasks[] = {"gen-data-cs",  "gen-data-qs",  "train-cs", "train-qs",
                                  "predict",      "vqe-pretrain", "vqe-finetune",
                                  "fspt-scan",    "eval",         "oracle-coeffs",
                                  "fold-bench"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surrogate - classical predictive surrogates for noisy parametric circuits"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;

    for (const char* task : kTasks) {
        auto* sub = app.add_subcommand(task, std::string("run the ") + task + " task");
        sub->add_option("--config", config_path, "config file (JSON or TOML)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "root seed override");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto* sub = app.get_subcommands().front();
        nlohmann::json config = qsurr::load_config(config_path);
        // the subcommand names the task; a config-level task must agree
        if (config.contains("task") && config.at("task").get<std::string>() != sub->get_name())
            throw qsurr::ConfigError("config task '" + config.at("task").get<std::string>() +
                                     "' does not match subcommand '" + sub->get_name() + "'");
        config["task"] = sub->get_name();
        qsurr::run_config(config, out_dir, seed);
    } catch (const qsurr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qsurr::GuardViolation& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
