#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <dpp/errors.hpp>
#include <dpp/version.hpp>

#include "cli/commands.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid control trial designs with dynamic power priors"};
    app.set_version_flag("--version", std::string(dpp::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed, sims;
    std::optional<std::string> mode, out_path, calibration;
    std::optional<unsigned> threads;
    std::optional<double> tau;
    std::vector<std::string> overrides;

    app.add_option("--config", config_path, "INI config file");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    app.add_option("--sims", sims, "Monte Carlo trials");
    app.add_option("--threads", threads, "Worker threads, 0 = auto");
    app.add_option("--out", out_path, "Output file (default stdout)");
    app.add_option("--tau", tau, "Decision threshold for oc");
    app.add_option("--calibration", calibration, "Calibration record written by calibrate");
    app.add_option("--set", overrides, "Override a config value: section.key=value");

    const char* names[][2] = {
        {"weights", "Dynamic and overall borrowing weights per y_c"},
        {"calibrate", "Calibrate tau under the null"},
        {"oc", "Operating characteristics per scenario"},
        {"optimize", "Minimum sample size search"},
        {"eess", "Expected effective sample size"},
        {"sweep", "Type I error, power and PMD across sample sizes"},
    };
    for (const auto& [name, help] : names) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        dpp::cli::Invocation inv;
        inv.command = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) inv.config = dpp::cli::load_config(config_path);
        for (const auto& o : overrides) dpp::cli::apply_override(inv.config, o);
        if (seed) inv.config.seed = *seed;
        if (sims) inv.config.n_sims = *sims;
        if (mode) inv.config.mode = *mode;
        if (threads) inv.config.threads = *threads;
        if (tau) inv.config.tau = *tau;
        inv.calibration_path = calibration;

        // Render to memory first so a failed run leaves no partial file.
        std::ostringstream out;
        int code = 0;
        if (inv.command == "weights") code = dpp::cli::run_weights(inv, out);
        else if (inv.command == "calibrate") code = dpp::cli::run_calibrate(inv, out, std::cerr);
        else if (inv.command == "oc") code = dpp::cli::run_oc(inv, out);
        else if (inv.command == "optimize") code = dpp::cli::run_optimize(inv, out, std::cerr);
        else if (inv.command == "eess") code = dpp::cli::run_eess(inv, out);
        else code = dpp::cli::run_sweep(inv, out);

        if (out_path) {
            std::ofstream file(*out_path, std::ios::binary);
            if (!file) throw dpp::cli::ConfigError(fmt::format("cannot write '{}'", *out_path));
            file << out.str();
        } else {
            std::cout << out.str();
        }
        return code;
    } catch (const dpp::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const dpp::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const dpp::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumericError;
    }
}
