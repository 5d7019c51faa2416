#include <chrono>
#include <cstdint>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "suites.hpp"

int main(int argc, char** argv) {
    using namespace mfsmp::cli;
    CLI::App app{"Verification suites for delayed mean-field FBSDE control"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1, 1);

    std::string config_path;
    std::uint64_t seed = 0;
    int threads = -1;
    std::string out;
    app.add_option("--config", config_path, "INI configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides the config)");
    app.add_option("--threads", threads, "OpenMP thread count (0 keeps the default)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", out, "Output directory (overrides the config)");
    for (const std::string& s : suite_names()) app.add_subcommand(s, "Run the " + s + " suite")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? default_config() : load_config(config_path);
        cfg.suite = app.get_subcommands().front()->get_name();
        if (*seed_opt) cfg.seed = seed;
        if (threads >= 0) cfg.threads = threads;
        if (!out.empty()) cfg.out = out;
        finalize(cfg);
        resolve_scenario(cfg);
    } catch (const mfsmp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    mfsmp::kernels::set_threads(cfg.threads);
    const auto start = std::chrono::steady_clock::now();
    try {
        const RunReport report = execute(cfg, cfg.out);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const CheckRow& r : report.rows())
            std::cout << (r.pass() ? "pass  " : "FAIL  ") << r.id << '\n';
        std::cout << cfg.suite << ": " << (report.all_pass() ? "pass" : "fail") << " in " << secs << " s, output in "
                  << cfg.out << '\n';
        return report.all_pass() ? 0 : 2;
    } catch (const mfsmp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
