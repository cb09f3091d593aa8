// icdisp: second-order analysis of the two-user Gaussian interference
// channel in the strictly very strong interference regime.
//
//   icdisp analyze|region|simulate|verify --config <path> [--seed N]
//          [--threads N] [--out DIR]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <icdisp/commands.hpp>

namespace {

int resolve_threads(const std::optional<int>& flag, const icdisp::RunConfig& cfg) {
    if (flag) return std::max(1, *flag);
    if (const char* env = std::getenv("ICDISP_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            throw icdisp::ConfigError("ICDISP_THREADS must be an integer");
        }
    }
    return std::max(1, cfg.threads);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dispersion analysis of the two-user Gaussian interference channel"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir = ".";
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> threads_flag;

    const char* names[] = {"analyze", "region", "simulate", "verify"};
    const char* descs[] = {"first- and second-order channel quantities (JSON)",
                           "second-order region boundary (CSV + SVG)",
                           "finite-blocklength bounds vs the region prediction (CSV)",
                           "statistical verification suite (JSON)"};
    for (int i = 0; i < 4; ++i) {
        auto* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--seed", seed_flag, "overrides the config seed");
        sub->add_option("--threads", threads_flag,
                        "worker threads (fallback: ICDISP_THREADS, then config)");
        sub->add_option("--out", outdir, "output directory (default: .)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        icdisp::RunConfig cfg = icdisp::RunConfig::load(config_path);
        if (seed_flag) cfg.seed = *seed_flag;
        cfg.threads = resolve_threads(threads_flag, cfg);

        if (app.got_subcommand("analyze")) return icdisp::cmd_analyze(cfg, outdir);
        if (app.got_subcommand("region")) return icdisp::cmd_region(cfg, outdir);
        if (app.got_subcommand("simulate")) return icdisp::cmd_simulate(cfg, outdir);
        return icdisp::cmd_verify(cfg, outdir);
    } catch (const icdisp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const icdisp::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
