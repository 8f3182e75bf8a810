#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "softarm/errors.hpp"
#include "softarm/tracking.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;

struct RunArgs {
    std::string config;
    std::string out;
    std::optional<std::string> mode;
    std::optional<double> lag;
};

int cmd_run(const RunArgs& args)
{
    softarm::ScenarioConfig cfg = softarm::load_config(args.config);
    if (args.mode) {
        cfg.pcc_mode = softarm::parse_arc_length_mode(*args.mode);
    }
    if (args.lag) {
        cfg.lag = *args.lag;
    }
    if (!args.out.empty()) {
        cfg.output = args.out;
    }
    if (cfg.output.empty()) {
        throw softarm::ConfigError("output: no --out given and config has no output path",
                                   "output");
    }
    softarm::validate_config(cfg);

    const auto start = std::chrono::steady_clock::now();
    const softarm::TrackingResult result = softarm::run_tracking(cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    softarm::emit_log(result.log, cfg.output);

    std::printf("scenario %s, %ld steps, %.2f s wall clock\n", softarm::to_string(cfg.kind),
                cfg.step_count(), elapsed);
    for (int seg = 1; seg <= cfg.segments; ++seg) {
        std::printf("seg %d rmse: vz %.6f  ux %.6f  uy %.6f\n", seg,
                    softarm::channel_rmse(result.log, "vz", seg),
                    softarm::channel_rmse(result.log, "ux", seg),
                    softarm::channel_rmse(result.log, "uy", seg));
    }
    if (result.pressures_clamped) {
        std::printf("note: commanded pressures hit the regulator limits\n");
    }
    std::printf("wrote %zu rows to %s\n", result.log.rows.size(), cfg.output.c_str());
    return kExitOk;
}

int cmd_rmse(const std::string& path, const std::string& channel, std::optional<int> seg)
{
    const softarm::TrajectoryLog log = softarm::load_log(path);
    const int first = seg ? *seg : 1;
    const int last = seg ? *seg : softarm::segment_count(log);
    for (int s = first; s <= last; ++s) {
        std::printf("seg %d %s rmse %.9g\n", s, channel.c_str(),
                    softarm::channel_rmse(log, channel, s));
    }
    return kExitOk;
}

int cmd_validate(const std::string& path)
{
    const softarm::ScenarioConfig cfg = softarm::load_config(path);
    std::printf("%s: ok (%s, %d segments, %ld steps)\n", path.c_str(),
                softarm::to_string(cfg.kind), cfg.segments, cfg.step_count());
    return kExitOk;
}

int cmd_defaults(const std::string& kind)
{
    softarm::ScenarioConfig cfg =
        kind == "bending" ? softarm::ScenarioConfig::bending() : softarm::ScenarioConfig::extension();
    std::cout << softarm::emit_config(cfg);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cosserat-rod simulator and configuration tracking controller for a soft arm"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run a tracking scenario and write the trajectory log");
    run->add_option("--config", run_args.config, "Scenario config (JSON)")->required();
    run->add_option("--out", run_args.out, "Output CSV path (overrides the config)");
    run->add_option("--mode", run_args.mode, "PCC arc-length mode")
        ->check(CLI::IsMember({"geometric", "paper-verbatim"}));
    run->add_option("--lag", run_args.lag, "Pneumatic regulator time constant in seconds")
        ->check(CLI::NonNegativeNumber);

    std::string log_path;
    std::string channel;
    std::optional<int> seg;
    auto* rmse = app.add_subcommand("rmse", "Report tracking RMSE of one channel from a log");
    rmse->add_option("--log", log_path, "Trajectory CSV")->required();
    rmse->add_option("--channel", channel, "ux, uy, uz, vx, vy or vz")
        ->required()
        ->check(CLI::IsMember({"ux", "uy", "uz", "vx", "vy", "vz"}));
    rmse->add_option("--seg", seg, "Segment (1-based); default: all");

    std::string config_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario config");
    validate->add_option("--config", config_path, "Scenario config (JSON)")->required();

    std::string kind = "extension";
    auto* defaults = app.add_subcommand("defaults", "Print a default scenario config");
    defaults->add_option("--scenario", kind, "extension or bending")
        ->check(CLI::IsMember({"extension", "bending"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(run_args);
        }
        if (*rmse) {
            return cmd_rmse(log_path, channel, seg);
        }
        if (*validate) {
            return cmd_validate(config_path);
        }
        if (*defaults) {
            return cmd_defaults(kind);
        }
    } catch (const softarm::NonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNonConvergence;
    } catch (const softarm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const softarm::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
