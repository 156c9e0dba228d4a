#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmsearch/experiments.hpp"
#include "swarmsearch/io.hpp"

namespace fs = std::filesystem;
using namespace swarm;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    int threads = 0;
    std::string out = "out";
    std::vector<double> cover = {0.25, 0.5, 0.75};
};

std::string joined_command(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

void print_rows(const SweepResult& result) {
    for (const auto& inst : result.instances) {
        const auto& s = inst.stats;
        std::printf("rho=%g sigma=%g n=%d", s.config.rho, s.config.sigma, s.config.n);
        for (const auto& [name, v] : inst.params) {
            if (name != "rho" && name != "sigma" && name != "n") std::printf(" %s=%g", name.c_str(), v);
        }
        if (s.mean_s_avg) std::printf("  S_avg=%.1f s (sd %.1f)", *s.mean_s_avg, s.std_s_avg.value_or(0.0));
        if (s.mean_g_size) std::printf("  G_size=%.2f C*=%.2f", *s.mean_g_size, s.mean_c_comp_star.value_or(0.0));
        if (inst.normalized) std::printf("  norm=%.3f", *inst.normalized);
        if (s.failed) std::printf("  FAILED (%d/%d censored)", s.censored, s.executed);
        std::printf("\n");
    }
}

// Runs spec, writes config, summary and manifest into out.
int finish_sweep(const SweepSpec& spec, const Globals& g, const std::string& command) {
    const fs::path dir = g.out;
    BatchOptions opts;
    opts.threads = g.threads;
    opts.cover_fractions = spec.cover_fractions;
    const SweepResult result = run_sweep(spec, opts);
    print_rows(result);

    const std::string spec_text = serialize_sweep(spec);
    write_text_file(dir / "config.txt", spec_text);
    auto outputs = write_summary(result, dir / "summary.csv");
    outputs.insert(outputs.begin(), dir / "config.txt");
    const auto manifest = make_manifest(dir, spec_text, spec.base_seed, command, outputs);
    write_manifest(dir, manifest);
    std::printf("wrote %s\n", (dir / "summary.csv").string().c_str());
    return 0;
}

SweepSpec single_instance(const SimConfig& config, const Globals& g) {
    SweepSpec spec;
    spec.base = config;
    spec.base_seed = config.seed;
    spec.replicates = g.replicates.value_or(1);
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarmsearch: social foraging search simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "base seed, overrides the config file");
    app.add_option("--replicates", g.replicates, "replicates per instance")->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "output directory");
    app.add_flag("--version", [](std::int64_t) {
        std::printf("%s\n", code_version().c_str());
        std::exit(0);
    }, "print version");

    std::string config_path;
    std::optional<std::int64_t> ticks;

    auto* run = app.add_subcommand("run", "simulate one configuration");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("spec", config_path, "sweep file")->required()->check(CLI::ExistingFile);

    auto* metrics = app.add_subcommand("metrics", "targets removed: components, group size, coverage");
    metrics->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    metrics->add_option("--cover", g.cover, "coverage fractions");

    auto* frames = app.add_subcommand("frames", "dump per-tick agent records of one run");
    frames->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    frames->add_option("--ticks", ticks, "tick cap for the dump")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);
    const std::string command = joined_command(argc, argv);

    try {
        const std::string text = read_text_file(config_path);
        if (*run) {
            const SimConfig config = parse_sim_config(text, g.seed);
            if (config.metrics_mode()) throw ConfigError("targets_enabled", "run needs targets; use metrics");
            return finish_sweep(single_instance(config, g), g, command);
        }
        if (*metrics) {
            SimConfig config = parse_sim_config(text, g.seed);
            config.targets_enabled = false;
            SweepSpec spec = single_instance(config, g);
            spec.cover_fractions = g.cover;
            return finish_sweep(spec, g, command);
        }
        if (*sweep) {
            SweepSpec spec = parse_sweep_spec(text, g.seed);
            if (g.replicates) spec.replicates = *g.replicates;
            return finish_sweep(spec, g, command);
        }
        if (*frames) {
            SimConfig config = parse_sim_config(text, g.seed);
            config.record_trajectory = true;
            if (ticks) config.max_ticks = *ticks;
            config.validate();
            const fs::path dir = g.out;
            const EventLog log = run_simulation(config);
            const std::string spec_text = serialize_config(config);
            write_text_file(dir / "config.txt", spec_text);
            write_frames(log, dir / "frames.csv");
            const auto manifest =
                make_manifest(dir, spec_text, config.seed, command, {dir / "config.txt", dir / "frames.csv"});
            write_manifest(dir, manifest);
            std::printf("%zu frame records, %lld ticks -> %s\n", log.trajectory.size(),
                        static_cast<long long>(log.ticks_run), (dir / "frames.csv").string().c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
