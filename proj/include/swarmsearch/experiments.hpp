#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swarmsearch/engine.hpp"
#include "swarmsearch/metrics.hpp"

namespace swarm {

/// Seed of replicate `index` in a batch with the given base seed.
[[nodiscard]] std::uint64_t replicate_seed(std::uint64_t base_seed, int index);

/// Share of censored replicates above which a search batch fails.
inline constexpr double kMaxCensoringRate = 0.001;

struct BatchOptions {
    /// 0 leaves the OpenMP default in place.
    int threads = 0;
    /// Stop launching replicates once the batch has failed. The outcome is
    /// still the one of an in-order serial run truncated at the failing replicate.
    bool stop_on_failure = false;
    std::vector<double> cover_fractions;
    /// C_comp* from a metrics-mode batch; search replicates then report
    /// C_prop = c_star_reference / F_#.
    std::optional<double> c_star_reference;
};

/// Per-replicate summary kept by a batch.
struct ReplicateSummary {
    std::uint64_t seed = 0;
    bool censored = false;
    MetricsReport report;
    std::vector<double> search_times;  ///< seconds, empty when censored or in metrics mode

    friend bool operator==(const ReplicateSummary&, const ReplicateSummary&) = default;
};

/// Aggregates over the replicates of one instance.
struct BatchStats {
    SimConfig config;
    std::uint64_t base_seed = 0;
    int replicates = 0;  ///< requested
    int executed = 0;    ///< fewer than requested only after an early stop
    int censored = 0;
    double censoring_rate = 0.0;  ///< censored / executed
    bool failed = false;          ///< censoring_rate above kMaxCensoringRate

    std::optional<double> mean_s_avg;
    std::optional<double> std_s_avg;  ///< sample standard deviation across replicates
    std::optional<double> pooled_sd;  ///< sample sd of all per-agent search times pooled
    std::optional<double> mean_first_find;
    std::optional<double> mean_f_count;
    std::optional<double> mean_c_prop;
    std::optional<double> mean_c_comp_star;
    std::optional<double> mean_g_size;
    std::map<double, std::optional<double>> mean_cover_times;  ///< nullopt if any replicate missed it
    std::map<double, std::optional<double>> mean_subgroup_cover_times;

    std::vector<double> s_avg_samples;  ///< completed replicates, index order

    friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

/// Folds replicate summaries (in index order) into batch statistics.
[[nodiscard]] BatchStats aggregate_batch(const SimConfig& config, std::uint64_t base_seed, int replicates,
                                         std::span<const ReplicateSummary> runs);

/// One replicate of config with the batch-derived seed.
[[nodiscard]] ReplicateSummary run_replicate(const SimConfig& config, std::uint64_t base_seed, int index,
                                             const BatchOptions& options);

/// Replicates in parallel (OpenMP). Output does not depend on the thread count.
[[nodiscard]] BatchStats run_batch(const SimConfig& config, int replicates, std::uint64_t base_seed,
                                   const BatchOptions& options = {});
/// Plain loop over replicates; the reference run_batch is checked against.
[[nodiscard]] BatchStats run_batch_serial(const SimConfig& config, int replicates, std::uint64_t base_seed,
                                          const BatchOptions& options = {});

struct SigmaChoice {
    double sigma = 0.0;
    double mean_s_avg = 0.0;
};

/// argmin over (sigma, mean S_avg) pairs; failed entries are given as nullopt
/// and never win. Ties go to the smaller sigma. nullopt when nothing completed.
[[nodiscard]] std::optional<SigmaChoice> best_sigma(std::span<const std::pair<double, std::optional<double>>> means);

/// Runs a batch per sigma and picks the best one.
struct BestSigmaResult {
    std::optional<SigmaChoice> best;
    std::vector<BatchStats> batches;  ///< grid order
};
[[nodiscard]] BestSigmaResult best_sigma(const SimConfig& config_template, std::span<const double> sigma_grid,
                                         int replicates, std::uint64_t base_seed, const BatchOptions& options = {});

/// Each value divided by the baseline.
[[nodiscard]] std::vector<double> normalized_curve(std::span<const double> values, double baseline);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df = 0.0;
};

/// Sample mean and unbiased variance.
[[nodiscard]] std::pair<double, double> mean_and_variance(std::span<const double> xs);

/// Pearson correlation with a two-sided p-value from the t transform
/// (statistic = r, df = n - 2).
[[nodiscard]] TestResult pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Welch two-sample t-test, Welch-Satterthwaite df, two-sided p-value.
[[nodiscard]] TestResult welch_t(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta I_x(a, b).
[[nodiscard]] double incomplete_beta(double a, double b, double x);
/// Two-sided tail probability P(|T| >= |t|) of Student's t with df degrees of freedom.
[[nodiscard]] double student_t_two_sided(double t, double df);

/// Parameter grid over a base configuration.
struct SweepSpec {
    SimConfig base;
    /// Axis name -> values, applied in listed order; the last axis varies fastest.
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    int replicates = 1;
    std::uint64_t base_seed = 0;
    std::vector<double> cover_fractions;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Axis names a sweep may vary.
[[nodiscard]] const std::vector<std::string>& sweep_axis_names();
/// Sets a named numeric parameter; ConfigError for unknown names.
void set_parameter(SimConfig& config, const std::string& name, double value);
[[nodiscard]] double get_parameter(const SimConfig& config, const std::string& name);

struct InstanceResult {
    std::vector<std::pair<std::string, double>> params;  ///< axis values of this instance
    BatchStats stats;
    /// mean S_avg / baseline mean S_avg, where the baseline is the best completed
    /// rho = 0 instance sharing every other axis value.
    std::optional<double> normalized;

    friend bool operator==(const InstanceResult&, const InstanceResult&) = default;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<InstanceResult> instances;

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// Expands the grid (cartesian product, r1_frac <= r2_frac enforced by skipping).
[[nodiscard]] std::vector<std::pair<std::vector<std::pair<std::string, double>>, SimConfig>> expand_sweep(
    const SweepSpec& spec);

/// Instance i uses base seed mix_seed(spec.base_seed, i).
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, const BatchOptions& options = {});

/// Fills InstanceResult::normalized.
void normalize_sweep(SweepResult& result);

/// For every value of `axis` (e.g. rho), the instance with the lowest mean S_avg
/// over sigma among instances with equal remaining parameters. Returned in
/// instance order of first appearance.
[[nodiscard]] std::vector<const InstanceResult*> best_over_sigma(const SweepResult& result);

}  // namespace swarm
