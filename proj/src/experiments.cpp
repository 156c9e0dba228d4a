#include "swarmsearch/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace swarm {

namespace {

int censoring_budget(int replicates) {
    return static_cast<int>(std::floor(kMaxCensoringRate * static_cast<double>(replicates)));
}

std::optional<double> mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::nullopt;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

std::optional<double> sd_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return std::nullopt;
    return std::sqrt(mean_and_variance(xs).second);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t base_seed, int index) {
    return mix_seed(base_seed, static_cast<std::uint64_t>(index));
}

ReplicateSummary run_replicate(const SimConfig& config, std::uint64_t base_seed, int index,
                               const BatchOptions& options) {
    SimConfig c = config;
    c.seed = replicate_seed(base_seed, index);
    const EventLog log = run_simulation(c);
    ReplicateSummary out;
    out.seed = c.seed;
    out.report = compute_metrics(log, options.cover_fractions);
    out.censored = !out.report.censored.empty();
    if (!c.metrics_mode() && !out.censored) out.search_times = search_times(log);
    if (options.c_star_reference && out.report.f_count && *out.report.f_count > 0) {
        out.report.c_prop = convergence_proportion(*options.c_star_reference, *out.report.f_count);
    }
    return out;
}

BatchStats aggregate_batch(const SimConfig& config, std::uint64_t base_seed, int replicates,
                           std::span<const ReplicateSummary> runs) {
    BatchStats st;
    st.config = config;
    st.base_seed = base_seed;
    st.replicates = replicates;
    st.executed = static_cast<int>(runs.size());

    std::vector<double> first_finds, f_counts, c_props, c_stars, g_sizes, pooled;
    std::map<double, std::vector<double>> covers, subcovers;
    std::map<double, bool> cover_missing, subcover_missing;
    for (const auto& r : runs) {
        if (r.censored) ++st.censored;
        const auto& m = r.report;
        if (m.s_avg) st.s_avg_samples.push_back(*m.s_avg);
        pooled.insert(pooled.end(), r.search_times.begin(), r.search_times.end());
        if (m.first_find) first_finds.push_back(*m.first_find);
        if (m.f_count) f_counts.push_back(static_cast<double>(*m.f_count));
        if (m.c_prop) c_props.push_back(*m.c_prop);
        if (m.c_comp_star) c_stars.push_back(*m.c_comp_star);
        if (m.g_size) g_sizes.push_back(*m.g_size);
        for (const auto& [x, t] : m.cover_times) {
            if (t) covers[x].push_back(*t); else cover_missing[x] = true;
        }
        for (const auto& [x, t] : m.subgroup_cover_times) {
            if (t) subcovers[x].push_back(*t); else subcover_missing[x] = true;
        }
    }
    st.censoring_rate = st.executed > 0 ? static_cast<double>(st.censored) / st.executed : 0.0;
    st.failed = st.censored > censoring_budget(replicates);

    if (!st.failed) {
        st.mean_s_avg = mean_of(st.s_avg_samples);
        st.std_s_avg = sd_of(st.s_avg_samples);
        st.pooled_sd = sd_of(pooled);
    }
    st.mean_first_find = mean_of(first_finds);
    st.mean_f_count = mean_of(f_counts);
    st.mean_c_prop = mean_of(c_props);
    st.mean_c_comp_star = mean_of(c_stars);
    st.mean_g_size = mean_of(g_sizes);
    for (const auto& r : runs) {
        for (const auto& [x, t] : r.report.cover_times) {
            st.mean_cover_times[x] = cover_missing[x] ? std::nullopt : mean_of(covers[x]);
        }
        for (const auto& [x, t] : r.report.subgroup_cover_times) {
            st.mean_subgroup_cover_times[x] = subcover_missing[x] ? std::nullopt : mean_of(subcovers[x]);
        }
        break;  // every replicate carries the same fractions
    }
    return st;
}

BatchStats run_batch_serial(const SimConfig& config, int replicates, std::uint64_t base_seed,
                            const BatchOptions& options) {
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    config.validate();
    const int budget = censoring_budget(replicates);
    std::vector<ReplicateSummary> runs;
    int censored = 0;
    for (int i = 0; i < replicates; ++i) {
        runs.push_back(run_replicate(config, base_seed, i, options));
        if (runs.back().censored) ++censored;
        if (options.stop_on_failure && censored > budget) break;
    }
    return aggregate_batch(config, base_seed, replicates, runs);
}

BatchStats run_batch(const SimConfig& config, int replicates, std::uint64_t base_seed, const BatchOptions& options) {
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    config.validate();
    const int budget = censoring_budget(replicates);
    std::vector<std::optional<ReplicateSummary>> slots(static_cast<std::size_t>(replicates));
    // Index of the replicate at which the in-order run fails; later ones are dropped.
    std::atomic<int> stop_at{replicates};
    int scanned = 0;
    int censored_prefix = 0;

    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < replicates; ++i) {
        if (options.stop_on_failure && i > stop_at.load()) continue;
        ReplicateSummary r = run_replicate(config, base_seed, i, options);
#pragma omp critical(swarm_batch)
        {
            slots[static_cast<std::size_t>(i)] = std::move(r);
            while (scanned < replicates && scanned <= stop_at.load() && slots[static_cast<std::size_t>(scanned)]) {
                if (slots[static_cast<std::size_t>(scanned)]->censored) ++censored_prefix;
                if (options.stop_on_failure && censored_prefix > budget) {
                    stop_at.store(scanned);
                    break;
                }
                ++scanned;
            }
        }
    }

    const int last = std::min(stop_at.load(), replicates - 1);
    std::vector<ReplicateSummary> runs;
    runs.reserve(static_cast<std::size_t>(last + 1));
    for (int i = 0; i <= last; ++i) runs.push_back(std::move(*slots[static_cast<std::size_t>(i)]));
    return aggregate_batch(config, base_seed, replicates, runs);
}

std::optional<SigmaChoice> best_sigma(std::span<const std::pair<double, std::optional<double>>> means) {
    std::optional<SigmaChoice> best;
    for (const auto& [sigma, mean] : means) {
        if (!mean) continue;
        if (!best || *mean < best->mean_s_avg || (*mean == best->mean_s_avg && sigma < best->sigma)) {
            best = SigmaChoice{sigma, *mean};
        }
    }
    return best;
}

BestSigmaResult best_sigma(const SimConfig& config_template, std::span<const double> sigma_grid, int replicates,
                           std::uint64_t base_seed, const BatchOptions& options) {
    if (sigma_grid.empty()) throw std::invalid_argument("sigma grid is empty");
    BestSigmaResult out;
    std::vector<std::pair<double, std::optional<double>>> means;
    for (std::size_t k = 0; k < sigma_grid.size(); ++k) {
        SimConfig c = config_template;
        c.sigma = sigma_grid[k];
        out.batches.push_back(run_batch(c, replicates, mix_seed(base_seed, k), options));
        means.emplace_back(c.sigma, out.batches.back().mean_s_avg);
    }
    out.best = best_sigma(means);
    return out;
}

std::vector<double> normalized_curve(std::span<const double> values, double baseline) {
    if (!(baseline > 0.0)) throw std::invalid_argument("baseline must be positive");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v / baseline);
    return out;
}

std::pair<double, double> mean_and_variance(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("empty sample");
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, ss / (n - 1.0)};
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // the fraction converges fast on this side of the mean; use symmetry otherwise
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("df must be positive");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TestResult pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson_r needs equal-length series");
    if (xs.size() < 3) throw std::invalid_argument("pearson_r needs at least 3 pairs");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson_r of a constant series");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    TestResult out;
    out.statistic = r;
    out.df = n - 2.0;
    if (std::fabs(r) == 1.0) {
        out.p_value = 0.0;
    } else {
        const double t = r * std::sqrt(out.df / (1.0 - r * r));
        out.p_value = student_t_two_sided(t, out.df);
    }
    return out;
}

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t needs two samples of size >= 2");
    const auto [ma, va] = mean_and_variance(a);
    const auto [mb, vb] = mean_and_variance(b);
    if (!(va > 0.0) && !(vb > 0.0)) throw std::invalid_argument("welch_t of two zero-variance samples");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double qa = va / na;
    const double qb = vb / nb;
    TestResult out;
    out.statistic = (ma - mb) / std::sqrt(qa + qb);
    out.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    out.p_value = student_t_two_sided(out.statistic, out.df);
    return out;
}

const std::vector<std::string>& sweep_axis_names() {
    static const std::vector<std::string> names = {"rho", "sigma", "n", "targets", "c_f", "r_s", "r_t",
                                                   "r1_frac", "r2_frac", "v", "side_length"};
    return names;
}

void set_parameter(SimConfig& c, const std::string& name, double value) {
    auto as_int = [&](const char* key) {
        if (value != std::floor(value) || std::fabs(value) > 1e9) throw ConfigError(key, "must be an integer");
        return static_cast<int>(value);
    };
    if (name == "rho") c.rho = value;
    else if (name == "sigma") c.sigma = value;
    else if (name == "n") c.n = as_int("n");
    else if (name == "targets") c.targets = as_int("targets");
    else if (name == "c_f") c.c_f = value;
    else if (name == "r_s") c.r_s = value;
    else if (name == "r_t") c.r_t = value;
    else if (name == "r1_frac") c.r1_frac = value;
    else if (name == "r2_frac") c.r2_frac = value;
    else if (name == "v") c.v = value;
    else if (name == "side_length") c.side_length = value;
    else throw ConfigError(name, "not a sweepable parameter");
}

double get_parameter(const SimConfig& c, const std::string& name) {
    if (name == "rho") return c.rho;
    if (name == "sigma") return c.sigma;
    if (name == "n") return c.n;
    if (name == "targets") return c.targets;
    if (name == "c_f") return c.c_f;
    if (name == "r_s") return c.r_s;
    if (name == "r_t") return c.r_t;
    if (name == "r1_frac") return c.r1_frac;
    if (name == "r2_frac") return c.r2_frac;
    if (name == "v") return c.v;
    if (name == "side_length") return c.side_length;
    throw ConfigError(name, "not a sweepable parameter");
}

std::vector<std::pair<std::vector<std::pair<std::string, double>>, SimConfig>> expand_sweep(const SweepSpec& spec) {
    std::vector<std::pair<std::vector<std::pair<std::string, double>>, SimConfig>> out;
    for (const auto& [name, values] : spec.axes) {
        if (values.empty()) throw ConfigError("axis." + name, "axis has no values");
        (void)get_parameter(spec.base, name);
    }
    std::vector<std::size_t> idx(spec.axes.size(), 0);
    while (true) {
        SimConfig c = spec.base;
        std::vector<std::pair<std::string, double>> params;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            const double v = spec.axes[a].second[idx[a]];
            set_parameter(c, spec.axes[a].first, v);
            params.emplace_back(spec.axes[a].first, v);
        }
        if (c.r1_frac <= c.r2_frac) {
            c.validate();
            out.emplace_back(std::move(params), c);
        }
        // odometer, last axis fastest
        std::size_t a = spec.axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < spec.axes[a].second.size()) break;
            idx[a] = 0;
            if (a == 0) return out;
        }
        if (spec.axes.empty()) return out;
    }
}

SweepResult run_sweep(const SweepSpec& spec, const BatchOptions& options) {
    if (spec.replicates < 1) throw ConfigError("replicates", "must be >= 1");
    SweepResult result;
    result.spec = spec;
    BatchOptions opts = options;
    if (opts.cover_fractions.empty()) opts.cover_fractions = spec.cover_fractions;
    const auto grid = expand_sweep(spec);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        InstanceResult inst;
        inst.params = grid[i].first;
        inst.stats = run_batch(grid[i].second, spec.replicates, mix_seed(spec.base_seed, i), opts);
        result.instances.push_back(std::move(inst));
    }
    normalize_sweep(result);
    return result;
}

namespace {
// Axis values other than the excluded names, used to group instances.
std::vector<std::pair<std::string, double>> key_without(const InstanceResult& r,
                                                        std::initializer_list<const char*> skip) {
    std::vector<std::pair<std::string, double>> key;
    for (const auto& p : r.params) {
        bool drop = false;
        for (const char* s : skip) drop = drop || p.first == s;
        if (!drop) key.push_back(p);
    }
    return key;
}
}  // namespace

void normalize_sweep(SweepResult& result) {
    for (auto& inst : result.instances) {
        inst.normalized.reset();
        if (!inst.stats.mean_s_avg) continue;
        const auto key = key_without(inst, {"rho", "sigma"});
        std::optional<double> base;
        for (const auto& other : result.instances) {
            if (other.stats.config.rho != 0.0 || !other.stats.mean_s_avg) continue;
            if (key_without(other, {"rho", "sigma"}) != key) continue;
            if (!base || *other.stats.mean_s_avg < *base) base = other.stats.mean_s_avg;
        }
        if (base && *base > 0.0) inst.normalized = *inst.stats.mean_s_avg / *base;
    }
}

std::vector<const InstanceResult*> best_over_sigma(const SweepResult& result) {
    std::vector<std::vector<std::pair<std::string, double>>> keys;
    std::vector<const InstanceResult*> best;
    for (const auto& inst : result.instances) {
        const auto key = key_without(inst, {"sigma"});
        const auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            best.push_back(&inst);
            continue;
        }
        const InstanceResult*& cur = best[static_cast<std::size_t>(it - keys.begin())];
        const auto& m = inst.stats.mean_s_avg;
        if (!m) continue;
        if (!cur->stats.mean_s_avg || *m < *cur->stats.mean_s_avg ||
            (*m == *cur->stats.mean_s_avg && inst.stats.config.sigma < cur->stats.config.sigma)) {
            cur = &inst;
        }
    }
    return best;
}

}  // namespace swarm
