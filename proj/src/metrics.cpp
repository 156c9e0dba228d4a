#include "swarmsearch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swarmsearch/spatial_index.hpp"
#include "swarmsearch/union_find.hpp"

namespace swarm {

namespace {
std::string describe(const std::vector<int>& ids) {
    std::string s = "censored run, unfinished agents:";
    for (int id : ids) s += " " + std::to_string(id);
    return s;
}

void require_complete(const EventLog& log) {
    if (log.config.metrics_mode()) throw std::invalid_argument("search times need a search-mode run");
    auto ids = log.censored_ids();
    if (!ids.empty()) throw CensoredRunError(std::move(ids));
}
}  // namespace

CensoredRunError::CensoredRunError(std::vector<int> ids) : std::runtime_error(describe(ids)), ids_(std::move(ids)) {}

ProximityGraph build_proximity_graph(std::span<const Vec2> positions, double r_s, const TorusSpec& world) {
    ProximityGraph g;
    g.vertex_count = static_cast<int>(positions.size());
    CellGrid grid(world, r_s);
    grid.rebuild(positions);
    std::vector<NeighborHit> hits;
    for (int i = 0; i < g.vertex_count; ++i) {
        hits.clear();
        grid.neighbors_within(positions[static_cast<std::size_t>(i)], r_s, i, hits);
        for (const auto& h : hits) {
            if (h.id > i) g.edges.emplace_back(i, h.id);
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

int connected_components(const ProximityGraph& graph) {
    UnionFind uf(graph.vertex_count);
    for (const auto& [a, b] : graph.edges) uf.unite(a, b);
    return uf.components();
}

std::vector<double> search_times(const EventLog& log) {
    require_complete(log);
    std::vector<double> out;
    out.reserve(log.arrival_ticks.size());
    for (const auto& t : log.arrival_ticks) out.push_back(static_cast<double>(*t) / log.config.c_f);
    return out;
}

double mean_search_time(const EventLog& log) {
    require_complete(log);
    if (log.arrival_ticks.empty()) throw std::invalid_argument("empty log");
    std::int64_t total = 0;
    for (const auto& t : log.arrival_ticks) total += *t;
    return static_cast<double>(total) / static_cast<double>(log.arrival_ticks.size()) / log.config.c_f;
}

double first_find_time(const EventLog& log) {
    std::optional<std::int64_t> best;
    for (const auto& t : log.arrival_ticks) {
        if (t && (!best || *t < *best)) best = t;
    }
    if (!best) throw std::runtime_error("no agent found a target");
    return static_cast<double>(*best) / log.config.c_f;
}

double avg_components(std::span<const std::int32_t> series) {
    if (series.empty()) throw std::invalid_argument("component series is empty");
    std::int64_t total = 0;
    for (auto c : series) total += c;
    return static_cast<double>(total) / static_cast<double>(series.size());
}

double avg_components(const EventLog& log) { return avg_components(log.component_counts); }

double group_size(int n, double c_star) {
    if (!(c_star >= 1.0)) throw std::invalid_argument("c_star must be >= 1");
    return static_cast<double>(n) / c_star;
}

int direct_find_count(std::span<const std::int64_t> arrival_ticks, double r_s, double c_f, double v) {
    const double window = r_s * c_f / v;
    std::vector<std::int64_t> sorted(arrival_ticks.begin(), arrival_ticks.end());
    std::sort(sorted.begin(), sorted.end());
    // x_i = 0 iff some t_j lies in [t_i - window, t_i). Sorting makes that a
    // lookup of the largest strictly earlier arrival.
    int count = 0;
    std::size_t first_equal = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] != sorted[i - 1]) first_equal = i;
        bool followed = false;
        if (first_equal > 0) {
            const auto gap = static_cast<double>(sorted[i] - sorted[first_equal - 1]);
            followed = gap <= window;
        }
        if (!followed) ++count;
    }
    return count;
}

int direct_find_count(const EventLog& log) {
    std::vector<std::int64_t> ticks;
    for (const auto& t : log.arrival_ticks) {
        if (t) ticks.push_back(*t);
    }
    return direct_find_count(ticks, log.config.r_s, log.config.c_f, log.config.v);
}

double convergence_proportion(double c_star, int f_count) {
    if (f_count <= 0) throw std::invalid_argument("convergence proportion needs at least one direct find");
    return c_star / static_cast<double>(f_count);
}

double cover_time(std::span<const std::int64_t> covered_history, std::int64_t total_cells, double fraction,
                  double c_f) {
    if (fraction <= 0.0) return 0.0;
    if (total_cells <= 0) throw std::invalid_argument("total_cells must be positive");
    const double need = fraction * static_cast<double>(total_cells);
    const auto it = std::lower_bound(covered_history.begin(), covered_history.end(), need,
                                     [](std::int64_t have, double want) { return static_cast<double>(have) < want; });
    if (it == covered_history.end()) {
        throw CoverageNotReached("coverage fraction " + std::to_string(fraction) + " not reached");
    }
    return static_cast<double>(it - covered_history.begin()) / c_f;
}

double subgroup_cover_time(double full_time, int n, double g_size) {
    if (!(g_size >= 1.0)) throw std::invalid_argument("g_size must be >= 1");
    return static_cast<double>(n) / g_size * full_time;
}

MetricsReport compute_metrics(const EventLog& log, std::span<const double> cover_fractions) {
    MetricsReport r;
    const auto& cfg = log.config;
    if (!cfg.metrics_mode()) {
        r.censored = log.censored_ids();
        if (r.censored.empty()) r.s_avg = mean_search_time(log);
        if (!log.arrival_order.empty()) {
            r.first_find = first_find_time(log);
            r.f_count = direct_find_count(log);
        }
    }
    if (!log.component_counts.empty()) {
        r.c_comp_star = avg_components(log);
        r.g_size = group_size(cfg.n, *r.c_comp_star);
        if (r.f_count && *r.f_count > 0) r.c_prop = convergence_proportion(*r.c_comp_star, *r.f_count);
    }
    if (log.coverage_side > 0 && !log.coverage_counts.empty()) {
        const auto total = log.coverage_side * log.coverage_side;
        for (double x : cover_fractions) {
            std::optional<double> t;
            try {
                t = cover_time(log.coverage_counts, total, x, cfg.c_f);
            } catch (const CoverageNotReached&) {
            }
            r.cover_times[x] = t;
            if (t && r.g_size) {
                r.subgroup_cover_times[x] = subgroup_cover_time(*t, cfg.n, *r.g_size);
            } else {
                r.subgroup_cover_times[x] = std::nullopt;
            }
        }
    }
    return r;
}

}  // namespace swarm
