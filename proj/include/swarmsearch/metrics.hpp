#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swarmsearch/coverage.hpp"
#include "swarmsearch/engine.hpp"
#include "swarmsearch/geometry.hpp"

namespace swarm {

/// Raised when a search-mode statistic is requested from a run in which some
/// agents never found a target.
class CensoredRunError : public std::runtime_error {
public:
    explicit CensoredRunError(std::vector<int> ids);
    [[nodiscard]] const std::vector<int>& unfinished() const { return ids_; }

private:
    std::vector<int> ids_;
};

class CoverageNotReached : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Agents as vertices, an edge wherever two agents are within r_s of each other.
struct ProximityGraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;  // i < j
};

[[nodiscard]] ProximityGraph build_proximity_graph(std::span<const Vec2> positions, double r_s,
                                                   const TorusSpec& world);
[[nodiscard]] int connected_components(const ProximityGraph& graph);

/// Mean over agents of the search time, in seconds.
[[nodiscard]] double mean_search_time(const EventLog& log);
/// Earliest search time in seconds.
[[nodiscard]] double first_find_time(const EventLog& log);
/// Per-agent search times in seconds, agent order.
[[nodiscard]] std::vector<double> search_times(const EventLog& log);

/// Mean of the per-tick component series.
[[nodiscard]] double avg_components(const EventLog& log);
[[nodiscard]] double avg_components(std::span<const std::int32_t> series);

[[nodiscard]] double group_size(int n, double c_star);

/// Number of direct finds: agents with no earlier arriver j where
/// 0 < t_i - t_j <= r_s * c_f / v ticks.
[[nodiscard]] int direct_find_count(std::span<const std::int64_t> arrival_ticks, double r_s, double c_f, double v);
[[nodiscard]] int direct_find_count(const EventLog& log);

/// C_comp* / F_#, unclamped.
[[nodiscard]] double convergence_proportion(double c_star, int f_count);

/// First time (seconds) at which covered / total >= fraction.
[[nodiscard]] double cover_time(std::span<const std::int64_t> covered_history, std::int64_t total_cells,
                                double fraction, double c_f);
[[nodiscard]] double subgroup_cover_time(double full_time, int n, double g_size);

/// Observables of one run; fields not applicable to the run mode stay empty.
struct MetricsReport {
    std::optional<double> s_avg;  ///< seconds
    std::optional<double> first_find;  ///< seconds
    std::optional<int> f_count;
    std::optional<double> c_comp_star;
    std::optional<double> c_prop;
    std::optional<double> g_size;
    std::map<double, std::optional<double>> cover_times;           ///< fraction -> seconds
    std::map<double, std::optional<double>> subgroup_cover_times;  ///< fraction -> seconds
    std::vector<int> censored;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Everything computable from a single log. Search runs fill the search-time
/// fields; metrics-mode runs fill the component and coverage fields.
[[nodiscard]] MetricsReport compute_metrics(const EventLog& log, std::span<const double> cover_fractions = {});

}  // namespace swarm
