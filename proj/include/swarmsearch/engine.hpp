#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsearch/behavior.hpp"
#include "swarmsearch/coverage.hpp"
#include "swarmsearch/geometry.hpp"
#include "swarmsearch/spatial_index.hpp"
#include "swarmsearch/union_find.hpp"

namespace swarm {

/// Raised for invalid configuration; key() names the offending field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Every environmental and agent parameter of one model instance.
struct SimConfig {
    double side_length = 20000.0;  ///< m, square torus side
    int n = 50;
    int targets = 1;
    double v = 10.0;    ///< m/s
    double c_f = 1.0;   ///< Hz, direction updates per second
    double r_t = 10.0;  ///< m
    double r_s = 150.0; ///< m
    double r1_frac = 0.3;
    double r2_frac = 0.7;
    double rho = 0.0;
    double sigma = 3.0;  ///< degrees
    std::uint64_t seed = 0;
    /// Search mode: tick cap. Metrics mode: exact tick budget. 0 selects the default.
    std::int64_t max_ticks = 0;
    bool targets_enabled = true;
    bool record_trajectory = false;
    /// Per-tick connected-component counts; always on in metrics mode.
    bool record_components = false;
    CoverageRule coverage_rule = CoverageRule::Disc;

    [[nodiscard]] double step() const { return v / c_f; }
    [[nodiscard]] ZoneRadii zones() const { return {r1_frac * r_s, r2_frac * r_s, r_s, r_t}; }
    [[nodiscard]] bool metrics_mode() const { return !targets_enabled; }
    /// 5e6 * c_f ticks when searching, 5e5 * c_f ticks in metrics mode.
    [[nodiscard]] std::int64_t effective_max_ticks() const;
    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct AgentState {
    int id = 0;
    Vec2 position;
    double heading = 0.0;  ///< degrees in [0, 360), final heading of the last tick
    Vec2 direction{1.0, 0.0};  ///< unit vector of heading
    BehaviorState behavior;
    std::optional<std::int64_t> arrival_tick;
};

struct World {
    TorusSpec torus{1.0};
    std::vector<AgentState> agents;
    std::vector<Vec2> targets;
    std::int64_t tick = 0;
};

using StateCensus = std::array<std::int32_t, 4>;  // indexed by StateTag

struct FrameRecord {
    std::int64_t tick = 0;
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    StateTag tag = StateTag::Search;

    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

/// Everything a run produces. All metrics are computed from this alone.
struct EventLog {
    SimConfig config;
    std::vector<Vec2> targets;
    std::int64_t ticks_run = 0;
    /// Per agent: tick its distance to a target first fell <= r_t; nullopt if it never did.
    std::vector<std::optional<std::int64_t>> arrival_ticks;
    /// Agent ids in the order arrivals were recorded.
    std::vector<int> arrival_order;
    /// Component count of the proximity graph at snapshots 0..ticks_run.
    std::vector<std::int32_t> component_counts;
    /// State census at snapshots 0..ticks_run.
    std::vector<StateCensus> census;
    /// Coverage grid cells per side and covered-cell count at snapshots 0..ticks_run.
    std::int64_t coverage_side = 0;
    std::vector<std::int64_t> coverage_counts;
    std::vector<FrameRecord> trajectory;
    bool lock_ever_entered = false;

    [[nodiscard]] std::vector<int> censored_ids() const;
    [[nodiscard]] bool all_arrived() const { return censored_ids().empty(); }

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Places n Search agents uniformly in a disc of radius r_s / 2 around the
/// center and t targets uniformly over the region.
[[nodiscard]] World init_world(const SimConfig& config, RngStream& rng);

/// Incremental simulation: one synchronous tick per step().
class Simulation {
public:
    explicit Simulation(SimConfig config);

    [[nodiscard]] const World& world() const { return world_; }
    [[nodiscard]] const SimConfig& config() const { return config_; }
    [[nodiscard]] const EventLog& log() const { return log_; }
    [[nodiscard]] bool finished() const;
    [[nodiscard]] int active_count() const { return static_cast<int>(active_.size()); }

    void step();
    void run();
    [[nodiscard]] EventLog take_log() { return std::move(log_); }

private:
    void record_snapshot();
    void rebuild_active();
    void scan_targets(Vec2 p, double& target_dist, int& target_id, std::optional<FeederSighting>& feeder);

    SimConfig config_;
    ZoneRadii zones_;
    World world_;
    World next_;
    std::vector<RngStream> agent_rng_;
    std::vector<int> active_;
    std::vector<Vec2> positions_;
    std::vector<std::int64_t> detect_tick_;
    std::vector<char> target_occupied_;
    CellGrid social_grid_;
    CellGrid target_grid_;
    std::vector<NeighborHit> target_hits_;
    std::vector<std::vector<SocialContact>> adjacency_;  // social neighbors of each active agent
    UnionFind uf_{0};
    std::optional<CoverageGrid> coverage_;
    std::vector<int> newly_occupied_;
    double sense_sq_ = 0.0;
    bool single_target_ = false;
    StateCensus census_{};
    bool any_feeder_ = false;
    EventLog log_;
};

/// Runs one replicate to completion (search mode) or for its budget (metrics mode).
[[nodiscard]] EventLog run_simulation(const SimConfig& config);

}  // namespace swarm
