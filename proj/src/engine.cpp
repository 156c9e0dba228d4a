#include "swarmsearch/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmsearch/union_find.hpp"

namespace swarm {

namespace {
constexpr double kRhoMax = 0.9;
constexpr double kRhoSlack = 1e-12;  // tolerates 0.1 * 9 style grid arithmetic

void require(bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
}
}  // namespace

std::int64_t SimConfig::effective_max_ticks() const {
    if (max_ticks > 0) return max_ticks;
    const double per_hz = metrics_mode() ? 5e5 : 5e6;
    return std::max<std::int64_t>(1, std::llround(per_hz * c_f));
}

void SimConfig::validate() const {
    require(std::isfinite(side_length) && side_length > 0.0, "side_length", "must be positive");
    require(n >= 1, "n", "must be at least 1");
    require(targets >= 0, "targets", "must be non-negative");
    require(!targets_enabled || targets >= 1, "targets", "must be at least 1 when targets are enabled");
    require(std::isfinite(v) && v > 0.0, "v", "must be positive");
    require(std::isfinite(c_f) && c_f > 0.0, "c_f", "must be positive");
    require(std::isfinite(r_t) && r_t > 0.0, "r_t", "must be positive");
    require(std::isfinite(r_s) && r_s > 0.0, "r_s", "must be positive");
    require(std::isfinite(r1_frac) && r1_frac >= 0.0 && r1_frac <= 1.0, "r1_frac", "must lie in [0, 1]");
    require(std::isfinite(r2_frac) && r2_frac >= 0.0 && r2_frac <= 1.0, "r2_frac", "must lie in [0, 1]");
    require(r1_frac <= r2_frac, "r1_frac", "must not exceed r2_frac");
    require(std::isfinite(rho) && rho >= 0.0 && rho <= kRhoMax + kRhoSlack, "rho", "must lie in [0, 0.9]");
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma", "must be non-negative");
    require(max_ticks >= 0, "max_ticks", "must be non-negative");
}

std::vector<int> EventLog::censored_ids() const {
    std::vector<int> ids;
    if (config.metrics_mode()) return ids;
    for (std::size_t i = 0; i < arrival_ticks.size(); ++i) {
        if (!arrival_ticks[i]) ids.push_back(static_cast<int>(i));
    }
    return ids;
}

World init_world(const SimConfig& config, RngStream& rng) {
    config.validate();
    World world{TorusSpec(config.side_length), {}, {}, 0};
    const double half = 0.5 * config.side_length;
    const double disc = 0.5 * config.r_s;
    world.agents.reserve(static_cast<std::size_t>(config.n));
    for (int i = 0; i < config.n; ++i) {
        const double r = disc * std::sqrt(rng.uniform());
        const Vec2 offset = r * unit_from_angle(rng.uniform(0.0, 360.0));
        AgentState a;
        a.id = i;
        a.position = world.torus.wrap(Vec2{half, half} + offset);
        a.heading = normalize_degrees(self_direction(0.0, config.sigma, true, rng));
        a.direction = unit_from_angle(a.heading);
        world.agents.push_back(a);
    }
    if (config.targets_enabled) {
        for (int j = 0; j < config.targets; ++j) {
            const double x = rng.uniform(0.0, config.side_length);
            const double y = rng.uniform(0.0, config.side_length);
            world.targets.push_back(world.torus.wrap(Vec2{x, y}));
        }
    }
    return world;
}

Simulation::Simulation(SimConfig config)
    : config_((config.validate(), config)),
      zones_(config_.zones()),
      social_grid_(TorusSpec(config_.side_length), std::max(config_.r_s, config_.r_t)),
      target_grid_(TorusSpec(config_.side_length), std::max(config_.r_s, config_.r_t)) {
    RngStream world_rng(config_.seed, 0);
    world_ = init_world(config_, world_rng);
    next_ = world_;
    const auto n = static_cast<std::size_t>(config_.n);
    agent_rng_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) agent_rng_.emplace_back(config_.seed, i + 1);
    detect_tick_.assign(n, -1);
    target_occupied_.assign(world_.targets.size(), 0);
    adjacency_.resize(n);
    positions_.resize(n);
    uf_ = UnionFind(config_.n);
    if (world_.targets.size() > 1) target_grid_.rebuild(world_.targets);
    single_target_ = world_.targets.size() == 1;
    sense_sq_ = std::max(config_.r_s, config_.r_t) * std::max(config_.r_s, config_.r_t);
    if (config_.metrics_mode()) {
        config_.record_components = true;
        coverage_.emplace(world_.torus, config_.r_t, config_.coverage_rule);
    }

    log_.config = config_;
    log_.targets = world_.targets;
    log_.arrival_ticks.assign(n, std::nullopt);
    log_.coverage_side = coverage_ ? coverage_->side() : 0;
    census_ = {config_.n, 0, 0, 0};
    rebuild_active();
    record_snapshot();
}

bool Simulation::finished() const {
    if (world_.tick >= config_.effective_max_ticks()) return true;
    return !config_.metrics_mode() && active_.empty();
}

void Simulation::rebuild_active() {
    active_.clear();
    for (const auto& a : world_.agents) {
        if (a.behavior.tag != StateTag::Arrived) active_.push_back(a.id);
    }
}

void Simulation::record_snapshot() {
    const auto n = world_.agents.size();
    const bool social = config_.rho > 0.0;
    if (social || config_.record_components || coverage_) {
        for (std::size_t i = 0; i < n; ++i) positions_[i] = world_.agents[i].position;
    }
    const bool all_active = active_.size() == n;
    const bool components = config_.record_components;

    if (social || components) {
        social_grid_.rebuild(positions_, active_);
        if (components) uf_.reset(config_.n);
        if (social) {
            for (const int i : active_) adjacency_[static_cast<std::size_t>(i)].clear();
        }
        social_grid_.for_each_pair_within(config_.r_s, [&](int a, int b, double d, Vec2 off) {
            if (social) {
                const auto ua = static_cast<std::size_t>(a);
                const auto ub = static_cast<std::size_t>(b);
                adjacency_[ua].push_back({off, world_.agents[ub].direction, d});
                adjacency_[ub].push_back({Vec2{-off.x, -off.y}, world_.agents[ua].direction, d});
            }
            if (components && all_active) uf_.unite(a, b);
        });
    }

    if (components) {
        if (!all_active) {
            // Arrived agents still count as vertices of the proximity graph.
            CellGrid all(world_.torus, std::max(config_.r_s, config_.r_t));
            all.rebuild(positions_);
            uf_.reset(config_.n);
            all.for_each_pair_within(config_.r_s, [&](int a, int b, double, Vec2) { uf_.unite(a, b); });
        }
        log_.component_counts.push_back(uf_.components());
    }
    log_.census.push_back(census_);
    if (coverage_) {
        coverage_->update(positions_);
        log_.coverage_counts.push_back(coverage_->covered_count());
    }
}

void Simulation::scan_targets(Vec2 p, double& target_dist, int& target_id, std::optional<FeederSighting>& feeder) {
    target_dist = std::numeric_limits<double>::infinity();
    target_id = -1;
    feeder.reset();
    const auto& targets = world_.targets;
    if (targets.empty()) return;
    const double side = config_.side_length;
    auto consider = [&](int id, double d) {
        if (d < target_dist) {
            target_dist = d;
            target_id = id;
        }
        if (any_feeder_ && target_occupied_[static_cast<std::size_t>(id)] && d <= config_.r_s &&
            (!feeder || d < feeder->distance)) {
            feeder = FeederSighting{targets[static_cast<std::size_t>(id)], d};
        }
    };
    if (targets.size() == 1) {
        const double d2 = torus_distance_sq_wrapped(p, targets[0], side);
        if (d2 > sense_sq_) return;  // nothing within either radius
        consider(0, std::sqrt(d2));
        return;
    }
    target_hits_.clear();
    target_grid_.neighbors_within(p, target_grid_.cell_size(), -1, target_hits_);
    for (const auto& h : target_hits_) consider(h.id, h.distance);
}

void Simulation::step() {
    if (finished()) return;
    const std::int64_t k = world_.tick;
    const double step_len = config_.step();
    const double rho = config_.rho;
    const bool social = rho > 0.0;

    if (config_.record_trajectory) {
        for (const auto& a : world_.agents) {
            log_.trajectory.push_back({k, a.id, a.position.x, a.position.y, a.heading, a.behavior.tag});
        }
    }

    // Inactive agents never change, so next_ only needs the active slots.
    newly_occupied_.clear();
    for (const int i : active_) {
        const AgentState& a = world_.agents[static_cast<std::size_t>(i)];
        AgentState& b = next_.agents[static_cast<std::size_t>(i)];
        b = a;

        double target_dist = 0.0;
        int target_id = -1;
        std::optional<FeederSighting> feeder;
        BehaviorState st;
        if (single_target_ && torus_distance_sq_wrapped(a.position, world_.targets[0], config_.side_length) > sense_sq_) {
            st = a.behavior;  // nothing sensed, state unchanged
        } else {
            scan_targets(a.position, target_dist, target_id, feeder);
            st = transition_state(a.behavior, target_dist, target_id, feeder, zones_);
        }
        if (st.tag == StateTag::Find && a.behavior.tag != StateTag::Find) {
            detect_tick_[static_cast<std::size_t>(i)] = k;
            log_.arrival_ticks[static_cast<std::size_t>(i)] = k;
            log_.arrival_order.push_back(i);
        }
        if (st.tag == StateTag::Lock) log_.lock_ever_entered = true;

        if (st.tag == StateTag::Search) {
            // d_self is the previous direction turned by the noise angle; equal to
            // unit_from_angle(heading + beta) up to rounding.
            const double beta =
                k == 0 ? 0.0 : turning_angle(config_.sigma, agent_rng_[static_cast<std::size_t>(i)]);
            const double self_deg = a.heading + beta;
            const Vec2 d_self = beta == 0.0 ? a.direction : rotate_unit(a.direction, beta);
            std::optional<Vec2> d_social;
            if (social) {
                d_social = social_direction(adjacency_[static_cast<std::size_t>(i)], zones_);
            }
            const Vec2 d_final = social ? blended_direction(d_self, d_social, rho) : d_self;
            if (d_final == d_self) {
                b.heading = normalize_degrees(self_deg);
            } else {
                b.heading = angle_of(d_final);
            }
            b.direction = d_final;
            b.position = world_.torus.wrap(a.position + step_len * d_final);
        } else {
            // Find and Lock steer straight at their goal, no noise, no social term.
            const Vec2 goal = goal_point(st, world_.targets);
            const Vec2 delta = torus_delta(a.position, goal, world_.torus);
            const double dist = norm(delta);
            if (dist > 0.0) {
                b.direction = (1.0 / dist) * delta;
                b.heading = angle_of(b.direction);
            }
            if (dist <= step_len) {
                b.position = goal;
                if (st.tag == StateTag::Find) {
                    st = BehaviorState::arrived(*st.target_id);
                    b.arrival_tick = detect_tick_[static_cast<std::size_t>(i)];
                    newly_occupied_.push_back(*st.target_id);
                }
            } else {
                b.position = world_.torus.wrap(a.position + step_len * b.direction);
            }
        }
        --census_[static_cast<std::size_t>(a.behavior.tag)];
        ++census_[static_cast<std::size_t>(st.tag)];
        b.behavior = std::move(st);
    }

    // Feeders become visible from the next snapshot on.
    for (const int t : newly_occupied_) {
        target_occupied_[static_cast<std::size_t>(t)] = 1;
        any_feeder_ = true;
    }
    std::swap(world_.agents, next_.agents);
    world_.tick = k + 1;
    log_.ticks_run = world_.tick;
    if (!newly_occupied_.empty()) {
        rebuild_active();
        next_.agents = world_.agents;
    }
    record_snapshot();
}

void Simulation::run() {
    while (!finished()) step();
}

EventLog run_simulation(const SimConfig& config) {
    Simulation sim(config);
    sim.run();
    return sim.take_log();
}

}  // namespace swarm
