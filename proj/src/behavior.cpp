#include "swarmsearch/behavior.hpp"

#include <stdexcept>
#include <vector>

namespace swarm {

namespace {
constexpr double kDegenerateNorm = 1e-9;
}

std::string_view to_string(StateTag tag) {
    switch (tag) {
        case StateTag::Search: return "Search";
        case StateTag::Lock: return "Lock";
        case StateTag::Find: return "Find";
        case StateTag::Arrived: return "Arrived";
    }
    return "?";
}

void ZoneRadii::validate() const {
    if (!(r1 >= 0.0)) throw std::invalid_argument("r1 must be >= 0");
    if (!(r1 <= r2)) throw std::invalid_argument("r1 must be <= r2");
    if (!(r2 <= r_s)) throw std::invalid_argument("r2 must be <= r_s");
    if (!(r_t > 0.0)) throw std::invalid_argument("r_t must be > 0");
}

double self_direction(double prev_final_heading, double sigma, bool is_first_tick, RngStream& rng) {
    if (is_first_tick) return rng.uniform(0.0, 360.0);
    return prev_final_heading + turning_angle(sigma, rng);
}


std::optional<Vec2> social_direction(Vec2 self_pos, std::span<const Neighbor> neighbors, const ZoneRadii& zones,
                                     const TorusSpec& world) {
    std::vector<SocialContact> contacts;
    contacts.reserve(neighbors.size());
    for (const auto& nb : neighbors) {
        contacts.push_back({torus_delta(self_pos, nb.position, world), nb.heading, nb.distance});
    }
    return social_direction(contacts, zones);
}

std::optional<Vec2> social_direction(std::span<const SocialContact> contacts, const ZoneRadii& zones) {
    if (contacts.empty()) return std::nullopt;

    Vec2 sum{};
    bool repelled = false;
    for (const auto& c : contacts) {
        if (c.distance < zones.r1) {
            repelled = true;
            // a coincident neighbor has no defined away direction
            if (c.distance > 0.0) sum += (-1.0 / c.distance) * c.offset;
        }
    }
    if (!repelled) {
        for (const auto& c : contacts) {
            if (c.distance < zones.r2) {
                sum += c.heading;
            } else if (c.distance <= zones.r_s && c.distance > 0.0) {
                sum += (1.0 / c.distance) * c.offset;
            }
        }
    }

    const double len = norm(sum);
    if (len < kDegenerateNorm) return std::nullopt;
    return (1.0 / len) * sum;
}

Vec2 blended_direction(Vec2 d_self, std::optional<Vec2> d_social, double rho) {
    if (!d_social || rho == 0.0) return d_self;
    const Vec2 blend = (1.0 - rho) * d_self + rho * *d_social;
    const double len = norm(blend);
    if (len < kDegenerateNorm) return d_self;
    return (1.0 / len) * blend;
}

BehaviorState transition_state(const BehaviorState& current, double dist_to_nearest_target, int nearest_target_id,
                               std::optional<FeederSighting> nearest_feeder, const ZoneRadii& zones) {
    switch (current.tag) {
        case StateTag::Arrived:
        case StateTag::Find:
            return current;
        case StateTag::Search:
        case StateTag::Lock:
            break;
    }
    if (nearest_target_id >= 0 && dist_to_nearest_target <= zones.r_t) {
        return BehaviorState::find(nearest_target_id);
    }
    if (nearest_feeder && nearest_feeder->distance <= zones.r_s) {
        // Search locks on; Lock refreshes its anchor to the nearest feeder.
        return BehaviorState::lock(nearest_feeder->position);
    }
    return current;
}

Vec2 goal_point(const BehaviorState& state, std::span<const Vec2> targets) {
    if (state.tag == StateTag::Lock && state.lock_anchor) return *state.lock_anchor;
    if ((state.tag == StateTag::Find || state.tag == StateTag::Arrived) && state.target_id) {
        return targets[static_cast<std::size_t>(*state.target_id)];
    }
    throw std::logic_error("goal_point requires a Find, Lock, or Arrived state");
}

Vec2 goal_steering(const BehaviorState& state, Vec2 self_pos, const TorusSpec& world,
                   std::span<const Vec2> targets) {
    const Vec2 delta = torus_delta(self_pos, goal_point(state, targets), world);
    const double len = norm(delta);
    if (len == 0.0) return {1.0, 0.0};
    return (1.0 / len) * delta;
}

}  // namespace swarm
