#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "swarmsearch/geometry.hpp"

namespace swarm {

enum class StateTag : std::uint8_t { Search = 0, Lock = 1, Find = 2, Arrived = 3 };

[[nodiscard]] std::string_view to_string(StateTag tag);

/// Search/Lock/Find state machine plus the terminal Arrived state.
///
/// lock_anchor is set only in Lock; target_id only in Find and Arrived.
struct BehaviorState {
    StateTag tag = StateTag::Search;
    std::optional<Vec2> lock_anchor;
    std::optional<int> target_id;

    static BehaviorState search() { return {}; }
    static BehaviorState lock(Vec2 anchor) { return {StateTag::Lock, anchor, std::nullopt}; }
    static BehaviorState find(int target) { return {StateTag::Find, std::nullopt, target}; }
    static BehaviorState arrived(int target) { return {StateTag::Arrived, std::nullopt, target}; }

    friend bool operator==(const BehaviorState&, const BehaviorState&) = default;
};

/// Repulsion [0, r1), alignment [r1, r2), attraction [r2, r_s]; r_t is target detection.
struct ZoneRadii {
    double r1 = 45.0;
    double r2 = 105.0;
    double r_s = 150.0;
    double r_t = 10.0;

    /// Throws std::invalid_argument unless 0 <= r1 <= r2 <= r_s and r_t > 0.
    void validate() const;
};

/// One sensed neighbor: where it is, where it is heading, how far it is.
struct Neighbor {
    Vec2 position;
    Vec2 heading;
    double distance = 0.0;
};

/// A neighbor seen from the focal agent: offset is the minimal-image
/// displacement self -> neighbor and distance its length (callers keep the two
/// consistent; the distance is used both for zones and for normalizing).
struct SocialContact {
    Vec2 offset;
    Vec2 heading;
    double distance = 0.0;
};

struct FeederSighting {
    Vec2 position;
    double distance = 0.0;
};

/// Heading in degrees of the individual (self) component.
///
/// On the first tick this is a fresh uniform draw in [0, 360). Afterwards it is
/// the previous *final* heading plus Normal(0, sigma) turning noise.
[[nodiscard]] double self_direction(double prev_final_heading, double sigma, bool is_first_tick, RngStream& rng);

/// The Normal(0, sigma) turning noise in degrees; no draw when sigma is 0.
[[nodiscard]] inline double turning_angle(double sigma, RngStream& rng) {
    if (sigma == 0.0) return 0.0;
    return sigma * rng.normal();
}

/// Zonal social direction, or nullopt when nothing is sensed or the sum cancels.
///
/// Any neighbor strictly inside r1 switches to pure repulsion. Otherwise each
/// alignment neighbor contributes its heading and each attraction neighbor the
/// unit vector toward it, all with equal weight.
[[nodiscard]] std::optional<Vec2> social_direction(Vec2 self_pos, std::span<const Neighbor> neighbors,
                                                   const ZoneRadii& zones, const TorusSpec& world);
/// Same rule on precomputed offsets.
[[nodiscard]] std::optional<Vec2> social_direction(std::span<const SocialContact> contacts, const ZoneRadii& zones);

/// Normalized (1 - rho) * d_self + rho * d_social. Falls back to d_self when the
/// social term is absent, rho is zero, or the blend cancels.
[[nodiscard]] Vec2 blended_direction(Vec2 d_self, std::optional<Vec2> d_social, double rho);

/// Applies one synchronous state transition.
///
/// Target detection (<= r_t) wins over locking. Only Search agents lock, and only
/// onto feeders (agents that already sit on a target). Arrived is terminal.
[[nodiscard]] BehaviorState transition_state(const BehaviorState& current, double dist_to_nearest_target,
                                             int nearest_target_id, std::optional<FeederSighting> nearest_feeder,
                                             const ZoneRadii& zones);

/// Goal point of a Find or Lock agent.
[[nodiscard]] Vec2 goal_point(const BehaviorState& state, std::span<const Vec2> targets);

/// Unit vector toward the goal along the minimal-image displacement.
[[nodiscard]] Vec2 goal_steering(const BehaviorState& state, Vec2 self_pos, const TorusSpec& world,
                                 std::span<const Vec2> targets);

}  // namespace swarm
