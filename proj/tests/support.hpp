#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "swarmsearch/engine.hpp"
#include "swarmsearch/experiments.hpp"
#include "swarmsearch/io.hpp"

namespace swarm::testing {

// Golden-file fixtures.
inline SweepSpec smoke_sweep() {
    return parse_sweep_spec(
        "# smoke sweep\n"
        "side_length = 1500\n"
        "n = 6\n"
        "seed = 4242\n"
        "replicates = 3\n"
        "axis.rho = 0, 0.4\n"
        "axis.sigma = 2, 6\n");
}

inline SimConfig frames_config() {
    return parse_sim_config("side_length = 1000\nn = 4\nrho = 0.5\nseed = 8\nmax_ticks = 25\n");
}

// Steps a simulation to the end checking the per-tick invariants. Empty string when all hold.
inline std::string invariant_violation(const SimConfig& c) {
    Simulation sim(c);
    const double step = c.step();
    std::vector<AgentState> prev = sim.world().agents;
    int prev_arrived = 0;
    auto fail = [&](const std::string& what) { return "tick " + std::to_string(sim.world().tick) + ": " + what; };
    while (!sim.finished()) {
        sim.step();
        const auto& now = sim.world().agents;
        if (now.size() != static_cast<std::size_t>(c.n)) return fail("agent count changed");
        const auto& census = sim.log().census.back();
        if (census[0] + census[1] + census[2] + census[3] != c.n) return fail("census does not sum to n");
        const int arrived = census[static_cast<int>(StateTag::Arrived)];
        if (arrived < prev_arrived) return fail("arrived count decreased");
        prev_arrived = arrived;
        for (std::size_t i = 0; i < now.size(); ++i) {
            const auto& a = prev[i];
            const auto& b = now[i];
            if (std::fabs(norm(b.direction) - 1.0) > 1e-9) return fail("heading not unit norm");
            if (!(b.position.x >= 0.0 && b.position.x < c.side_length && b.position.y >= 0.0 &&
                  b.position.y < c.side_length)) {
                return fail("position outside the torus");
            }
            if (b.arrival_tick.has_value() != (b.behavior.tag == StateTag::Arrived)) return fail("arrival tick mismatch");
            const double moved = torus_distance(a.position, b.position, sim.world().torus);
            if (a.behavior.tag == StateTag::Arrived) {
                if (moved != 0.0 || !(b.behavior == a.behavior)) return fail("arrived agent changed");
            } else if (b.behavior.tag == StateTag::Arrived || (b.behavior.tag == StateTag::Lock && moved < step)) {
                // snapped onto its goal
                if (moved > step * (1.0 + 1e-9)) return fail("snap longer than a step");
            } else if (std::fabs(moved - step) > 1e-9 * step) {
                return fail("step magnitude off");
            }
        }
        prev = now;
    }
    const auto& cov = sim.log().coverage_counts;
    for (std::size_t k = 1; k < cov.size(); ++k) {
        if (cov[k] < cov[k - 1]) return "coverage decreased";
    }
    for (auto cc : sim.log().component_counts) {
        if (cc < 1 || cc > c.n) return "component count out of range";
    }
    return {};
}

}  // namespace swarm::testing
