#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarmsearch/geometry.hpp"

namespace swarm {

enum class CoverageRule : std::uint8_t {
    Disc,   ///< cell covered when its center is within r_t of an agent
    Point,  ///< cell covered when an agent position falls inside it
};

/// Covered-cell bitset over an m x m raster of the torus, cell side L / m with
/// m = ceil(L / (r_t / 2)). Cells never uncover.
class CoverageGrid {
public:
    CoverageGrid(const TorusSpec& world, double r_t, CoverageRule rule = CoverageRule::Disc);

    void update(std::span<const Vec2> positions);
    [[nodiscard]] bool covered(std::int64_t ix, std::int64_t iy) const;
    [[nodiscard]] std::int64_t covered_count() const { return covered_; }
    /// Recount of set bits, independent of the running counter.
    [[nodiscard]] std::int64_t popcount() const;
    [[nodiscard]] std::int64_t side() const { return m_; }
    [[nodiscard]] std::int64_t total_cells() const { return m_ * m_; }
    [[nodiscard]] double cell_width() const { return w_; }
    [[nodiscard]] CoverageRule rule() const { return rule_; }

private:
    void mark(std::int64_t ix, std::int64_t iy);

    TorusSpec world_;
    double r_t_;
    CoverageRule rule_;
    std::int64_t m_;
    double w_;
    std::vector<std::uint64_t> bits_;
    std::int64_t covered_ = 0;
};

void update_coverage(CoverageGrid& grid, std::span<const Vec2> positions);

}  // namespace swarm
