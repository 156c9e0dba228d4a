#include "swarmsearch/coverage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace swarm {

CoverageGrid::CoverageGrid(const TorusSpec& world, double r_t, CoverageRule rule)
    : world_(world), r_t_(r_t), rule_(rule) {
    if (!(r_t > 0.0)) throw std::invalid_argument("r_t must be positive");
    m_ = static_cast<std::int64_t>(std::ceil(world.side_length() / (0.5 * r_t)));
    w_ = world.side_length() / static_cast<double>(m_);
    bits_.assign(static_cast<std::size_t>((m_ * m_ + 63) / 64), 0);
}

void CoverageGrid::mark(std::int64_t ix, std::int64_t iy) {
    const auto cell = static_cast<std::uint64_t>(iy * m_ + ix);
    std::uint64_t& word = bits_[cell >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (cell & 63);
    if (!(word & bit)) {
        word |= bit;
        ++covered_;
    }
}

bool CoverageGrid::covered(std::int64_t ix, std::int64_t iy) const {
    const auto cell = static_cast<std::uint64_t>(iy * m_ + ix);
    return (bits_[cell >> 6] >> (cell & 63)) & 1U;
}

std::int64_t CoverageGrid::popcount() const {
    std::int64_t c = 0;
    for (auto w : bits_) c += std::popcount(w);
    return c;
}

void CoverageGrid::update(std::span<const Vec2> positions) {
    const double side = world_.side_length();
    const auto m = m_;
    auto wrap_index = [m](std::int64_t i) { return ((i % m) + m) % m; };
    const double r2 = r_t_ * r_t_;
    for (Vec2 p : positions) {
        p = world_.wrap(p);
        if (rule_ == CoverageRule::Point) {
            mark(std::min<std::int64_t>(static_cast<std::int64_t>(p.x / w_), m - 1),
                 std::min<std::int64_t>(static_cast<std::int64_t>(p.y / w_), m - 1));
            continue;
        }
        const auto x0 = static_cast<std::int64_t>(std::floor((p.x - r_t_) / w_ - 0.5));
        const auto x1 = static_cast<std::int64_t>(std::ceil((p.x + r_t_) / w_ - 0.5));
        const auto y0 = static_cast<std::int64_t>(std::floor((p.y - r_t_) / w_ - 0.5));
        const auto y1 = static_cast<std::int64_t>(std::ceil((p.y + r_t_) / w_ - 0.5));
        for (auto iy = y0; iy <= y1; ++iy) {
            const double dy = detail::min_image((static_cast<double>(iy) + 0.5) * w_ - p.y, side);
            if (dy * dy > r2) continue;
            const auto wy = wrap_index(iy);
            for (auto ix = x0; ix <= x1; ++ix) {
                const double dx = detail::min_image((static_cast<double>(ix) + 0.5) * w_ - p.x, side);
                if (dx * dx + dy * dy <= r2) mark(wrap_index(ix), wy);
            }
        }
    }
}

void update_coverage(CoverageGrid& grid, std::span<const Vec2> positions) { grid.update(positions); }

}  // namespace swarm
