#pragma once

#include <cstdint>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarmsearch/geometry.hpp"

namespace swarm {

struct NeighborHit {
    int id = -1;
    double distance = 0.0;

    friend bool operator==(const NeighborHit&, const NeighborHit&) = default;
};

/// Uniform cell grid over the torus, rebuilt from scratch every tick.
///
/// Occupied cells are stored as a sorted (cell, id) list. Cell key -> run goes
/// through a direct table on moderate grids and an open-addressing hash on very
/// fine ones, so memory stays bounded however fine the grid is. Worlds with fewer than 3 cells per side fall back to one bucket.
class CellGrid {
public:
    CellGrid(const TorusSpec& world, double cell_size);

    /// Indexes every position; ids are the position indices.
    void rebuild(std::span<const Vec2> positions);
    /// Indexes only the listed ids; positions is indexed by id.
    void rebuild(std::span<const Vec2> positions, std::span<const int> ids);

    /// Appends every indexed agent other than exclude_id at torus distance
    /// <= radius. Order is deterministic for a given grid.
    void neighbors_within(Vec2 center, double radius, int exclude_id, std::vector<NeighborHit>& out) const;
    [[nodiscard]] std::vector<NeighborHit> neighbors_within(Vec2 center, double radius, int exclude_id = -1) const;

    /// Calls fn(a, b, distance, offset) once per unordered pair of indexed agents
    /// at torus distance <= radius, where offset is the minimal-image b - a.
    /// Visit order is deterministic for a given grid.
    template <class Fn>
    void for_each_pair_within(double radius, Fn&& fn) const;

    [[nodiscard]] double cell_size() const { return cell_size_; }
    [[nodiscard]] double cell_width() const { return cell_w_; }
    [[nodiscard]] int dims() const { return dims_; }
    [[nodiscard]] bool exhaustive() const { return dims_ < 3; }
    [[nodiscard]] const TorusSpec& world() const { return world_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::size_t occupied_cells() const { return occupied_; }

    /// Ids stored in the cell containing p (exhaustive grids: all ids).
    [[nodiscard]] std::vector<int> ids_in_cell_of(Vec2 p) const;
    /// Every indexed id, in storage order.
    [[nodiscard]] std::vector<int> all_ids() const;

private:
    struct Entry {
        std::uint64_t key;
        int id;
    };
    struct Slot {
        std::uint64_t key;
        std::uint32_t begin;
        std::uint32_t end;
    };
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    [[nodiscard]] std::uint64_t key_of(Vec2 p) const;
    [[nodiscard]] const Slot* lookup(std::uint64_t key) const;
    void scan_range(std::uint32_t begin, std::uint32_t end, Vec2 center, double radius, int exclude_id,
                    std::vector<NeighborHit>& out) const;

    TorusSpec world_;
    double cell_size_;
    double cell_w_;
    int dims_;
    std::vector<Vec2> pos_;  // copy of indexed positions, by entry order
    std::vector<Entry> entries_;
    std::vector<Slot> table_;
    std::size_t mask_ = 0;
    // Direct cell -> run table for grids up to kDenseCells cells; only the
    // slots of occupied cells are touched on rebuild.
    static constexpr std::uint64_t kDenseCells = 1u << 20;
    std::vector<Slot> dense_;
    std::vector<std::uint64_t> dense_used_;
    std::size_t occupied_ = 0;
};

template <class Fn>
void CellGrid::for_each_pair_within(double radius, Fn&& fn) const {
    if (radius > cell_size_) throw std::invalid_argument("query radius exceeds cell_size");
    const double side = world_.side_length();
    const double cut = radius * radius * (1.0 + 1e-12);
    auto visit = [&](std::uint32_t k, std::uint32_t m) {
        const Vec2 a = pos_[k];
        const Vec2 b = pos_[m];
        const Vec2 off{detail::min_image(b.x - a.x, side), detail::min_image(b.y - a.y, side)};
        const double d2 = off.x * off.x + off.y * off.y;
        if (d2 > cut) return;
        const double d = std::sqrt(d2);
        if (d <= radius) fn(entries_[k].id, entries_[m].id, d, off);
    };
    const auto n = static_cast<std::uint32_t>(entries_.size());
    if (exhaustive()) {
        for (std::uint32_t k = 0; k < n; ++k) {
            for (std::uint32_t m = k + 1; m < n; ++m) visit(k, m);
        }
        return;
    }
    // Half stencil: own cell plus four forward cells. With dims >= 3 no cell
    // pair is reached twice through the wrap.
    static constexpr int kForward[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    const auto dims = static_cast<std::uint64_t>(dims_);
    std::uint32_t begin = 0;
    while (begin < n) {
        const std::uint64_t key = entries_[begin].key;
        std::uint32_t end = begin + 1;
        while (end < n && entries_[end].key == key) ++end;
        for (std::uint32_t k = begin; k < end; ++k) {
            for (std::uint32_t m = k + 1; m < end; ++m) visit(k, m);
        }
        const int cx = static_cast<int>(key % dims);
        const int cy = static_cast<int>(key / dims);
        for (const auto& f : kForward) {
            int x = cx + f[0];
            int y = cy + f[1];
            if (x < 0) x += dims_;
            if (x >= dims_) x -= dims_;
            if (y >= dims_) y -= dims_;
            const Slot* s = lookup(static_cast<std::uint64_t>(y) * dims + static_cast<std::uint64_t>(x));
            if (!s) continue;
            for (std::uint32_t k = begin; k < end; ++k) {
                for (std::uint32_t m = s->begin; m < s->end; ++m) visit(k, m);
            }
        }
        begin = end;
    }
}

/// Quadratic reference scan with the same inclusion rule as CellGrid.
[[nodiscard]] std::vector<NeighborHit> neighbors_within_bruteforce(std::span<const Vec2> positions, Vec2 center,
                                                                   double radius, int exclude_id,
                                                                   const TorusSpec& world);

}  // namespace swarm
