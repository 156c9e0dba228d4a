#include "swarmsearch/spatial_index.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace swarm {

namespace {
// Cells are made a hair wider than cell_size so that a point within cell_size
// of the query can never land two cells away through rounding of p / width.
constexpr double kCellSlack = 1.0 + 1e-9;

std::uint64_t hash_key(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return k;
}
}  // namespace

CellGrid::CellGrid(const TorusSpec& world, double cell_size) : world_(world), cell_size_(cell_size) {
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw std::invalid_argument("cell_size must be positive");
    }
    const double raw = std::floor(world.side_length() / (cell_size * kCellSlack));
    dims_ = static_cast<int>(std::clamp(raw, 1.0, 1'000'000.0));
    cell_w_ = world.side_length() / dims_;
    const auto cells = static_cast<std::uint64_t>(dims_) * static_cast<std::uint64_t>(dims_);
    if (!exhaustive() && cells <= kDenseCells) dense_.assign(cells, Slot{kEmpty, 0, 0});
}

std::uint64_t CellGrid::key_of(Vec2 p) const {
    if (exhaustive()) return 0;
    const int cx = std::min(static_cast<int>(p.x / cell_w_), dims_ - 1);
    const int cy = std::min(static_cast<int>(p.y / cell_w_), dims_ - 1);
    return static_cast<std::uint64_t>(cy) * static_cast<std::uint64_t>(dims_) + static_cast<std::uint64_t>(cx);
}

void CellGrid::rebuild(std::span<const Vec2> positions) {
    std::vector<int> ids(positions.size());
    std::iota(ids.begin(), ids.end(), 0);
    rebuild(positions, ids);
}

void CellGrid::rebuild(std::span<const Vec2> positions, std::span<const int> ids) {
    entries_.clear();
    entries_.reserve(ids.size());
    for (int id : ids) {
        entries_.push_back({key_of(world_.wrap(positions[static_cast<std::size_t>(id)])), id});
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.key != b.key ? a.key < b.key : a.id < b.id;
    });
    pos_.resize(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        pos_[i] = world_.wrap(positions[static_cast<std::size_t>(entries_[i].id)]);
    }

    if (!dense_.empty()) {
        for (const auto k : dense_used_) dense_[k] = Slot{kEmpty, 0, 0};
        dense_used_.clear();
        occupied_ = 0;
        std::size_t i = 0;
        while (i < entries_.size()) {
            std::size_t j = i + 1;
            while (j < entries_.size() && entries_[j].key == entries_[i].key) ++j;
            const auto key = entries_[i].key;
            dense_[key] = Slot{key, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
            dense_used_.push_back(key);
            ++occupied_;
            i = j;
        }
        return;
    }

    occupied_ = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i == 0 || entries_[i].key != entries_[i - 1].key) ++occupied_;
    }
    const std::size_t cap = std::bit_ceil(std::max<std::size_t>(4, 2 * occupied_));
    table_.assign(cap, Slot{kEmpty, 0, 0});
    mask_ = cap - 1;
    std::size_t i = 0;
    while (i < entries_.size()) {
        std::size_t j = i + 1;
        while (j < entries_.size() && entries_[j].key == entries_[i].key) ++j;
        std::size_t h = hash_key(entries_[i].key) & mask_;
        while (table_[h].key != kEmpty) h = (h + 1) & mask_;
        table_[h] = Slot{entries_[i].key, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
        i = j;
    }
}

const CellGrid::Slot* CellGrid::lookup(std::uint64_t key) const {
    if (!dense_.empty()) {
        const Slot& s = dense_[key];
        return s.key == kEmpty ? nullptr : &s;
    }
    if (table_.empty()) return nullptr;
    std::size_t h = hash_key(key) & mask_;
    while (true) {
        const Slot& s = table_[h];
        if (s.key == key) return &s;
        if (s.key == kEmpty) return nullptr;
        h = (h + 1) & mask_;
    }
}

void CellGrid::scan_range(std::uint32_t begin, std::uint32_t end, Vec2 center, double radius, int exclude_id,
                          std::vector<NeighborHit>& out) const {
    const double side = world_.side_length();
    // squared pre-check with a little headroom; the exact test is on the root
    const double cut = radius * radius * (1.0 + 1e-12);
    for (std::uint32_t k = begin; k < end; ++k) {
        const int id = entries_[k].id;
        if (id == exclude_id) continue;
        const double d2 = torus_distance_sq_wrapped(center, pos_[k], side);
        if (d2 > cut) continue;
        const double d = std::sqrt(d2);
        if (d <= radius) out.push_back({id, d});
    }
}

void CellGrid::neighbors_within(Vec2 center, double radius, int exclude_id, std::vector<NeighborHit>& out) const {
    if (radius > cell_size_) throw std::invalid_argument("query radius exceeds cell_size");
    center = world_.wrap(center);
    if (exhaustive()) {
        scan_range(0, static_cast<std::uint32_t>(entries_.size()), center, radius, exclude_id, out);
        return;
    }
    const int cx = std::min(static_cast<int>(center.x / cell_w_), dims_ - 1);
    const int cy = std::min(static_cast<int>(center.y / cell_w_), dims_ - 1);
    for (int dy = -1; dy <= 1; ++dy) {
        int y = cy + dy;
        if (y < 0) y += dims_;
        if (y >= dims_) y -= dims_;
        for (int dx = -1; dx <= 1; ++dx) {
            int x = cx + dx;
            if (x < 0) x += dims_;
            if (x >= dims_) x -= dims_;
            const auto key = static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(dims_) +
                             static_cast<std::uint64_t>(x);
            if (const Slot* s = lookup(key)) scan_range(s->begin, s->end, center, radius, exclude_id, out);
        }
    }
}

std::vector<NeighborHit> CellGrid::neighbors_within(Vec2 center, double radius, int exclude_id) const {
    std::vector<NeighborHit> out;
    neighbors_within(center, radius, exclude_id, out);
    return out;
}

std::vector<int> CellGrid::ids_in_cell_of(Vec2 p) const {
    std::vector<int> ids;
    if (exhaustive()) return all_ids();
    if (const Slot* s = lookup(key_of(world_.wrap(p)))) {
        for (std::uint32_t k = s->begin; k < s->end; ++k) ids.push_back(entries_[k].id);
    }
    return ids;
}

std::vector<int> CellGrid::all_ids() const {
    std::vector<int> ids;
    ids.reserve(entries_.size());
    for (const auto& e : entries_) ids.push_back(e.id);
    return ids;
}

std::vector<NeighborHit> neighbors_within_bruteforce(std::span<const Vec2> positions, Vec2 center, double radius,
                                                     int exclude_id, const TorusSpec& world) {
    std::vector<NeighborHit> out;
    const Vec2 c = world.wrap(center);
    const double side = world.side_length();
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (static_cast<int>(i) == exclude_id) continue;
        const double d = std::sqrt(torus_distance_sq_wrapped(c, world.wrap(positions[i]), side));
        if (d <= radius) out.push_back({static_cast<int>(i), d});
    }
    return out;
}

}  // namespace swarm
