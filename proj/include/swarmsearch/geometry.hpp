#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace swarm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    constexpr Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

[[nodiscard]] inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
[[nodiscard]] inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// Square region of side L with wraparound edges.
class TorusSpec {
public:
    explicit TorusSpec(double side_length) : side_(side_length) {
        if (!(side_length > 0.0) || !std::isfinite(side_length)) {
            throw std::invalid_argument("torus side_length must be positive and finite");
        }
    }

    [[nodiscard]] double side_length() const { return side_; }
    [[nodiscard]] double area() const { return side_ * side_; }

    /// Maps a coordinate into [0, L).
    [[nodiscard]] double wrap(double c) const {
        if (c >= 0.0 && c < side_) return c;
        double r = std::fmod(c, side_);
        if (r < 0.0) r += side_;
        // fmod of a tiny negative value can round up to exactly L
        if (r >= side_) r = 0.0;
        return r;
    }
    [[nodiscard]] Vec2 wrap(Vec2 p) const { return {wrap(p.x), wrap(p.y)}; }

private:
    double side_;
};

namespace detail {
// Minimal-image component, result in [-L/2, L/2).
[[nodiscard]] inline double min_image(double d, double side) {
    const double half = 0.5 * side;
    if (d >= half) {
        d -= side;
    } else if (d < -half) {
        d += side;
    }
    return d;
}
}  // namespace detail

/// Shortest displacement from a to b under wraparound.
[[nodiscard]] inline Vec2 torus_delta(Vec2 a, Vec2 b, const TorusSpec& world) {
    const double side = world.side_length();
    a = world.wrap(a);
    b = world.wrap(b);
    return {detail::min_image(b.x - a.x, side), detail::min_image(b.y - a.y, side)};
}

[[nodiscard]] inline double torus_distance(Vec2 a, Vec2 b, const TorusSpec& world) {
    return norm(torus_delta(a, b, world));
}

/// Squared torus distance for points already inside [0, L)^2. Hot-path helper.
[[nodiscard]] inline double torus_distance_sq_wrapped(Vec2 a, Vec2 b, double side) {
    const double dx = detail::min_image(b.x - a.x, side);
    const double dy = detail::min_image(b.y - a.y, side);
    return dx * dx + dy * dy;
}

[[nodiscard]] inline double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
[[nodiscard]] inline double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Maps an angle in degrees into [0, 360).
[[nodiscard]] inline double normalize_degrees(double deg) {
    if (deg >= 0.0 && deg < 360.0) return deg;
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r = 0.0;
    return r;
}

[[nodiscard]] inline Vec2 unit_from_angle(double theta_deg) {
    const double rad = deg_to_rad(normalize_degrees(theta_deg));
    return {std::cos(rad), std::sin(rad)};
}

namespace detail {
// Taylor series, accurate to ~1e-16 for |x| <= pi/4; larger angles use libm.
inline void sincos_rad(double x, double& s, double& c) {
    if (std::fabs(x) > 0.7853981633974483) {
        s = std::sin(x);
        c = std::cos(x);
        return;
    }
    const double x2 = x * x;
    s = x * (1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 + x2 * (1.0 / 362880 +
            x2 * (-1.0 / 39916800 + x2 * (1.0 / 6227020800 + x2 * (-1.0 / 1307674368000))))))));
    c = 1.0 + x2 * (-0.5 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 + x2 * (1.0 / 40320 + x2 * (-1.0 / 3628800 +
            x2 * (1.0 / 479001600 + x2 * (-1.0 / 87178291200 + x2 * (1.0 / 20922789888000))))))));
}
}  // namespace detail

/// Unit vector u turned counterclockwise by theta_deg, renormalized.
[[nodiscard]] inline Vec2 rotate_unit(Vec2 u, double theta_deg) {
    double s = 0.0;
    double c = 1.0;
    detail::sincos_rad(deg_to_rad(theta_deg), s, c);
    const Vec2 r{c * u.x - s * u.y, s * u.x + c * u.y};
    return (1.0 / norm(r)) * r;
}

/// Angle in degrees within [0, 360) that v forms with the positive x-axis.
[[nodiscard]] inline double angle_of(Vec2 v) { return normalize_degrees(rad_to_deg(std::atan2(v.y, v.x))); }

/// Deterministic random stream keyed by (seed, stream_id).
///
/// xoshiro256** seeded through splitmix64, so distinct stream ids give
/// decorrelated sequences and no state is shared between streams.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal draw (Marsaglia polar method).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t& state);
/// Stateless 64-bit mix of two words; used to derive replicate seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace swarm
