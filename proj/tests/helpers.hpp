#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bray/vec3.hpp"

namespace braytest {

// Deterministic uniform draws straight from the engine bits, so results do
// not depend on the library's distribution implementations.
struct Rng {
    explicit Rng(uint64_t seed) : eng(seed) {}

    double unit_interval() { return (eng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit_interval(); }

    bray::Vec3 unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    bray::Vec3 in_ball(const bray::Vec3& center, double radius) {
        for (;;) {
            const bray::Vec3 p{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
            if (bray::norm2(p) < 1.0) return center + p * radius;
        }
    }

    std::mt19937_64 eng;
};

}  // namespace braytest
