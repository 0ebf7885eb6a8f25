#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fredholm {

/// Deterministic random stream.  Samplers are hand-rolled on top of the raw
/// mt19937_64 output so sequences are identical across platforms and standard
/// libraries.  substream(seed, index) derives independent streams for
/// counter-based seeding (per iteration, per path).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        Rng r(0);
        r.engine_.seed(seq);
        return r;
    }

    /// Uniform on (0, 1).
    double uniform() {
        // 53-bit mantissa, shifted away from 0
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the polar method (deterministic, no library
    /// distribution objects).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fredholm
