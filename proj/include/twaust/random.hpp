#pragma once

#include <cstdint>
#include <random>

namespace twaust {

/// Seeded generator with a platform-independent uniform mapping, so reports
/// are byte-reproducible from the seed (std::uniform_real_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    std::uint64_t next() { return engine_(); }

    /// Independent child stream, e.g. one per worker or per trial batch.
    Rng split(std::uint64_t salt) { return Rng(engine_() ^ (salt * 0x9E3779B97F4A7C15ull)); }

private:
    std::mt19937_64 engine_;
};

} // namespace twaust
