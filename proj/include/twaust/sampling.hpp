#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "random.hpp"

namespace twaust {

/// Tensor grid over a base box and, for conormal checks, a fiber box.
/// With jitter on, interior grid nodes move by up to 40% of the spacing,
/// reproducibly from the seed.
struct SampleSpec {
    Box base_box;
    std::vector<std::size_t> base_counts;
    Box fiber_box;
    std::vector<std::size_t> fiber_counts;
    std::uint64_t seed = 0;
    bool jitter = false;

    /// Per-axis counts chosen so the grid has at least `points` nodes.
    static SampleSpec grid(Box base, std::size_t points, std::size_t fiber_dim = 0, std::size_t fiber_per_axis = 3) {
        SampleSpec s;
        s.base_box = std::move(base);
        const std::size_t k = s.base_box.dim();
        std::size_t per = 2;
        while (std::pow(static_cast<double>(per), static_cast<double>(k)) < static_cast<double>(points)) ++per;
        s.base_counts.assign(k, per);
        s.fiber_box = Box{std::vector<double>(fiber_dim, -1.0), std::vector<double>(fiber_dim, 1.0)};
        s.fiber_counts.assign(fiber_dim, fiber_per_axis);
        return s;
    }

    void validate(const Box& domain) const {
        base_box.validate("SampleSpec");
        if (!domain.contains(base_box)) throw InputError("SampleSpec: base box must lie inside the chart domain");
        if (base_counts.size() != base_box.dim()) throw InputError("SampleSpec: base_counts has wrong length");
        for (auto c : base_counts)
            if (c < 2) throw InputError("SampleSpec: need at least 2 points per axis");
        fiber_box.validate("SampleSpec");
        if (fiber_counts.size() != fiber_box.dim()) throw InputError("SampleSpec: fiber_counts has wrong length");
        for (auto c : fiber_counts)
            if (c < 2) throw InputError("SampleSpec: need at least 2 points per fiber axis");
    }

    std::vector<std::vector<double>> base_points() const { return tensor(base_box, base_counts, seed, jitter); }
    std::vector<std::vector<double>> fiber_points() const {
        if (fiber_box.dim() == 0) return {{}};
        return tensor(fiber_box, fiber_counts, seed ^ 0xF1BEull, false);
    }

private:
    static std::vector<std::vector<double>> tensor(const Box& box, const std::vector<std::size_t>& counts,
                                                   std::uint64_t seed, bool jitter) {
        const std::size_t d = box.dim();
        std::size_t total = 1;
        for (auto c : counts) total *= c;
        Rng rng(seed);
        std::vector<std::vector<double>> pts;
        pts.reserve(total);
        std::vector<std::size_t> idx(d, 0);
        for (std::size_t p = 0; p < total; ++p) {
            std::vector<double> u(d);
            for (std::size_t a = 0; a < d; ++a) {
                const double h = (box.hi[a] - box.lo[a]) / static_cast<double>(counts[a] - 1);
                u[a] = box.lo[a] + h * static_cast<double>(idx[a]);
                if (jitter && idx[a] > 0 && idx[a] + 1 < counts[a]) u[a] += 0.4 * h * rng.uniform(-1.0, 1.0);
            }
            pts.push_back(std::move(u));
            for (std::size_t a = d; a-- > 0;) {
                if (++idx[a] < counts[a]) break;
                idx[a] = 0;
            }
        }
        return pts;
    }
};

} // namespace twaust
