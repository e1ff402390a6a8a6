#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sponge {

/// Seeded generator with portable derived distributions: the standard
/// library's distribution objects are implementation-defined, so sampling is
/// built on the raw 64-bit engine output only.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform()); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a fixed probability table.
class CategoricalSampler {
public:
    explicit CategoricalSampler(std::span<const double> weights) : cdf_(weights.size()) {
        double acc = 0.0;
        for (std::size_t n = 0; n < weights.size(); ++n) cdf_[n] = acc += weights[n];
        for (double& v : cdf_) v /= acc;
        if (!cdf_.empty()) cdf_.back() = 1.0;
    }

    std::size_t operator()(Rng& rng) const {
        const double u = rng.uniform();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        // First entry whose cdf reaches u; zero-weight entries are never selected.
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
    }

private:
    std::vector<double> cdf_;
};

}  // namespace sponge
