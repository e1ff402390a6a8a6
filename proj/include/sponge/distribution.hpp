#pragma once

#include <span>
#include <vector>

#include "sponge/spec.hpp"

namespace sponge {

inline constexpr double kNormalizationTolerance = 1e-12;

/// Probability vector p_ij over the fibers of a sponge, stored in the spec's
/// flat fiber order, together with the induced marginals p_i.
class NestedDistribution {
public:
    NestedDistribution() = default;

    /// Weights must be non-negative and sum to 1 within kNormalizationTolerance.
    static NestedDistribution from_weights(const SpongeSpec& spec, std::vector<double> weights);
    /// Rescales non-negative weights with positive total.
    static NestedDistribution normalized(const SpongeSpec& spec, std::vector<double> weights);
    static NestedDistribution from_nested(const SpongeSpec& spec, const Nested2<double>& p_ij);
    static NestedDistribution uniform(const SpongeSpec& spec);
    /// All mass on fiber (i,j), 0-based.
    static NestedDistribution concentrated(const SpongeSpec& spec, std::size_t i, std::size_t j);

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t fiber) const { return p_[fiber]; }
    double p_ij(const SpongeSpec& spec, std::size_t i, std::size_t j) const {
        return p_[spec.fiber_index(i, j)];
    }
    double p_i(std::size_t i) const { return marginal_[i]; }

    std::span<const double> weights() const noexcept { return p_; }
    std::span<const double> marginals() const noexcept { return marginal_; }
    Nested2<double> nested(const SpongeSpec& spec) const;

    /// Every p_ij > 0 (membership in the open simplex).
    bool is_interior() const noexcept;
    bool matches(const SpongeSpec& spec) const noexcept;

private:
    NestedDistribution(const SpongeSpec& spec, std::vector<double> weights);

    std::vector<double> p_;
    std::vector<double> marginal_;
    std::vector<std::size_t> fiber_begin_;
};

}  // namespace sponge
