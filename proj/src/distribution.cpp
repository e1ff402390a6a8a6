#include "sponge/distribution.hpp"

#include <cmath>
#include <numeric>

#include "sponge/error.hpp"

namespace sponge {

NestedDistribution::NestedDistribution(const SpongeSpec& spec, std::vector<double> weights)
    : p_(std::move(weights)) {
    if (p_.size() != spec.num_fibers()) {
        throw PreconditionError("distribution size does not match the spec's fiber count");
    }
    for (double w : p_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("distribution weights must be non-negative");
    }
    marginal_.assign(spec.m(), 0.0);
    for (std::size_t i = 0; i < spec.m(); ++i) {
        fiber_begin_.push_back(spec.fiber_begin(i));
        for (std::size_t f = spec.fiber_begin(i); f < spec.fiber_begin(i + 1); ++f) marginal_[i] += p_[f];
    }
    fiber_begin_.push_back(spec.num_fibers());
}

NestedDistribution NestedDistribution::from_weights(const SpongeSpec& spec, std::vector<double> weights) {
    NestedDistribution d(spec, std::move(weights));
    const double total = std::accumulate(d.p_.begin(), d.p_.end(), 0.0);
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw PreconditionError("distribution weights do not sum to 1");
    }
    return d;
}

NestedDistribution NestedDistribution::normalized(const SpongeSpec& spec, std::vector<double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw PreconditionError("distribution weights have no mass");
    for (double& w : weights) w /= total;
    return NestedDistribution(spec, std::move(weights));
}

NestedDistribution NestedDistribution::from_nested(const SpongeSpec& spec, const Nested2<double>& p_ij) {
    if (p_ij.size() != spec.m()) throw PreconditionError("nested distribution: wrong first-level length");
    std::vector<double> flat;
    for (std::size_t i = 0; i < spec.m(); ++i) {
        if (p_ij[i].size() != spec.m_i(i)) {
            throw PreconditionError("nested distribution: wrong second-level length");
        }
        flat.insert(flat.end(), p_ij[i].begin(), p_ij[i].end());
    }
    return from_weights(spec, std::move(flat));
}

NestedDistribution NestedDistribution::uniform(const SpongeSpec& spec) {
    return NestedDistribution(spec, std::vector<double>(spec.num_fibers(), 1.0 / spec.num_fibers()));
}

NestedDistribution NestedDistribution::concentrated(const SpongeSpec& spec, std::size_t i, std::size_t j) {
    std::vector<double> w(spec.num_fibers(), 0.0);
    w.at(spec.fiber_index(i, j)) = 1.0;
    return NestedDistribution(spec, std::move(w));
}

Nested2<double> NestedDistribution::nested(const SpongeSpec& spec) const {
    Nested2<double> out(spec.m());
    for (std::size_t i = 0; i < spec.m(); ++i) {
        out[i].assign(p_.begin() + spec.fiber_begin(i), p_.begin() + spec.fiber_begin(i + 1));
    }
    return out;
}

bool NestedDistribution::is_interior() const noexcept {
    for (double w : p_) {
        if (!(w > 0.0)) return false;
    }
    return true;
}

bool NestedDistribution::matches(const SpongeSpec& spec) const noexcept {
    if (p_.size() != spec.num_fibers() || marginal_.size() != spec.m()) return false;
    for (std::size_t i = 0; i <= spec.m(); ++i) {
        if (fiber_begin_[i] != (i < spec.m() ? spec.fiber_begin(i) : spec.num_fibers())) return false;
    }
    return true;
}

}  // namespace sponge
