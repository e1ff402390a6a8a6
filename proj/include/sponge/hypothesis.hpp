#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sponge/spec.hpp"

namespace sponge {

/// Fiber sums are considered distinct when they differ by more than this.
inline constexpr double kHypothesisTolerance = 1e-12;

struct HypothesisWitness {
    double t = 0;
    std::size_t i = 0;  // 1-based
    std::size_t j = 0;  // 1-based, j < j_prime
    std::size_t j_prime = 0;
    double difference = 0;  // sum_k a_ijk^t - sum_k a_ij'k^t
};

/// Outcome of the numeric scan for the generic hypothesis: for every t some
/// pair of sibling fibers has distinct sums of a_ijk^t.
struct HypothesisReport {
    bool holds = false;
    std::string reason;                    // "ok", "no pair", "identical fibers", "coincidence"
    std::optional<double> violating_t;
    std::vector<HypothesisWitness> witnesses;  // one per grid point while the scan holds
    int grid_points = 0;
    double tolerance = kHypothesisTolerance;
    std::string evidence = "numeric evidence";
    double t_min = 0.0;  // scanned range
    double t_max = 1.0;
};

/// Scans t over a uniform grid of `grid_points` points covering [t_min, t_max]
/// (endpoints included) and bisects every sign change of each sibling
/// difference to look for common zeros between grid points.
HypothesisReport check_generic_hypothesis(const SpongeSpec& spec, int grid_points,
                                          double t_min = 0.0, double t_max = 1.0);

/// sum_k a_ijk^t for fiber f.
double fiber_sum(const SpongeSpec& spec, std::size_t fiber, double t);

}  // namespace sponge
