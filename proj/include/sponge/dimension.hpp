#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sponge/distribution.hpp"
#include "sponge/hypothesis.hpp"
#include "sponge/spec.hpp"

namespace sponge {

struct LambdaComponents {
    double lambda1 = 0;
    double lambda2 = 0;
    double total() const noexcept { return lambda1 + lambda2; }
};

/// lambda1 = sum p_i log p_i / sum p_i log c_i and
/// lambda2 = (sum p_ij log p_ij - sum p_i log p_i) / sum p_ij log b_ij,
/// with 0 log 0 = 0.
LambdaComponents lambda_components(const SpongeSpec& spec, const NestedDistribution& p);

/// The residual sum_ij p_ij log(sum_k a_ijk^t), strictly decreasing in t.
double t_residual(const SpongeSpec& spec, const NestedDistribution& p, double t);

/// Unique t in [0,1] with |t_residual| <= tol, by bisection. tol = 0 bisects
/// until the bracket collapses to adjacent doubles.
double t_of_p(const SpongeSpec& spec, const NestedDistribution& p, double tol = 1e-12);

/// lambda1 + lambda2 + t(p).
double objective(const SpongeSpec& spec, const NestedDistribution& p, double t_tol = 0.0);

/// Analytic gradient of the objective with respect to p_ij (flat fiber
/// order). Requires an interior p.
std::vector<double> objective_gradient(const SpongeSpec& spec, const NestedDistribution& p);

struct OptimizerConfig {
    int restarts = 16;               // random starts in addition to the uniform one
    std::uint64_t seed = 42;
    double t_tol = 1e-12;            // reported residual tolerance for t(p)
    double stationarity_tol = 1e-9;  // projected-gradient norm
    double floor = 1e-12;            // iterates satisfy p_ij >= floor
    int max_iterations = 3000;       // per ascent
    std::size_t face_recursion_limit = 12;  // evaluate faces when |J| <= this
    bool family_sweep = true;
    int family_sweep_points = 24;
    int hypothesis_grid = 101;
    int threads = 1;
};

struct OptimizerDiagnostics {
    int restarts = 0;          // ascents actually run on the full simplex
    int face_ascents = 0;      // ascents run on boundary faces
    int iterations = 0;        // iterations of the winning ascent
    int total_iterations = 0;
    double final_step = 0;
    double stationarity = 0;   // projected-gradient norm at p*
    bool converged = false;
    bool exact_by_symmetry = false;
    std::string best_source;   // uniform, random:<n>, face:<i>,<j>, family:t=<t>
    bool family_sweep_run = false;
    int family_points = 0;
    double family_best = 0;
};

struct OracleComparison {
    int depth = 0;
    double slope = 0;
    double band_low = 0;
    double band_high = 0;
    double formula = 0;
    double tolerance = 0;
    bool agrees = false;        // slope >= formula - tolerance
    bool flagged_above = false; // slope > formula + tolerance (box dimension may exceed)
    std::string caveat;
};

struct DimensionReport {
    NestedDistribution p_star;
    double lambda1 = 0;
    double lambda2 = 0;
    double lambda_total = 0;
    double t_star = 0;
    double dimension = 0;
    OptimizerDiagnostics diagnostics;
    HypothesisReport hypothesis;
    std::vector<std::string> warnings;
    OptimizerConfig config;
    std::optional<OracleComparison> oracle;
};

/// Local projected ascent from `start`; exposed for testing the optimizer.
struct AscentResult {
    NestedDistribution p;
    double value = 0;
    double stationarity = 0;
    double final_step = 0;
    int iterations = 0;
    bool converged = false;
};
AscentResult projected_ascent(const SpongeSpec& spec, const NestedDistribution& start,
                              const OptimizerConfig& config);

/// Projected-gradient norm used as the stationarity measure: deviation of
/// the gradient from its mean over the free coordinates, counting floor
/// coordinates only when the gradient pushes them inward.
double projected_gradient_norm(const NestedDistribution& p, const std::vector<double>& gradient,
                               double floor);

/// Multi-start maximization of the objective over the simplex.
DimensionReport maximize(const SpongeSpec& spec, const OptimizerConfig& config = {});

}  // namespace sponge
