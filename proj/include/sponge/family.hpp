#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sponge/distribution.hpp"
#include "sponge/spec.hpp"

namespace sponge {

/// Moran roots of the individual fibers: sum_k a_ijk^{t_ij} = 1.
struct FiberRoots {
    std::vector<double> t_ij;  // flat fiber order
    double t_lower = 0;
    double t_upper = 0;
    std::vector<std::vector<double>> log_a;  // per fiber, for the evaluators

    /// max over fibers of sum_k a_ijk^t.
    double A(double t) const;
    /// min over fibers of sum_k a_ijk^t.
    double B(double t) const;
    bool degenerate() const noexcept { return !(t_lower < t_upper); }
};

FiberRoots fiber_roots(const SpongeSpec& spec);

struct FamilyTolerances {
    double alpha = 1e-12;    // |F|
    double lambda1 = 1e-10;  // |log C|
    double lambda2 = 1e-10;  // |sum_i p_i log gamma_i|
    double bracket_cap = 1e6;
};

/// Unnormalized family member evaluated in log space:
///   p_ij = C c_i^l1 b_ij^l2 S_ij^alpha gamma_i^(rho-1),
///   gamma_i = sum_j b_ij^l2 S_ij^alpha,  C = (sum_i c_i^l1 gamma_i^rho)^-1,
/// with S_ij = sum_k a_ijk^t.
struct FamilyPoint {
    std::vector<double> p;          // flat fiber order, sums to 1
    std::vector<double> log_gamma;  // per i
    double log_C = 0;
    double F = 0;                   // sum_ij p_ij log S_ij
    double gamma_equation = 0;      // sum_i p_i log gamma_i
};
FamilyPoint family_point(const SpongeSpec& spec, double alpha, double lambda1, double lambda2,
                         double t, double rho);

/// F(alpha, lambda1, lambda2, t, rho) = sum_ij p_ij log S_ij(t).
double family_F(const SpongeSpec& spec, double alpha, double lambda1, double lambda2, double t,
                double rho);

/// Optional starting centers for the bracket expansions (warm starts).
struct FamilyHints {
    std::optional<double> alpha;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
};

/// alpha with |F| <= tol; F is strictly increasing in alpha.
double solve_alpha(const SpongeSpec& spec, double lambda1, double lambda2, double t, double rho,
                   double tol = 1e-12, std::optional<double> hint = std::nullopt);

struct Lambda1Solution {
    double lambda1 = 0;
    double alpha = 0;
    double log_C = 0;
};
/// lambda1 with |log C(alpha(lambda1), lambda1)| <= tol, re-solving alpha at
/// every trial lambda1.
Lambda1Solution solve_lambda1(const SpongeSpec& spec, double lambda2, double t, double rho,
                              const FamilyTolerances& tol = {}, const FamilyHints& hints = {});

struct FamilyResiduals {
    double normalization = 0;   // sum p_ij - 1
    double log_C = 0;
    double gamma_equation = 0;  // sum_i p_i log gamma_i
    double F = 0;
    double t_gap = 0;           // t(p) - t
};

struct FamilySolution {
    double t = 0;
    double rho = 0;
    double alpha = 0;
    double lambda1 = 0;
    double lambda2 = 0;
    std::vector<double> gamma;  // per i
    double C = 0;
    NestedDistribution p;
    FamilyResiduals residuals;
};

/// Full nested solve: lambda2 outer, lambda1 middle, alpha inner.
FamilySolution solve_lambda2(const SpongeSpec& spec, double t, double rho,
                             const FamilyTolerances& tol = {}, const FamilyHints& hints = {});

struct CurvePoint {
    double t = 0;
    std::optional<FamilySolution> solution;
    std::string error;  // set when the solve failed
};

/// Solutions along `t_grid` at fixed rho, warm-starting each from the
/// previous converged point. Every grid point must lie in (t_lower, t_upper).
std::vector<CurvePoint> family_curve(const SpongeSpec& spec, double rho,
                                     const std::vector<double>& t_grid,
                                     const FamilyTolerances& tol = {});

struct CurveMaximum {
    FamilySolution solution;
    double objective = 0;
    int evaluations = 0;  // family solves, grid included
};

/// Maximizes the objective along the curve at fixed rho: a scan of
/// interior_t_grid(roots, grid_points), then golden-section search between
/// the neighbours of the best grid point until the t-interval is below t_tol.
/// Throws NumericError when no grid point converges.
CurveMaximum family_curve_maximum(const SpongeSpec& spec, double rho, int grid_points,
                                  double t_tol = 1e-9, const FamilyTolerances& tol = {});

/// Uniform interior grid t_lower + (n + 1/2) (t_upper - t_lower) / count.
std::vector<double> interior_t_grid(const FiberRoots& roots, int count);

}  // namespace sponge
