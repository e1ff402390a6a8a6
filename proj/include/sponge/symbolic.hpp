#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sponge/distribution.hpp"
#include "sponge/spec.hpp"

namespace sponge {

/// Finite word over the symbol set, stored as flat symbol indices.
class SymbolSequence {
public:
    /// Throws PreconditionError when a symbol is out of range for `spec`.
    SymbolSequence(const SpongeSpec& spec, std::vector<std::size_t> symbols);
    /// From 0-based (i, j, k) triples.
    static SymbolSequence from_triples(const SpongeSpec& spec,
                                       const std::vector<std::array<std::size_t, 3>>& triples);

    std::size_t size() const noexcept { return symbols_.size(); }
    std::size_t operator[](std::size_t l) const { return symbols_[l]; }
    const std::vector<std::size_t>& symbols() const noexcept { return symbols_; }

private:
    std::vector<std::size_t> symbols_;
};

/// Smallest n with (max c)^n <= min a, which guarantees L_n^1, L_n^2 >= 1
/// for every word.
std::size_t min_cube_order(const SpongeSpec& spec);

struct CuttingTimes {
    std::size_t L1 = 0;
    std::size_t L2 = 0;
};

/// L1 = max{k <= n : prod_{l<=n} c <= prod_{l<=k} b}, L2 likewise with a.
/// Requires min_cube_order(spec) <= n <= omega.size().
CuttingTimes cutting_times(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n);

/// Whether the unit increment bound L_{n+1}^k - L_n^k <= 1 is guaranteed:
/// it holds for k = 1 when min c >= max b, and for k = 2 when min c >= max a.
bool unit_increment_guaranteed(const SpongeSpec& spec, int k);

/// Tracks L_n^1, L_n^2 as n advances one symbol at a time. Every
/// `audit_interval` steps the cutting times are recomputed from scratch and
/// compared. Where the unit increment bound is guaranteed, a larger jump
/// throws NumericError.
class CuttingTimeTracker {
public:
    CuttingTimeTracker(const SpongeSpec& spec, const SymbolSequence& omega,
                       std::size_t audit_interval = 1000);

    /// Advances to n + 1; the word must be long enough.
    void advance();

    std::size_t n() const noexcept { return n_; }
    std::size_t L1() const noexcept { return L1_; }
    std::size_t L2() const noexcept { return L2_; }
    std::size_t last_increment(int k) const noexcept { return k == 1 ? inc1_ : inc2_; }
    std::size_t max_increment(int k) const noexcept { return k == 1 ? max_inc1_ : max_inc2_; }
    std::size_t audits() const noexcept { return audits_; }

    /// Prefix sums over the first l symbols (l <= n).
    double sum_log_c(std::size_t l) const { return sc_[l]; }
    double sum_log_b(std::size_t l) const { return sb_[l]; }
    double sum_log_a(std::size_t l) const { return sa_[l]; }

private:
    const SpongeSpec& spec_;
    const SymbolSequence& omega_;
    std::size_t audit_interval_;
    bool assert1_, assert2_;
    std::size_t n_ = 0, L1_ = 0, L2_ = 0;
    std::size_t inc1_ = 0, inc2_ = 0, max_inc1_ = 0, max_inc2_ = 0, audits_ = 0;
    std::vector<double> sc_{0.0}, sb_{0.0}, sa_{0.0};
};

/// B_n(omega): positions l <= L2 fix (i,j,k), L2 < l <= L1 fix (i,j),
/// L1 < l <= n fix i.
struct ApproximateCubeView {
    std::size_t n = 0;
    std::size_t L1 = 0;
    std::size_t L2 = 0;
    std::array<double, 3> log_edges{};  // x, y, z: sum log a (l<=L2), sum log b (l<=L1), sum log c (l<=n)
    std::array<double, 3> edges{};

    /// log of edge / prod_{l<=n} c for the x and y edges; both lie in
    /// [0, log(1/min a)].
    double log_edge_ratio(int axis) const { return log_edges[axis] - log_edges[2]; }
};

ApproximateCubeView approximate_cube(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n);

/// Slack used for the edge-ratio bound and for ties in the cutting times.
double cube_log_slack(const ApproximateCubeView& cube);

bool edge_ratio_bound_holds(const SpongeSpec& spec, const ApproximateCubeView& cube);

/// Probability of symbol s under the Bernoulli measure p_ij a_ijk^t / sum_k a_ijk^t.
std::vector<double> symbol_probabilities(const SpongeSpec& spec, const NestedDistribution& p, double t);

/// log of the Bernoulli measure of B_n(omega).
double cube_measure(const SpongeSpec& spec, const NestedDistribution& p, double t,
                    const SymbolSequence& omega, std::size_t n);

/// I.i.d. word from symbol_probabilities(spec, p, t).
SymbolSequence sample_word(const SpongeSpec& spec, const NestedDistribution& p, double t,
                           std::size_t length, std::uint64_t seed);

struct ChiPoint {
    std::array<double, 3> point{};   // center of R_{omega(n)}
    std::array<double, 3> corner{};  // lower corner
    std::array<double, 3> edges{};   // half of each is the distance bound to chi(omega)
};

/// Composes the first n maps of omega applied to the unit cube.
ChiPoint chi_point(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n);

struct TraceRow {
    std::size_t n = 0;
    std::size_t L1 = 0;
    std::size_t L2 = 0;
    double d_pn = 0;
    double beta_n = 0;  // sum_{l<=L1} log b / sum_{l<=n} log c
    double eta_n = 0;   // sum_{l<=L2} log a / sum_{l<=n} log c
};

/// d_{p,n}(omega) = log mu(B_n(omega)) / sum_{l<=n} log c for
/// n = min_cube_order, ..., n_max, keeping every `stride`-th row and the last.
std::vector<TraceRow> pointwise_dimension_trace(const SpongeSpec& spec, const NestedDistribution& p,
                                                double t, const SymbolSequence& omega,
                                                std::size_t n_max, std::size_t stride = 1);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace sponge
