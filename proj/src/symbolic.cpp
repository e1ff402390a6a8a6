#include "sponge/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sponge/error.hpp"
#include "sponge/random.hpp"

namespace sponge {

namespace {

// Relative slack for comparing prefix sums of logs: ties such as
// n log(1/2) = 2k log(1/2) must count as attained despite rounding.
double tie_slack(double sum_log_c) { return 1e-12 * std::max(1.0, std::abs(sum_log_c)); }

struct PrefixSums {
    std::vector<double> c{0.0}, b{0.0}, a{0.0};

    PrefixSums(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n) {
        c.reserve(n + 1);
        b.reserve(n + 1);
        a.reserve(n + 1);
        for (std::size_t l = 0; l < n; ++l) {
            const auto& s = spec.symbol(omega[l]);
            c.push_back(c.back() + spec.log_c(s.i));
            b.push_back(b.back() + spec.fiber_log_b(s.fiber));
            a.push_back(a.back() + spec.symbol_log_a(omega[l]));
        }
    }
};

// Largest k <= n with sums[k] >= threshold; sums is strictly decreasing.
std::size_t last_at_least(const std::vector<double>& sums, std::size_t n, double threshold) {
    const auto begin = sums.begin(), end = sums.begin() + static_cast<std::ptrdiff_t>(n) + 1;
    const auto it = std::partition_point(begin, end, [&](double v) { return v >= threshold; });
    return static_cast<std::size_t>(it - begin) - 1;
}

void check_order(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n) {
    if (n > omega.size()) throw PreconditionError("n exceeds the word length");
    const std::size_t floor = min_cube_order(spec);
    if (n < floor) {
        throw PreconditionError("n = " + std::to_string(n) + " is below the minimum order " +
                                std::to_string(floor) + " at which both cutting times are at least 1");
    }
}

}  // namespace

SymbolSequence::SymbolSequence(const SpongeSpec& spec, std::vector<std::size_t> symbols)
    : symbols_(std::move(symbols)) {
    for (std::size_t s : symbols_) {
        if (s >= spec.num_symbols()) throw PreconditionError("symbol index out of range");
    }
}

SymbolSequence SymbolSequence::from_triples(const SpongeSpec& spec,
                                            const std::vector<std::array<std::size_t, 3>>& triples) {
    std::vector<std::size_t> flat;
    flat.reserve(triples.size());
    for (const auto& [i, j, k] : triples) {
        if (i >= spec.m() || j >= spec.m_i(i) || k >= spec.m_ij(i, j)) {
            throw PreconditionError("symbol (i,j,k) out of range");
        }
        flat.push_back(spec.symbol_index(i, j, k));
    }
    return SymbolSequence(spec, std::move(flat));
}

std::size_t min_cube_order(const SpongeSpec& spec) {
    const double ratio = std::log(spec.min_a()) / std::log(spec.max_c());
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
}

CuttingTimes cutting_times(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n) {
    check_order(spec, omega, n);
    const PrefixSums sums(spec, omega, n);
    const double threshold = sums.c[n] - tie_slack(sums.c[n]);
    CuttingTimes out{last_at_least(sums.b, n, threshold), last_at_least(sums.a, n, threshold)};
    if (out.L1 < 1 || out.L2 < 1) throw NumericError("cutting time below 1 above the minimum order");
    return out;
}

bool unit_increment_guaranteed(const SpongeSpec& spec, int k) {
    return spec.min_c() >= (k == 1 ? spec.max_b() : spec.max_a());
}

CuttingTimeTracker::CuttingTimeTracker(const SpongeSpec& spec, const SymbolSequence& omega,
                                       std::size_t audit_interval)
    : spec_(spec),
      omega_(omega),
      audit_interval_(audit_interval),
      assert1_(unit_increment_guaranteed(spec, 1)),
      assert2_(unit_increment_guaranteed(spec, 2)) {
    sc_.reserve(omega.size() + 1);
    sb_.reserve(omega.size() + 1);
    sa_.reserve(omega.size() + 1);
}

void CuttingTimeTracker::advance() {
    if (n_ >= omega_.size()) throw PreconditionError("tracker advanced past the end of the word");
    const std::size_t s = omega_[n_];
    const auto& sym = spec_.symbol(s);
    sc_.push_back(sc_.back() + spec_.log_c(sym.i));
    sb_.push_back(sb_.back() + spec_.fiber_log_b(sym.fiber));
    sa_.push_back(sa_.back() + spec_.symbol_log_a(s));
    ++n_;

    const double threshold = sc_[n_] - tie_slack(sc_[n_]);
    const std::size_t old1 = L1_, old2 = L2_;
    // The prefix sums of log b and log a are only known up to n, and the
    // cutting times never decrease, so a forward scan suffices.
    while (L1_ < n_ && sb_[L1_ + 1] >= threshold) ++L1_;
    while (L2_ < n_ && sa_[L2_ + 1] >= threshold) ++L2_;
    inc1_ = L1_ - old1;
    inc2_ = L2_ - old2;
    max_inc1_ = std::max(max_inc1_, inc1_);
    max_inc2_ = std::max(max_inc2_, inc2_);
    if ((assert1_ && inc1_ > 1) || (assert2_ && inc2_ > 1)) {
        throw NumericError("cutting time increased by more than 1 at n = " + std::to_string(n_));
    }

    if (audit_interval_ > 0 && n_ % audit_interval_ == 0) {
        ++audits_;
        if (last_at_least(sb_, n_, threshold) != L1_ || last_at_least(sa_, n_, threshold) != L2_) {
            throw NumericError("incremental cutting times disagree with a full rescan at n = " +
                               std::to_string(n_));
        }
    }
}

ApproximateCubeView approximate_cube(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n) {
    const auto ct = cutting_times(spec, omega, n);
    const PrefixSums sums(spec, omega, n);
    ApproximateCubeView v;
    v.n = n;
    v.L1 = ct.L1;
    v.L2 = ct.L2;
    v.log_edges = {sums.a[ct.L2], sums.b[ct.L1], sums.c[n]};
    for (int q = 0; q < 3; ++q) v.edges[q] = std::exp(v.log_edges[q]);
    return v;
}

double cube_log_slack(const ApproximateCubeView& cube) { return tie_slack(cube.log_edges[2]); }

bool edge_ratio_bound_holds(const SpongeSpec& spec, const ApproximateCubeView& cube) {
    const double slack = cube_log_slack(cube);
    const double upper = -std::log(spec.min_a());
    for (int axis = 0; axis < 2; ++axis) {
        const double r = cube.log_edge_ratio(axis);
        if (r < -slack || r > upper + slack) return false;
    }
    return cube.L2 <= cube.L1 && cube.L1 <= cube.n;
}

std::vector<double> symbol_probabilities(const SpongeSpec& spec, const NestedDistribution& p, double t) {
    if (!p.matches(spec)) throw PreconditionError("distribution shape does not match the spec");
    std::vector<double> q(spec.num_symbols());
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        const auto& fi = spec.fiber(f);
        double s = 0.0;
        for (std::size_t k = 0; k < fi.count; ++k) s += std::exp(t * spec.symbol_log_a(fi.first_symbol + k));
        for (std::size_t k = 0; k < fi.count; ++k) {
            q[fi.first_symbol + k] = p[f] * std::exp(t * spec.symbol_log_a(fi.first_symbol + k)) / s;
        }
    }
    return q;
}

double cube_measure(const SpongeSpec& spec, const NestedDistribution& p, double t, const SymbolSequence& omega,
                    std::size_t n) {
    if (!p.matches(spec)) throw PreconditionError("distribution shape does not match the spec");
    const auto ct = cutting_times(spec, omega, n);
    double out = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const auto& s = spec.symbol(omega[l]);
        const double w = l < ct.L1 ? p[s.fiber] : p.p_i(s.i);
        if (!(w > 0.0)) throw PreconditionError("zero-probability symbol at position " + std::to_string(l + 1));
        out += std::log(w);
        if (l < ct.L2) {
            const auto& fi = spec.fiber(s.fiber);
            double sum = 0.0;
            for (std::size_t k = 0; k < fi.count; ++k) sum += std::exp(t * spec.symbol_log_a(fi.first_symbol + k));
            out += t * spec.symbol_log_a(omega[l]) - std::log(sum);
        }
    }
    return out;
}

SymbolSequence sample_word(const SpongeSpec& spec, const NestedDistribution& p, double t, std::size_t length,
                           std::uint64_t seed) {
    const auto q = symbol_probabilities(spec, p, t);
    const CategoricalSampler sampler(q);
    Rng rng(seed);
    std::vector<std::size_t> word(length);
    for (auto& s : word) s = sampler(rng);
    return SymbolSequence(spec, std::move(word));
}

ChiPoint chi_point(const SpongeSpec& spec, const SymbolSequence& omega, std::size_t n) {
    if (n > omega.size()) throw PreconditionError("n exceeds the word length");
    ChiPoint out;
    out.edges = {1.0, 1.0, 1.0};
    for (std::size_t l = 0; l < n; ++l) {
        const auto& s = spec.symbol(omega[l]);
        const std::array<double, 3> u{spec.u_a(s.i, s.j, s.k), spec.u_b(s.i, s.j), spec.u_c(s.i)};
        const std::array<double, 3> r{spec.a(s.i, s.j, s.k), spec.b(s.i, s.j), spec.c(s.i)};
        for (int q = 0; q < 3; ++q) {
            out.corner[q] += out.edges[q] * u[q];
            out.edges[q] *= r[q];
        }
    }
    for (int q = 0; q < 3; ++q) out.point[q] = out.corner[q] + 0.5 * out.edges[q];
    return out;
}

std::vector<TraceRow> pointwise_dimension_trace(const SpongeSpec& spec, const NestedDistribution& p, double t,
                                                const SymbolSequence& omega, std::size_t n_max,
                                                std::size_t stride) {
    if (!p.matches(spec)) throw PreconditionError("distribution shape does not match the spec");
    const std::size_t n0 = min_cube_order(spec);
    check_order(spec, omega, n_max);
    if (stride == 0) throw PreconditionError("stride must be positive");

    std::vector<double> log_S(spec.num_fibers());
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        const auto& fi = spec.fiber(f);
        double sum = 0.0;
        for (std::size_t k = 0; k < fi.count; ++k) sum += std::exp(t * spec.symbol_log_a(fi.first_symbol + k));
        log_S[f] = std::log(sum);
    }

    // Prefix sums of the three measure factors.
    std::vector<double> pij{0.0}, pi{0.0}, sym{0.0};
    pij.reserve(n_max + 1);
    pi.reserve(n_max + 1);
    sym.reserve(n_max + 1);

    CuttingTimeTracker tracker(spec, omega);
    std::vector<TraceRow> rows;
    for (std::size_t n = 1; n <= n_max; ++n) {
        tracker.advance();
        const std::size_t s = omega[n - 1];
        const auto& info = spec.symbol(s);
        const double w_ij = p[info.fiber], w_i = p.p_i(info.i);
        pij.push_back(pij.back() + (w_ij > 0.0 ? std::log(w_ij) : -INFINITY));
        pi.push_back(pi.back() + (w_i > 0.0 ? std::log(w_i) : -INFINITY));
        sym.push_back(sym.back() + t * spec.symbol_log_a(s) - log_S[info.fiber]);
        if (n < n0 || ((n - n0) % stride != 0 && n != n_max)) continue;

        const std::size_t L1 = tracker.L1(), L2 = tracker.L2();
        const double log_mu = pij[L1] + (pi[n] - pi[L1]) + sym[L2];
        if (!std::isfinite(log_mu)) throw PreconditionError("zero-probability symbol in the word");
        const double denom = tracker.sum_log_c(n);
        rows.push_back({n, L1, L2, log_mu / denom, tracker.sum_log_b(L1) / denom, tracker.sum_log_a(L2) / denom});
    }
    return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    const auto old_precision = out.precision(17);
    out << "n,L1,L2,d_pn,beta_n,eta_n\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.L1 << ',' << r.L2 << ',' << r.d_pn << ',' << r.beta_n << ',' << r.eta_n << '\n';
    }
    out.precision(old_precision);
}

}  // namespace sponge
