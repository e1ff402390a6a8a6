#include "sponge/hypothesis.hpp"

#include <algorithm>
#include <cmath>

#include "sponge/error.hpp"

namespace sponge {

namespace {

struct Pair {
    std::size_t i, f, g;  // fibers f < g under the same i
};

struct Scan {
    const SpongeSpec& spec;
    const std::vector<Pair>& pairs;

    double diff(const Pair& pr, double t) const {
        return fiber_sum(spec, pr.f, t) - fiber_sum(spec, pr.g, t);
    }

    // Largest sibling difference at t and the pair attaining it.
    std::pair<double, std::size_t> max_diff(double t) const {
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            const double d = std::abs(diff(pairs[n], t));
            if (d > best) {
                best = d;
                arg = n;
            }
        }
        return {best, arg};
    }
};

}  // namespace

double fiber_sum(const SpongeSpec& spec, std::size_t fiber, double t) {
    const auto& fi = spec.fiber(fiber);
    double s = 0.0;
    for (std::size_t k = 0; k < fi.count; ++k) s += std::exp(t * spec.symbol_log_a(fi.first_symbol + k));
    return s;
}

HypothesisReport check_generic_hypothesis(const SpongeSpec& spec, int grid_points, double t_min,
                                          double t_max) {
    if (grid_points < 2) throw PreconditionError("check_generic_hypothesis: grid_points must be >= 2");
    if (!(t_min <= t_max)) throw PreconditionError("check_generic_hypothesis: empty t range");

    HypothesisReport rep;
    rep.grid_points = grid_points;
    rep.t_min = t_min;
    rep.t_max = t_max;

    std::vector<Pair> all_pairs, distinct;
    for (std::size_t i = 0; i < spec.m(); ++i) {
        for (std::size_t j = 0; j < spec.m_i(i); ++j) {
            for (std::size_t jp = j + 1; jp < spec.m_i(i); ++jp) {
                Pair pr{i, spec.fiber_index(i, j), spec.fiber_index(i, jp)};
                all_pairs.push_back(pr);
                auto x = spec.levels().a[i][j];
                auto y = spec.levels().a[i][jp];
                std::sort(x.begin(), x.end());
                std::sort(y.begin(), y.end());
                if (x != y) distinct.push_back(pr);
            }
        }
    }
    if (all_pairs.empty()) {
        rep.reason = "no pair";
        rep.violating_t = t_min;
        return rep;
    }
    if (distinct.empty()) {
        rep.reason = "identical fibers";
        rep.violating_t = t_min;
        return rep;
    }

    const Scan scan{spec, distinct};
    auto fail = [&](double t) {
        rep.holds = false;
        rep.reason = "coincidence";
        rep.violating_t = t;
        rep.witnesses.clear();
        return rep;
    };

    std::vector<double> grid(grid_points), gmax(grid_points);
    for (int g = 0; g < grid_points; ++g) {
        const double t = t_min + (t_max - t_min) * g / (grid_points - 1);
        grid[g] = t;
        const auto [d, arg] = scan.max_diff(t);
        gmax[g] = d;
        if (d <= kHypothesisTolerance) return fail(t);
        const auto& pr = distinct[arg];
        const auto& fa = spec.fiber(pr.f);
        const auto& fb = spec.fiber(pr.g);
        rep.witnesses.push_back({t, pr.i + 1, fa.j + 1, fb.j + 1, scan.diff(pr, t)});
    }

    // A common zero of all sibling differences is a zero of each one, so it
    // is enough to bisect every sign change of every distinct pair.
    for (const auto& pr : distinct) {
        for (int g = 0; g + 1 < grid_points; ++g) {
            double lo = grid[g], hi = grid[g + 1];
            double dlo = scan.diff(pr, lo);
            if (dlo * scan.diff(pr, hi) >= 0.0) continue;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                const double dm = scan.diff(pr, mid);
                if ((dm < 0) == (dlo < 0)) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            if (scan.max_diff(root).first <= kHypothesisTolerance) return fail(root);
        }
    }

    // Touching zeros do not change sign: refine local minima of the envelope.
    for (int g = 1; g + 1 < grid_points; ++g) {
        if (!(gmax[g] <= gmax[g - 1] && gmax[g] <= gmax[g + 1] && gmax[g] < 1e-3)) continue;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = grid[g - 1], hi = grid[g + 1];
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = scan.max_diff(x1).first, f2 = scan.max_diff(x2).first;
        for (int it = 0; it < 120; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = scan.max_diff(x1).first;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = scan.max_diff(x2).first;
            }
        }
        const double t = f1 < f2 ? x1 : x2;
        if (std::min(f1, f2) <= kHypothesisTolerance) return fail(t);
    }

    rep.holds = true;
    rep.reason = "ok";
    return rep;
}

}  // namespace sponge
