#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sponge/error.hpp"

namespace sponge {

struct RootResult {
    double x = 0;
    double residual = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Finds a root of a strictly increasing function inside [lo, hi] with
/// f(lo) <= 0 <= f(hi). Illinois false position, with a bisection step
/// whenever an iteration fails to halve the bracket. Stops when |f| <= tol
/// or the bracket collapses to adjacent doubles.
template <class F>
RootResult solve_increasing(F&& f, double lo, double hi, double f_lo, double f_hi, double tol) {
    RootResult r;
    auto keep_best = [&](double x, double fx) {
        if (r.evaluations == 0 || std::abs(fx) < std::abs(r.residual)) {
            r.x = x;
            r.residual = fx;
        }
    };
    keep_best(lo, f_lo);
    keep_best(hi, f_hi);
    if (std::abs(r.residual) <= tol) {
        r.converged = true;
        return r;
    }
    int side = 0;
    double width = hi - lo;
    for (int it = 0; it < 400; ++it) {
        double x = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        if (!(x > lo && x < hi) || (it % 3 == 2 && hi - lo > 0.5 * width)) {
            x = 0.5 * (lo + hi);
        }
        if (it % 3 == 2) width = hi - lo;
        if (x <= lo || x >= hi) break;  // bracket exhausted
        const double fx = f(x);
        ++r.evaluations;
        keep_best(x, fx);
        if (std::abs(fx) <= tol) {
            r.converged = true;
            return r;
        }
        if (fx < 0) {
            lo = x;
            f_lo = fx;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if (side == 1) f_lo *= 0.5;
            side = 1;
        }
    }
    r.converged = std::abs(r.residual) <= tol;
    return r;
}

/// Brackets the root of a strictly increasing function by expanding
/// [center - w, center + w] with w = 1, 2, 4, ... while |endpoint| <= cap,
/// then solves inside. Throws BracketNotFound when no sign change appears.
template <class F>
RootResult solve_increasing_expanding(F&& f, double center, double tol, double cap,
                                      const std::string& what) {
    double w = 1.0;
    double lo = center - w, hi = center + w;
    double f_lo = f(lo), f_hi = f(hi);
    int evals = 2;
    while (!(f_lo <= 0.0 && f_hi >= 0.0)) {
        if (f_lo > 0.0 && f_hi < 0.0) throw NumericError(what + ": function is not increasing");
        w *= 2.0;
        if (f_hi < 0.0) {
            lo = hi;
            f_lo = f_hi;
            hi = center + w;
            if (std::abs(hi) > cap) throw BracketNotFound(what + ": no sign change up to the bracket cap");
            f_hi = f(hi);
        } else {
            hi = lo;
            f_hi = f_lo;
            lo = center - w;
            if (std::abs(lo) > cap) throw BracketNotFound(what + ": no sign change down to the bracket cap");
            f_lo = f(lo);
        }
        ++evals;
    }
    auto r = solve_increasing(f, lo, hi, f_lo, f_hi, tol);
    r.evaluations += evals;
    return r;
}

}  // namespace sponge
