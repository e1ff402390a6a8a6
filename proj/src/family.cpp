#include "sponge/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sponge/dimension.hpp"
#include "sponge/error.hpp"
#include "sponge/root_finding.hpp"

namespace sponge {

namespace {

double log_sum_exp(const double* v, std::size_t n) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < n; ++q) hi = std::max(hi, v[q]);
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (std::size_t q = 0; q < n; ++q) s += std::exp(v[q] - hi);
    return hi + std::log(s);
}

// log S_ij(t) for every fiber.
std::vector<double> log_fiber_sums(const SpongeSpec& spec, double t) {
    std::vector<double> out(spec.num_fibers());
    std::vector<double> buf;
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        const auto& fi = spec.fiber(f);
        buf.resize(fi.count);
        for (std::size_t k = 0; k < fi.count; ++k) buf[k] = t * spec.symbol_log_a(fi.first_symbol + k);
        out[f] = log_sum_exp(buf.data(), buf.size());
    }
    return out;
}

// Evaluates family members at a fixed t without reallocating.
class Evaluator {
public:
    Evaluator(const SpongeSpec& spec, double t, double rho)
        : spec_(spec), rho_(rho), log_S_(log_fiber_sums(spec, t)),
          log_w_(spec.num_fibers()), log_gamma_(spec.m()), outer_(spec.m()) {}

    const std::vector<double>& log_S() const { return log_S_; }

    // Fills log_w_, log_gamma_ and returns log C.
    double prepare(double alpha, double lambda1, double lambda2) {
        for (std::size_t f = 0; f < spec_.num_fibers(); ++f) {
            log_w_[f] = lambda2 * spec_.fiber_log_b(f) + alpha * log_S_[f];
        }
        for (std::size_t i = 0; i < spec_.m(); ++i) {
            const std::size_t f0 = spec_.fiber_begin(i), f1 = spec_.fiber_begin(i + 1);
            log_gamma_[i] = log_sum_exp(log_w_.data() + f0, f1 - f0);
            outer_[i] = lambda1 * spec_.log_c(i) + rho_ * log_gamma_[i];
        }
        return -log_sum_exp(outer_.data(), outer_.size());
    }

    double p(std::size_t f, double lambda1, double log_C) const {
        const std::size_t i = spec_.fiber(f).i;
        return std::exp(log_C + lambda1 * spec_.log_c(i) + log_w_[f] + (rho_ - 1.0) * log_gamma_[i]);
    }

    double F(double alpha, double lambda1, double lambda2) {
        const double log_C = prepare(alpha, lambda1, lambda2);
        double s = 0.0;
        for (std::size_t f = 0; f < spec_.num_fibers(); ++f) s += p(f, lambda1, log_C) * log_S_[f];
        return s;
    }

    double log_C(double alpha, double lambda1, double lambda2) { return prepare(alpha, lambda1, lambda2); }

    // sum_i p_i log gamma_i, with p_i = C c_i^l1 gamma_i^rho.
    double gamma_equation(double alpha, double lambda1, double lambda2) {
        const double log_C = prepare(alpha, lambda1, lambda2);
        double s = 0.0;
        for (std::size_t i = 0; i < spec_.m(); ++i) s += std::exp(log_C + outer_[i]) * log_gamma_[i];
        return s;
    }

    FamilyPoint point(double alpha, double lambda1, double lambda2) {
        FamilyPoint out;
        out.log_C = prepare(alpha, lambda1, lambda2);
        out.p.resize(spec_.num_fibers());
        for (std::size_t f = 0; f < spec_.num_fibers(); ++f) {
            out.p[f] = p(f, lambda1, out.log_C);
            out.F += out.p[f] * log_S_[f];
        }
        out.log_gamma = log_gamma_;
        for (std::size_t i = 0; i < spec_.m(); ++i) {
            double p_i = 0.0;
            for (std::size_t f = spec_.fiber_begin(i); f < spec_.fiber_begin(i + 1); ++f) p_i += out.p[f];
            out.gamma_equation += p_i * log_gamma_[i];
        }
        return out;
    }

private:
    const SpongeSpec& spec_;
    double rho_;
    std::vector<double> log_S_;
    std::vector<double> log_w_;
    std::vector<double> log_gamma_;
    std::vector<double> outer_;
};

bool sums_coincide(const std::vector<double>& log_S) {
    const auto [lo, hi] = std::minmax_element(log_S.begin(), log_S.end());
    return *hi - *lo <= 1e-14;
}

void check_family_preconditions(const SpongeSpec& spec, double t, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw PreconditionError("rho must lie in (0,1]");
    if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("t must lie in [0,1]");
    if (sums_coincide(log_fiber_sums(spec, t))) {
        throw BracketNotFound("F is constant in alpha: every fiber sum coincides at this t");
    }
    const auto roots = fiber_roots(spec);
    if (!(t > roots.t_lower && t < roots.t_upper)) {
        throw PreconditionError("t must lie strictly between the smallest and largest fiber roots");
    }
}

struct Solver {
    const SpongeSpec& spec;
    double t, rho;
    FamilyTolerances tol;
    Evaluator ev;
    double last_alpha = 0.0;
    double last_lambda1 = 0.0;

    Solver(const SpongeSpec& s, double t_, double rho_, const FamilyTolerances& tol_)
        : spec(s), t(t_), rho(rho_), tol(tol_), ev(s, t_, rho_) {}

    double alpha(double lambda1, double lambda2) {
        auto r = solve_increasing_expanding(
            [&](double a) { return ev.F(a, lambda1, lambda2); }, last_alpha, tol.alpha,
            tol.bracket_cap, "solve_alpha");
        if (!r.converged) throw NumericError("solve_alpha: residual tolerance not reached");
        last_alpha = r.x;
        return r.x;
    }

    Lambda1Solution lambda1(double lambda2) {
        auto g = [&](double l1) { return ev.log_C(alpha(l1, lambda2), l1, lambda2); };
        auto r = solve_increasing_expanding(g, last_lambda1, tol.lambda1, tol.bracket_cap, "solve_lambda1");
        if (!r.converged) throw NumericError("solve_lambda1: residual tolerance not reached");
        last_lambda1 = r.x;
        const double a = alpha(r.x, lambda2);
        return {r.x, a, ev.log_C(a, r.x, lambda2)};
    }
};

}  // namespace

double FiberRoots::A(double t) const {
    double best = 0.0;
    for (const auto& la : log_a) {
        double s = 0.0;
        for (double v : la) s += std::exp(t * v);
        best = std::max(best, s);
    }
    return best;
}

double FiberRoots::B(double t) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& la : log_a) {
        double s = 0.0;
        for (double v : la) s += std::exp(t * v);
        best = std::min(best, s);
    }
    return best;
}

FiberRoots fiber_roots(const SpongeSpec& spec) {
    FiberRoots roots;
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        const auto& fi = spec.fiber(f);
        std::vector<double> la(fi.count);
        for (std::size_t k = 0; k < fi.count; ++k) la[k] = spec.symbol_log_a(fi.first_symbol + k);
        // Single-fiber distributions reduce t(p) to the fiber's Moran root.
        const auto p = NestedDistribution::concentrated(spec, fi.i, fi.j);
        roots.t_ij.push_back(t_of_p(spec, p, 0.0));
        roots.log_a.push_back(std::move(la));
    }
    roots.t_lower = *std::min_element(roots.t_ij.begin(), roots.t_ij.end());
    roots.t_upper = *std::max_element(roots.t_ij.begin(), roots.t_ij.end());
    return roots;
}

FamilyPoint family_point(const SpongeSpec& spec, double alpha, double lambda1, double lambda2, double t,
                         double rho) {
    return Evaluator(spec, t, rho).point(alpha, lambda1, lambda2);
}

double family_F(const SpongeSpec& spec, double alpha, double lambda1, double lambda2, double t, double rho) {
    return Evaluator(spec, t, rho).F(alpha, lambda1, lambda2);
}

double solve_alpha(const SpongeSpec& spec, double lambda1, double lambda2, double t, double rho, double tol,
                   std::optional<double> hint) {
    check_family_preconditions(spec, t, rho);
    Solver s(spec, t, rho, FamilyTolerances{.alpha = tol});
    s.last_alpha = hint.value_or(0.0);
    return s.alpha(lambda1, lambda2);
}

Lambda1Solution solve_lambda1(const SpongeSpec& spec, double lambda2, double t, double rho,
                              const FamilyTolerances& tol, const FamilyHints& hints) {
    check_family_preconditions(spec, t, rho);
    Solver s(spec, t, rho, tol);
    s.last_alpha = hints.alpha.value_or(0.0);
    s.last_lambda1 = hints.lambda1.value_or(0.0);
    return s.lambda1(lambda2);
}

FamilySolution solve_lambda2(const SpongeSpec& spec, double t, double rho, const FamilyTolerances& tol,
                             const FamilyHints& hints) {
    check_family_preconditions(spec, t, rho);
    Solver s(spec, t, rho, tol);
    s.last_alpha = hints.alpha.value_or(0.0);
    s.last_lambda1 = hints.lambda1.value_or(0.0);

    // sum_i p_i log gamma_i is strictly decreasing in lambda2.
    auto h = [&](double l2) {
        const auto l1 = s.lambda1(l2);
        return -s.ev.gamma_equation(l1.alpha, l1.lambda1, l2);
    };
    auto r = solve_increasing_expanding(h, hints.lambda2.value_or(0.0), tol.lambda2, tol.bracket_cap,
                                        "solve_lambda2");
    if (!r.converged) throw NumericError("solve_lambda2: residual tolerance not reached");

    const double lambda2 = r.x;
    const auto l1 = s.lambda1(lambda2);
    const auto pt = s.ev.point(l1.alpha, l1.lambda1, lambda2);

    FamilySolution sol;
    sol.t = t;
    sol.rho = rho;
    sol.alpha = l1.alpha;
    sol.lambda1 = l1.lambda1;
    sol.lambda2 = lambda2;
    sol.C = std::exp(pt.log_C);
    for (double lg : pt.log_gamma) sol.gamma.push_back(std::exp(lg));
    sol.p = NestedDistribution::normalized(spec, pt.p);

    double total = 0.0;
    for (double v : pt.p) total += v;
    sol.residuals.normalization = total - 1.0;
    sol.residuals.log_C = pt.log_C;
    sol.residuals.gamma_equation = pt.gamma_equation;
    sol.residuals.F = pt.F;
    sol.residuals.t_gap = t_of_p(spec, sol.p, 0.0) - t;
    return sol;
}

std::vector<CurvePoint> family_curve(const SpongeSpec& spec, double rho, const std::vector<double>& t_grid,
                                     const FamilyTolerances& tol) {
    const auto roots = fiber_roots(spec);
    for (double t : t_grid) {
        if (!(t > roots.t_lower && t < roots.t_upper)) {
            throw PreconditionError("family_curve: grid point outside the open fiber-root interval");
        }
    }
    std::vector<CurvePoint> out;
    FamilyHints hints;
    for (double t : t_grid) {
        CurvePoint cp{t, std::nullopt, {}};
        try {
            auto sol = solve_lambda2(spec, t, rho, tol, hints);
            hints = {sol.alpha, sol.lambda1, sol.lambda2};
            cp.solution = std::move(sol);
        } catch (const SpongeError& e) {
            cp.error = e.what();
        }
        out.push_back(std::move(cp));
    }
    return out;
}

CurveMaximum family_curve_maximum(const SpongeSpec& spec, double rho, int grid_points, double t_tol,
                                  const FamilyTolerances& tol) {
    const auto roots = fiber_roots(spec);
    const auto grid = interior_t_grid(roots, grid_points);
    const auto curve = family_curve(spec, rho, grid, tol);

    CurveMaximum best;
    best.evaluations = static_cast<int>(curve.size());
    std::size_t at = curve.size();
    for (std::size_t q = 0; q < curve.size(); ++q) {
        if (!curve[q].solution) continue;
        const double v = objective(spec, curve[q].solution->p);
        if (at == curve.size() || v > best.objective) {
            at = q;
            best.objective = v;
            best.solution = *curve[q].solution;
        }
    }
    if (at == curve.size()) throw NumericError("family_curve_maximum: no grid point converged");

    double lo = at > 0 ? grid[at - 1] : 0.5 * (roots.t_lower + grid.front());
    double hi = at + 1 < grid.size() ? grid[at + 1] : 0.5 * (grid.back() + roots.t_upper);
    FamilyHints hints{best.solution.alpha, best.solution.lambda1, best.solution.lambda2};
    auto eval = [&](double t) {
        ++best.evaluations;
        try {
            auto sol = solve_lambda2(spec, t, rho, tol, hints);
            const double v = objective(spec, sol.p);
            if (v > best.objective) {
                best.objective = v;
                best.solution = sol;
            }
            return v;
        } catch (const SpongeError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    while (hi - lo > t_tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1);
        }
    }
    return best;
}

std::vector<double> interior_t_grid(const FiberRoots& roots, int count) {
    std::vector<double> grid;
    for (int n = 0; n < count; ++n) {
        grid.push_back(roots.t_lower + (n + 0.5) * (roots.t_upper - roots.t_lower) / count);
    }
    return grid;
}

}  // namespace sponge
