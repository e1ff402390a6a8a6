#include "sponge/dimension.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "sponge/error.hpp"
#include "sponge/family.hpp"
#include "sponge/random.hpp"

namespace sponge {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double log_fiber_sum(const SpongeSpec& spec, std::size_t f, double t) {
    const auto& fi = spec.fiber(f);
    double s = 0.0;
    for (std::size_t k = 0; k < fi.count; ++k) s += std::exp(t * spec.symbol_log_a(fi.first_symbol + k));
    return std::log(s);
}

// d/dt log S_f(t).
double dlog_fiber_sum(const SpongeSpec& spec, std::size_t f, double t) {
    const auto& fi = spec.fiber(f);
    double s = 0.0, ds = 0.0;
    for (std::size_t k = 0; k < fi.count; ++k) {
        const double la = spec.symbol_log_a(fi.first_symbol + k);
        const double e = std::exp(t * la);
        s += e;
        ds += e * la;
    }
    return ds / s;
}

struct Moments {
    double N1 = 0, D1 = 0, N2 = 0, D2 = 0;
};

Moments moments(const SpongeSpec& spec, const NestedDistribution& p) {
    Moments mo;
    for (std::size_t i = 0; i < spec.m(); ++i) {
        mo.N1 += xlogx(p.p_i(i));
        mo.D1 += p.p_i(i) * spec.log_c(i);
    }
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        mo.N2 += xlogx(p[f]);
        mo.D2 += p[f] * spec.fiber_log_b(f);
    }
    return mo;
}

std::vector<double> clip_normalize(std::vector<double> w, double floor) {
    for (double& v : w) v = std::max(v, floor);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return w;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
    if (workers <= 1) {
        for (std::size_t n = 0; n < count; ++n) body(n);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t n; (n = next++) < count;) {
                try {
                    body(n);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

struct Candidate {
    AscentResult ascent;
    std::string source;
};

bool better(const Candidate& x, const Candidate& best) { return x.ascent.value > best.ascent.value; }

}  // namespace

LambdaComponents lambda_components(const SpongeSpec& spec, const NestedDistribution& p) {
    if (!p.matches(spec)) throw PreconditionError("distribution shape does not match the spec");
    // Both numerators are sums of non-positive terms; evaluating them termwise
    // keeps rounding from producing a negative component.
    double n1 = 0.0, n2 = 0.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < spec.m(); ++i) {
        const double pi = p.p_i(i);
        n1 += xlogx(std::min(pi, 1.0));
        d1 += pi * spec.log_c(i);
        for (std::size_t f = spec.fiber_begin(i); f < spec.fiber_begin(i + 1); ++f) {
            if (p[f] > 0.0) n2 += p[f] * std::log(std::min(p[f] / pi, 1.0));
            d2 += p[f] * spec.fiber_log_b(f);
        }
    }
    if (!(d1 < 0.0) || !(d2 < 0.0)) throw NumericError("degenerate lambda denominator");
    return {n1 / d1, n2 / d2};
}

double t_residual(const SpongeSpec& spec, const NestedDistribution& p, double t) {
    double s = 0.0;
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        if (p[f] > 0.0) s += p[f] * log_fiber_sum(spec, f, t);
    }
    return s;
}

double t_of_p(const SpongeSpec& spec, const NestedDistribution& p, double tol) {
    if (!p.matches(spec)) throw PreconditionError("distribution shape does not match the spec");
    if (tol < 0.0) throw PreconditionError("t_of_p: tolerance must be non-negative");
    const double g0 = t_residual(spec, p, 0.0);
    if (g0 <= tol) return 0.0;
    const double g1 = t_residual(spec, p, 1.0);
    if (g1 >= -tol) return 1.0;
    double lo = 0.0, hi = 1.0, g_lo = g0, g_hi = g1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = t_residual(spec, p, mid);
        if (std::abs(gm) <= tol) return mid;
        if (gm > 0.0) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
            g_hi = gm;
        }
    }
    return std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
}

double objective(const SpongeSpec& spec, const NestedDistribution& p, double t_tol) {
    return lambda_components(spec, p).total() + t_of_p(spec, p, t_tol);
}

std::vector<double> objective_gradient(const SpongeSpec& spec, const NestedDistribution& p) {
    if (!p.is_interior()) throw PreconditionError("objective_gradient: p must be interior");
    const auto mo = moments(spec, p);
    const double t = t_of_p(spec, p, 0.0);
    double Gt = 0.0;
    std::vector<double> logS(spec.num_fibers());
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        logS[f] = log_fiber_sum(spec, f, t);
        Gt += p[f] * dlog_fiber_sum(spec, f, t);
    }
    std::vector<double> g(spec.num_fibers());
    for (std::size_t f = 0; f < spec.num_fibers(); ++f) {
        const std::size_t i = spec.fiber(f).i;
        const double lpi = std::log(p.p_i(i));
        const double d1 = ((lpi + 1.0) * mo.D1 - mo.N1 * spec.log_c(i)) / (mo.D1 * mo.D1);
        const double d2 =
            ((std::log(p[f]) - lpi) * mo.D2 - (mo.N2 - mo.N1) * spec.fiber_log_b(f)) / (mo.D2 * mo.D2);
        // Implicit differentiation of t_residual(p, t(p)) = 0.
        const double dt = -logS[f] / Gt;
        g[f] = d1 + d2 + dt;
    }
    return g;
}

double projected_gradient_norm(const NestedDistribution& p, const std::vector<double>& g, double floor) {
    double mean = 0.0;
    std::size_t free = 0;
    for (std::size_t f = 0; f < p.size(); ++f) {
        if (p[f] > 2.0 * floor) {
            mean += g[f];
            ++free;
        }
    }
    if (free == 0) return 0.0;
    mean /= static_cast<double>(free);
    double s = 0.0;
    for (std::size_t f = 0; f < p.size(); ++f) {
        const double dev = g[f] - mean;
        if (p[f] > 2.0 * floor) {
            s += dev * dev;
        } else if (dev > 0.0) {
            s += dev * dev;
        }
    }
    return std::sqrt(s);
}

AscentResult projected_ascent(const SpongeSpec& spec, const NestedDistribution& start,
                              const OptimizerConfig& cfg) {
    const std::size_t n = spec.num_fibers();
    AscentResult res;
    if (n == 1) {
        res.p = NestedDistribution::uniform(spec);
        res.value = objective(spec, res.p);
        res.converged = true;
        return res;
    }

    auto make = [&](const std::vector<double>& w) { return NestedDistribution::normalized(spec, w); };
    std::vector<double> w = clip_normalize({start.weights().begin(), start.weights().end()}, cfg.floor);
    auto p = make(w);
    double value = objective(spec, p);
    auto grad = objective_gradient(spec, p);

    // Reduced coordinates: every fiber except the heaviest one, whose weight
    // absorbs the simplex constraint.
    const std::size_t ref = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    std::vector<std::size_t> free;
    for (std::size_t f = 0; f < n; ++f) {
        if (f != ref) free.push_back(f);
    }
    const auto nr = static_cast<Eigen::Index>(free.size());
    auto reduced = [&](const std::vector<double>& g) {
        Eigen::VectorXd r(nr);
        for (Eigen::Index q = 0; q < nr; ++q) r[q] = g[free[q]] - g[ref];
        return r;
    };
    auto expand = [&](const Eigen::VectorXd& d) {
        std::vector<double> full(n, 0.0);
        double s = 0.0;
        for (Eigen::Index q = 0; q < nr; ++q) {
            full[free[q]] = d[q];
            s += d[q];
        }
        full[ref] = -s;
        return full;
    };
    auto step_to = [&](const std::vector<double>& base, const std::vector<double>& d, double s) {
        std::vector<double> trial(n);
        for (std::size_t f = 0; f < n; ++f) trial[f] = base[f] + s * d[f];
        return clip_normalize(std::move(trial), cfg.floor);
    };

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(nr, nr);
    bool fresh = true;
    Eigen::VectorXd gr = reduced(grad);
    double stat = projected_gradient_norm(p, grad, cfg.floor);
    int flat_steps = 0;  // consecutive accepted steps without an increase

    for (int it = 0; it < cfg.max_iterations && stat > cfg.stationarity_tol; ++it) {
        if (fresh) H = Eigen::MatrixXd::Identity(nr, nr) * (0.1 / std::max(1.0, gr.lpNorm<Eigen::Infinity>()));
        Eigen::VectorXd dr = H * gr;
        if (dr.dot(gr) <= 0.0) {
            fresh = true;
            --it;
            continue;
        }
        const auto d = expand(dr);
        double s = 1.0;
        bool accepted = false;
        std::vector<double> trial;
        double trial_value = 0.0;
        for (int bt = 0; bt < 60; ++bt, s *= 0.5) {
            trial = step_to(w, d, s);
            trial_value = objective(spec, make(trial));
            double predicted = 0.0;
            for (std::size_t f = 0; f < n; ++f) predicted += grad[f] * (trial[f] - w[f]);
            if (trial_value >= value + 1e-4 * predicted && trial_value >= value) {
                accepted = true;
                break;
            }
        }
        ++res.iterations;
        if (!accepted) {
            if (fresh) break;  // steepest-ascent step also failed: stalled
            fresh = true;
            continue;
        }
        auto p_new = make(trial);
        auto grad_new = objective_gradient(spec, p_new);
        Eigen::VectorXd gr_new = reduced(grad_new);
        Eigen::VectorXd sv(nr);
        for (Eigen::Index q = 0; q < nr; ++q) sv[q] = trial[free[q]] - w[free[q]];
        const Eigen::VectorXd yv = -(gr_new - gr);  // gradient change of -f
        const double sy = sv.dot(yv);
        if (sy > 1e-14 * sv.norm() * yv.norm()) {
            if (fresh) H = Eigen::MatrixXd::Identity(nr, nr) * (sy / yv.squaredNorm());
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nr, nr);
            H = (I - rho * sv * yv.transpose()) * H * (I - rho * yv * sv.transpose()) + rho * sv * sv.transpose();
            fresh = false;
        } else {
            fresh = true;
        }
        flat_steps = trial_value > value ? 0 : flat_steps + 1;
        w = std::move(trial);
        p = std::move(p_new);
        grad = std::move(grad_new);
        gr = std::move(gr_new);
        value = trial_value;
        res.final_step = s;
        stat = projected_gradient_norm(p, grad, cfg.floor);
        // Values no longer separate steps; leave the rest to the polish below.
        if (flat_steps >= 5) break;
    }

    // Newton polish on the reduced gradient once close: function values are
    // too flat to rank steps at this scale, so progress is measured on the
    // projected gradient itself.
    for (int it = 0; it < 40 && stat > cfg.stationarity_tol && stat < 1e-2; ++it) {
        Eigen::MatrixXd Hr(nr, nr);
        for (Eigen::Index q = 0; q < nr; ++q) {
            const std::size_t f = free[q];
            const double h = 1e-5 * std::min(w[f], w[ref]);
            auto wp = w, wm = w;
            wp[f] += h;
            wp[ref] -= h;
            wm[f] -= h;
            wm[ref] += h;
            const auto gp = reduced(objective_gradient(spec, NestedDistribution::normalized(spec, wp)));
            const auto gm = reduced(objective_gradient(spec, NestedDistribution::normalized(spec, wm)));
            Hr.col(q) = (gp - gm) / (2.0 * h);
        }
        const Eigen::MatrixXd negH = -0.5 * (Hr + Hr.transpose());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(negH);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
        const Eigen::VectorXd dr = ldlt.solve(gr);
        const auto d = expand(dr);
        bool improved = false;
        for (double s = 1.0; s > 1e-6; s *= 0.5) {
            bool feasible = true;
            for (std::size_t f = 0; f < n; ++f) feasible = feasible && w[f] + s * d[f] > cfg.floor;
            if (!feasible) continue;
            auto trial = step_to(w, d, s);
            auto p_new = make(trial);
            auto grad_new = objective_gradient(spec, p_new);
            const double stat_new = projected_gradient_norm(p_new, grad_new, cfg.floor);
            const double value_new = objective(spec, p_new);
            if (stat_new < stat && value_new >= value - 1e-13) {
                w = std::move(trial);
                p = std::move(p_new);
                grad = std::move(grad_new);
                gr = reduced(grad);
                value = value_new;
                stat = stat_new;
                res.final_step = s;
                improved = true;
                break;
            }
        }
        ++res.iterations;
        if (!improved) break;
    }

    res.p = std::move(p);
    res.value = value;
    res.stationarity = stat;
    res.converged = stat <= cfg.stationarity_tol;
    return res;
}

namespace {

std::vector<NestedDistribution> starting_points(const SpongeSpec& spec, const OptimizerConfig& cfg) {
    std::vector<NestedDistribution> starts{NestedDistribution::uniform(spec)};
    Rng rng(cfg.seed);
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> w(spec.num_fibers());
        for (double& v : w) v = rng.exponential();  // Dirichlet(1, ..., 1)
        starts.push_back(NestedDistribution::normalized(spec, std::move(w)));
    }
    return starts;
}

std::vector<AscentResult> run_ascents(const SpongeSpec& spec, const std::vector<NestedDistribution>& starts,
                                      const OptimizerConfig& cfg) {
    std::vector<AscentResult> out(starts.size());
    parallel_for(starts.size(), cfg.threads,
                 [&](std::size_t n) { out[n] = projected_ascent(spec, starts[n], cfg); });
    return out;
}

std::string format_t(double t) {
    std::ostringstream os;
    os.precision(10);
    os << t;
    return os.str();
}

}  // namespace

DimensionReport maximize(const SpongeSpec& spec, const OptimizerConfig& cfg) {
    DimensionReport rep;
    rep.config = cfg;
    rep.hypothesis = check_generic_hypothesis(spec, std::max(cfg.hypothesis_grid, 2));
    auto& diag = rep.diagnostics;
    diag.exact_by_symmetry = spec.is_fully_symmetric();

    const auto starts = starting_points(spec, cfg);
    const auto ascents = run_ascents(spec, starts, cfg);
    diag.restarts = static_cast<int>(ascents.size());

    Candidate best{ascents.front(), "uniform"};
    for (std::size_t n = 0; n < ascents.size(); ++n) {
        diag.total_iterations += ascents[n].iterations;
        Candidate c{ascents[n], n == 0 ? "uniform" : "random:" + std::to_string(n)};
        if (better(c, best)) best = std::move(c);
    }

    // Codimension-one faces: maximize on each sub-sponge, compare the face
    // value, and reuse the face optimum pushed slightly inward as a start.
    const std::size_t nf = spec.num_fibers();
    if (nf >= 2 && nf <= cfg.face_recursion_limit) {
        OptimizerConfig face_cfg = cfg;
        face_cfg.face_recursion_limit = 0;
        std::vector<NestedDistribution> inward;
        for (std::size_t drop = 0; drop < nf; ++drop) {
            std::vector<bool> keep(nf, true);
            keep[drop] = false;
            const auto sub = restrict_to_fibers(spec, keep);
            const auto face_ascents = run_ascents(sub.spec, starting_points(sub.spec, face_cfg), face_cfg);
            diag.face_ascents += static_cast<int>(face_ascents.size());
            const auto& face_best = *std::max_element(
                face_ascents.begin(), face_ascents.end(),
                [](const AscentResult& x, const AscentResult& y) { return x.value < y.value; });
            std::vector<double> embedded(nf, 0.0);
            for (std::size_t f = 0; f < sub.fiber_map.size(); ++f) embedded[sub.fiber_map[f]] = face_best.p[f];
            const auto& fi = spec.fiber(drop);
            const std::string tag = "face:" + std::to_string(fi.i + 1) + "," + std::to_string(fi.j + 1);
            auto on_face = NestedDistribution::normalized(spec, embedded);
            AscentResult face_result{on_face, objective(spec, on_face), face_best.stationarity,
                                     face_best.final_step, face_best.iterations, face_best.converged};
            Candidate c{std::move(face_result), tag};
            if (better(c, best)) best = std::move(c);
            embedded[drop] = 1e-6;
            inward.push_back(NestedDistribution::normalized(spec, std::move(embedded)));
        }
        const auto polished = run_ascents(spec, inward, cfg);
        for (std::size_t n = 0; n < polished.size(); ++n) {
            diag.total_iterations += polished[n].iterations;
            const auto& fi = spec.fiber(n);
            Candidate c{polished[n], "face-start:" + std::to_string(fi.i + 1) + "," + std::to_string(fi.j + 1)};
            if (better(c, best)) best = std::move(c);
        }
    }

    // One-parameter sweep of the rho = 1 family when it is defined.
    if (cfg.family_sweep && cfg.family_sweep_points > 0 && nf >= 2) {
        const auto roots = fiber_roots(spec);
        if (!roots.degenerate() &&
            check_generic_hypothesis(spec, std::max(cfg.hypothesis_grid, 2), roots.t_lower, roots.t_upper).holds) {
            diag.family_sweep_run = true;
            try {
                const auto top = family_curve_maximum(spec, 1.0, cfg.family_sweep_points);
                diag.family_points = top.evaluations;
                diag.family_best = top.objective;
                auto polished = projected_ascent(spec, top.solution.p, cfg);
                diag.total_iterations += polished.iterations;
                Candidate c{std::move(polished), "family:t=" + format_t(top.solution.t)};
                if (better(c, best)) best = std::move(c);
            } catch (const NumericError& e) {
                rep.warnings.push_back(std::string("family sweep failed: ") + e.what());
            }
        }
    }

    const auto& p = best.ascent.p;
    const auto lam = lambda_components(spec, p);
    rep.p_star = p;
    rep.lambda1 = lam.lambda1;
    rep.lambda2 = lam.lambda2;
    rep.lambda_total = lam.total();
    rep.t_star = t_of_p(spec, p, 0.0);
    rep.dimension = rep.lambda_total + rep.t_star;
    diag.iterations = best.ascent.iterations;
    diag.final_step = best.ascent.final_step;
    diag.stationarity = best.ascent.stationarity;
    diag.converged = best.ascent.converged;
    diag.best_source = best.source;

    if (!rep.hypothesis.holds) {
        rep.warnings.push_back(
            "generic hypothesis not verified (" + rep.hypothesis.reason +
            "): the value is the variational supremum, a lower bound for the Hausdorff dimension; "
            "equality is only numerically asserted");
    }
    if (!diag.converged) {
        rep.warnings.push_back("optimizer did not reach the stationarity tolerance; best-so-far returned");
    }
    return rep;
}

}  // namespace sponge
