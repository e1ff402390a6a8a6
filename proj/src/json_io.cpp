#include "sponge/json_io.hpp"

namespace sponge {

Json to_json(const ValidationReport& report) {
    Json v = Json::array();
    for (const auto& x : report.violations) {
        v.push_back({{"constraint", x.constraint}, {"level", x.level}, {"path", x.path}, {"message", x.message}});
    }
    return {{"ok", report.ok}, {"violations", v}};
}

Json to_json(const HypothesisReport& report) {
    Json out{{"holds", report.holds},
             {"reason", report.reason},
             {"evidence", report.evidence},
             {"grid_points", report.grid_points},
             {"tolerance", report.tolerance},
             {"t_min", report.t_min},
             {"t_max", report.t_max}};
    out["violating_t"] = report.violating_t ? Json(*report.violating_t) : Json(nullptr);
    Json w = Json::array();
    for (const auto& x : report.witnesses) {
        w.push_back({{"t", x.t}, {"i", x.i}, {"j", x.j}, {"j_prime", x.j_prime}, {"difference", x.difference}});
    }
    out["witnesses"] = std::move(w);
    return out;
}

Json to_json(const OptimizerConfig& c) {
    return {{"restarts", c.restarts},
            {"seed", c.seed},
            {"t_tol", c.t_tol},
            {"stationarity_tol", c.stationarity_tol},
            {"floor", c.floor},
            {"max_iterations", c.max_iterations},
            {"face_recursion_limit", c.face_recursion_limit},
            {"family_sweep", c.family_sweep},
            {"family_sweep_points", c.family_sweep_points},
            {"hypothesis_grid", c.hypothesis_grid},
            {"threads", c.threads}};
}

Json nested_json(const NestedDistribution& p, const SpongeSpec& spec) { return Json(p.nested(spec)); }

Json to_json(const DimensionReport& r, const SpongeSpec& spec) {
    const auto& d = r.diagnostics;
    Json out{{"spec", spec.name()},
             {"dimension", r.dimension},
             {"lambda1", r.lambda1},
             {"lambda2", r.lambda2},
             {"lambda_total", r.lambda_total},
             {"t_star", r.t_star},
             {"p_star", nested_json(r.p_star, spec)},
             {"diagnostics",
              {{"restarts", d.restarts},
               {"face_ascents", d.face_ascents},
               {"iterations", d.iterations},
               {"total_iterations", d.total_iterations},
               {"final_step", d.final_step},
               {"stationarity", d.stationarity},
               {"converged", d.converged},
               {"exact_by_symmetry", d.exact_by_symmetry},
               {"best_source", d.best_source},
               {"family_sweep_run", d.family_sweep_run},
               {"family_points", d.family_points},
               {"family_best", d.family_points > 0 ? Json(d.family_best) : Json(nullptr)}}},
             {"hypothesis", to_json(r.hypothesis)},
             {"warnings", r.warnings},
             {"config", to_json(r.config)}};
    out["oracle"] = r.oracle ? to_json(*r.oracle) : Json(nullptr);
    return out;
}

Json to_json(const FamilySolution& s, const SpongeSpec& spec) {
    return {{"t", s.t},
            {"rho", s.rho},
            {"alpha", s.alpha},
            {"lambda1", s.lambda1},
            {"lambda2", s.lambda2},
            {"gamma", s.gamma},
            {"C", s.C},
            {"p", nested_json(s.p, spec)},
            {"residuals",
             {{"normalization", s.residuals.normalization},
              {"log_C", s.residuals.log_C},
              {"gamma_equation", s.residuals.gamma_equation},
              {"F", s.residuals.F},
              {"t_gap", s.residuals.t_gap}}}};
}

Json to_json(const FiberRoots& roots, const SpongeSpec& spec) {
    Json t_ij = Json::array();
    for (std::size_t i = 0; i < spec.m(); ++i) {
        Json row = Json::array();
        for (std::size_t f = spec.fiber_begin(i); f < spec.fiber_begin(i + 1); ++f) row.push_back(roots.t_ij[f]);
        t_ij.push_back(std::move(row));
    }
    return {{"t_ij", t_ij}, {"t_lower", roots.t_lower}, {"t_upper", roots.t_upper}, {"degenerate", roots.degenerate()}};
}

Json to_json(const BoxCountEstimate& e) {
    return {{"deltas", e.deltas},     {"counts", e.counts},       {"slope", e.slope},
            {"intercept", e.intercept}, {"slope_stderr", e.slope_stderr}, {"band_low", e.band_low},
            {"band_high", e.band_high}};
}

Json to_json(const OracleComparison& c) {
    return {{"depth", c.depth},         {"slope", c.slope},       {"band_low", c.band_low},
            {"band_high", c.band_high}, {"formula", c.formula},   {"tolerance", c.tolerance},
            {"agrees", c.agrees},       {"flagged_above", c.flagged_above}, {"caveat", c.caveat}};
}

}  // namespace sponge
