#include "sponge/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sponge/box_oracle.hpp"
#include "sponge/dimension.hpp"
#include "sponge/error.hpp"
#include "sponge/family.hpp"
#include "sponge/json_io.hpp"
#include "sponge/symbolic.hpp"

namespace sponge::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return ss.str();
}

void emit(const RunConfig& rc, std::ostream& out, const std::string& payload) {
    if (rc.out_path.empty()) {
        out << payload;
        return;
    }
    std::ofstream file(rc.out_path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + rc.out_path + "' for writing");
    file << payload;
    if (!file) throw IoError("error writing '" + rc.out_path + "'");
}

Json config_json(const RunConfig& rc) {
    return {{"subcommand", rc.subcommand}, {"spec_path", rc.spec_path}, {"tol", rc.tol},
            {"restarts", rc.restarts},     {"seed", rc.seed},           {"depth", rc.depth},
            {"grid", rc.grid},             {"threads", rc.threads},     {"oracle", rc.oracle}};
}

std::string config_comment(const RunConfig& rc) { return "# " + config_json(rc).dump() + "\n"; }

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

OptimizerConfig optimizer_config(const RunConfig& rc) {
    OptimizerConfig cfg;
    cfg.restarts = rc.restarts;
    cfg.seed = rc.seed;
    cfg.threads = rc.threads;
    if (rc.tol > 0) cfg.stationarity_tol = rc.tol;
    if (rc.grid > 0) cfg.hypothesis_grid = rc.grid;
    return cfg;
}

void check_positive(const RunConfig& rc) {
    if (rc.restarts < 0) throw PreconditionError("--restarts must be non-negative");
    if (rc.tol < 0) throw PreconditionError("--tol must be positive");
    if (rc.grid < 0) throw PreconditionError("--grid must be positive");
    if (rc.depth < 0) throw PreconditionError("--depth must be non-negative");
    if (rc.threads < 1) throw PreconditionError("--threads must be positive");
}

int cmd_validate(const RunConfig& rc, std::ostream& out) {
    const auto levels = parse_levels(read_file(rc.spec_path));
    const auto report = validate(levels);
    Json doc = to_json(report);
    doc["config"] = config_json(rc);
    emit(rc, out, dump(doc));
    return report.ok ? kOk : kInputError;
}

int cmd_hypothesis(const RunConfig& rc, std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    const int grid = rc.grid > 0 ? rc.grid : 101;
    Json doc{{"spec", spec.name()}};
    doc["unit_interval"] = to_json(check_generic_hypothesis(spec, grid));
    const auto roots = fiber_roots(spec);
    doc["fiber_roots"] = to_json(roots, spec);
    doc["family_interval"] =
        roots.degenerate() ? Json(nullptr)
                           : to_json(check_generic_hypothesis(spec, grid, roots.t_lower, roots.t_upper));
    doc["config"] = config_json(rc);
    emit(rc, out, dump(doc));
    return kOk;
}

int cmd_dim(const RunConfig& rc, double oracle_tol, std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    auto report = maximize(spec, optimizer_config(rc));
    if (rc.oracle) {
        const auto cover = generate_cover(spec, rc.depth);
        const auto est = box_count_estimate(cover, default_delta_series(cover), rc.threads);
        report.oracle = compare_with_formula(est, report.dimension, rc.depth, oracle_tol);
    }
    Json doc = to_json(report, spec);
    doc["run"] = config_json(rc);
    emit(rc, out, dump(doc));
    return report.diagnostics.converged ? kOk : kNonConvergence;
}

int cmd_family(const RunConfig& rc, std::optional<double> t, double rho, std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    const auto roots = fiber_roots(spec);
    if (roots.degenerate()) throw PreconditionError("family undefined: all fiber roots coincide");
    FamilyTolerances tol;
    if (rc.tol > 0) tol.alpha = rc.tol;

    Json doc{{"spec", spec.name()}, {"fiber_roots", to_json(roots, spec)}, {"rho", rho}};
    Json sols = Json::array();
    bool all_ok = true;
    if (t) {
        // A single requested point reports its own precondition failure.
        const auto sol = solve_lambda2(spec, *t, rho, tol);
        Json one = to_json(sol, spec);
        one["objective"] = objective(spec, sol.p);
        sols.push_back(std::move(one));
    } else {
        const auto grid = interior_t_grid(roots, rc.grid > 0 ? rc.grid : 10);
        for (const auto& cp : family_curve(spec, rho, grid, tol)) {
            if (cp.solution) {
                Json s = to_json(*cp.solution, spec);
                s["objective"] = objective(spec, cp.solution->p);
                sols.push_back(std::move(s));
            } else {
                all_ok = false;
                sols.push_back({{"t", cp.t}, {"error", cp.error}});
            }
        }
    }
    doc["solutions"] = std::move(sols);
    doc["tolerances"] = {{"alpha", tol.alpha}, {"lambda1", tol.lambda1}, {"lambda2", tol.lambda2},
                         {"bracket_cap", tol.bracket_cap}};
    doc["config"] = config_json(rc);
    emit(rc, out, dump(doc));
    return all_ok ? kOk : kNonConvergence;
}

NestedDistribution measure_for(const SpongeSpec& spec, const RunConfig& rc, const std::string& measure) {
    if (measure == "uniform") return NestedDistribution::uniform(spec);
    if (measure == "optimal") return maximize(spec, optimizer_config(rc)).p_star;
    throw PreconditionError("--measure must be 'uniform' or 'optimal'");
}

int cmd_trace(const RunConfig& rc, std::size_t length, std::size_t stride, const std::string& measure,
              std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    const auto p = measure_for(spec, rc, measure);
    const double t = t_of_p(spec, p, 0.0);
    const auto word = sample_word(spec, p, t, length, rc.seed);
    const auto rows = pointwise_dimension_trace(spec, p, t, word, length, stride);
    std::ostringstream os;
    os << config_comment(rc);
    os.precision(17);
    os << "# measure=" << measure << " length=" << length << " stride=" << stride
       << " lambda_plus_t=" << objective(spec, p) << "\n";
    write_trace_csv(os, rows);
    emit(rc, out, os.str());
    return kOk;
}

int cmd_boxcount(const RunConfig& rc, int count, std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    const auto cover = generate_cover(spec, rc.depth);
    const auto est = box_count_estimate(cover, default_delta_series(cover, count), rc.threads);
    std::ostringstream os;
    os.precision(17);
    os << config_comment(rc);
    os << "# boxes=" << cover.boxes.size() << " slope=" << est.slope << " stderr=" << est.slope_stderr
       << " band_low=" << est.band_low << " band_high=" << est.band_high << "\n";
    os << "delta,count\n";
    for (std::size_t q = 0; q < est.deltas.size(); ++q) os << est.deltas[q] << ',' << est.counts[q] << '\n';
    emit(rc, out, os.str());
    return kOk;
}

int cmd_export(const RunConfig& rc, const std::string& format, std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    emit(rc, out, export_geometry(generate_cover(spec, rc.depth), format));
    return kOk;
}

int cmd_landscape(const RunConfig& rc, const std::string& mode, std::ostream& out) {
    const auto spec = parse_spec(read_file(rc.spec_path));
    std::ostringstream os;
    os.precision(17);
    os << config_comment(rc);
    if (mode == "simplex") {
        // Slice through the face spanned by the first (up to) three fibers.
        const std::size_t nf = std::min<std::size_t>(3, spec.num_fibers());
        const int grid = rc.grid > 0 ? rc.grid : 20;
        os << "w1,w2,w3,objective\n";
        for (int q1 = 0; q1 <= grid; ++q1) {
            for (int q2 = 0; q1 + q2 <= grid; ++q2) {
                const int q3 = grid - q1 - q2;
                if ((nf < 2 && q2 > 0) || (nf < 3 && q3 > 0)) continue;
                std::vector<double> w(spec.num_fibers(), 0.0);
                const double v[3] = {double(q1) / grid, double(q2) / grid, double(q3) / grid};
                for (std::size_t f = 0; f < nf; ++f) w[f] = v[f];
                if (nf == 1) w[0] = 1.0;
                const auto p = NestedDistribution::normalized(spec, w);
                os << v[0] << ',' << v[1] << ',' << v[2] << ',' << objective(spec, p) << '\n';
            }
        }
    } else if (mode == "family") {
        const auto roots = fiber_roots(spec);
        if (roots.degenerate()) throw PreconditionError("family undefined: all fiber roots coincide");
        const auto grid = interior_t_grid(roots, rc.grid > 0 ? rc.grid : 40);
        os << "t,rho,alpha,lambda1,lambda2,objective\n";
        for (double rho : {0.25, 0.5, 0.75, 1.0}) {
            for (const auto& cp : family_curve(spec, rho, grid)) {
                if (!cp.solution) continue;
                const auto& s = *cp.solution;
                os << s.t << ',' << rho << ',' << s.alpha << ',' << s.lambda1 << ',' << s.lambda2 << ','
                   << objective(spec, s.p) << '\n';
            }
        }
    } else {
        throw PreconditionError("--mode must be 'simplex' or 'family'");
    }
    emit(rc, out, os.str());
    return kOk;
}

}  // namespace

int default_threads() {
    if (const char* env = std::getenv("SPONGE_DIM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hausdorff dimension of self-affine Sierpinski sponges", "sponge-dim"};
    app.require_subcommand(1);
    RunConfig rc;
    rc.threads = default_threads();

    double oracle_tol = 0.15;
    std::optional<double> t;
    double rho = 1.0;
    std::size_t length = 100000, stride = 100;
    int delta_count = 8;
    std::string measure = "optimal", format = "json", mode = "simplex";

    auto common = [&](CLI::App* sub) {
        sub->add_option("spec", rc.spec_path, "sponge specification (json)")->required();
        sub->add_option("--out", rc.out_path, "write data here instead of standard output");
        sub->add_option("--threads", rc.threads, "worker threads (default: SPONGE_DIM_THREADS or all cores)");
        return sub;
    };
    auto* validate_cmd = common(app.add_subcommand("validate", "check a spec against every constraint"));
    auto* hyp = common(app.add_subcommand("hypothesis", "scan the generic hypothesis"));
    hyp->add_option("--grid", rc.grid, "grid points (default 101)");
    auto* dim = common(app.add_subcommand("dim", "maximize lambda(p) + t(p)"));
    dim->add_option("--tol", rc.tol, "stationarity tolerance (default 1e-9)");
    dim->add_option("--restarts", rc.restarts, "random restarts besides the uniform start");
    dim->add_option("--seed", rc.seed, "seed for the random starts");
    dim->add_option("--grid", rc.grid, "hypothesis grid points");
    dim->add_flag("--oracle", rc.oracle, "add a box-counting comparison");
    dim->add_option("--depth", rc.depth, "oracle cover depth");
    dim->add_option("--oracle-tol", oracle_tol, "oracle tolerance");
    auto* fam = common(app.add_subcommand("family", "solve the two-parameter family p(t, rho)"));
    fam->add_option("--t", t, "single t in (t_lower, t_upper)");
    fam->add_option("--rho", rho, "rho in (0, 1]");
    fam->add_option("--grid", rc.grid, "interior t grid size when --t is absent (default 10)");
    fam->add_option("--tol", rc.tol, "alpha residual tolerance (default 1e-12)");
    auto* trace = common(app.add_subcommand("trace", "pointwise dimension along a sampled word (csv)"));
    trace->add_option("--length", length, "word length");
    trace->add_option("--stride", stride, "keep every stride-th row");
    trace->add_option("--seed", rc.seed, "sampling seed");
    trace->add_option("--measure", measure, "uniform or optimal");
    trace->add_option("--restarts", rc.restarts, "optimizer restarts for --measure optimal");
    auto* box = common(app.add_subcommand("boxcount", "grid box counts of the depth-n cover (csv)"));
    box->add_option("--depth", rc.depth, "cover depth");
    box->add_option("--deltas", delta_count, "number of grid sizes");
    auto* exp = common(app.add_subcommand("export", "write the depth-n cover as geometry"));
    exp->add_option("--depth", rc.depth, "cover depth");
    exp->add_option("--format", format, "json or obj");
    auto* land = common(app.add_subcommand("landscape", "objective values for plotting (csv)"));
    land->add_option("--mode", mode, "simplex or family");
    land->add_option("--grid", rc.grid, "grid resolution");
    land->add_option("--seed", rc.seed, "unused; echoed for provenance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        check_positive(rc);
        rc.subcommand = app.get_subcommands().front()->get_name();
        if (validate_cmd->parsed()) return cmd_validate(rc, out);
        if (hyp->parsed()) return cmd_hypothesis(rc, out);
        if (dim->parsed()) return cmd_dim(rc, oracle_tol, out);
        if (fam->parsed()) return cmd_family(rc, t, rho, out);
        if (trace->parsed()) return cmd_trace(rc, length, stride, measure, out);
        if (box->parsed()) return cmd_boxcount(rc, delta_count, out);
        if (exp->parsed()) return cmd_export(rc, format, out);
        return cmd_landscape(rc, mode, out);
    } catch (const ConstraintError& e) {
        err << "constraint error (" << e.constraint_id() << ", level " << e.level() << "): " << e.what() << '\n';
        return kInputError;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kInputError;
    } catch (const PreconditionError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInputError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
}

}  // namespace sponge::cli
