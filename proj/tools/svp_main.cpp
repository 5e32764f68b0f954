// Experiment runner for hard-margin SVM support-vector proliferation studies.
//
// Subcommands: gen, solve, check, sweep, converse, buhot, concentration,
// figure1, bounds. Exit codes: 0 success, 1 config error, 2 numerical
// failure, 3 internal inconsistency.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "svp/bounds.hpp"
#include "svp/config.hpp"
#include "svp/equivalence.hpp"
#include "svp/errors.hpp"
#include "svp/experiments.hpp"
#include "svp/io.hpp"
#include "svp/svm.hpp"

namespace {

using nlohmann::json;
using namespace svp;

struct CommonFlags {
    std::string config_path;
    FlagOverrides overrides;

    // CLI11 needs lvalues to bind; mirror optional flags through these.
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    double tol_kkt = 0.0;
    double tol_sv = 0.0;
    long trials = 0;
};

void add_common_options(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--out", flags.out, "output directory")
        ->each([&flags](const std::string& v) { flags.overrides.out = v; });
    cmd->add_option("--seed", flags.seed, "master seed")
        ->each([&flags](const std::string&) { flags.overrides.seed = flags.seed; });
    cmd->add_option("--workers", flags.workers, "worker thread count")
        ->each([&flags](const std::string&) { flags.overrides.workers = flags.workers; });
    cmd->add_option("--tol-kkt", flags.tol_kkt, "relative KKT tolerance")
        ->each([&flags](const std::string&) { flags.overrides.tol_kkt = flags.tol_kkt; });
    cmd->add_option("--tol-sv", flags.tol_sv, "relative support-vector threshold")
        ->each([&flags](const std::string&) { flags.overrides.tol_sv = flags.tol_sv; });
    cmd->add_option("--trials", flags.trials, "trials per cell")
        ->each([&flags](const std::string&) { flags.overrides.trials = flags.trials; });
}

RunConfig resolve(const std::string& subcommand, const CommonFlags& flags) {
    if (!flags.config_path.empty()) {
        return load_config(subcommand, flags.config_path, flags.overrides);
    }
    return resolve_config(subcommand, json::object(), flags.overrides);
}

Dataset dataset_for(const RunConfig& cfg) {
    const json& body = cfg.body;
    if (body.contains("cell")) {
        CellSpec cell = cell_from_json(body.at("cell"), "/cell");
        return cell.generate(SeedRecord{cfg.seed, 0});
    }
    if (body.contains("dataset")) {
        return load_dataset(body.at("dataset").get<std::string>());
    }
    throw ConfigError("/", "provide either a 'cell' description or a 'dataset' directory");
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

int run_gen(const RunConfig& cfg) {
    if (!cfg.body.contains("cell")) throw ConfigError("/cell", "gen requires a 'cell' description");
    Dataset ds = dataset_for(cfg);
    std::string label_summary =
        cfg.body.at("cell").contains("labels") ? cfg.body.at("cell").at("labels").dump() : "random_signs";
    save_dataset(cfg.out_dir, ds, label_summary);
    std::cout << "wrote dataset (n=" << ds.n() << ", d=" << ds.d() << ") to " << cfg.out_dir
              << "\n";
    return 0;
}

int run_solve(const RunConfig& cfg) {
    Dataset ds = dataset_for(cfg);
    if (!ds.has_labels()) throw ConfigError("/dataset", "dataset has no labels");
    GramFactor gf(ds);
    SvmSolution sol = solve_dual(ds, gf, cfg.solver);

    json out;
    out["margin"] = sol.gamma_star;
    out["sv_count"] = sol.sv_set.size();
    out["sv_set"] = sol.sv_set;
    out["sv_boundary_count"] = sol.sv_boundary_count;
    out["beta"] = std::vector<double>(sol.beta_star.data(), sol.beta_star.data() + sol.beta_star.size());
    out["diagnostics"] = {{"sweeps", sol.diagnostics.sweeps},
                          {"max_kkt_violation", sol.diagnostics.max_kkt_violation},
                          {"converged", sol.diagnostics.converged},
                          {"separable", sol.diagnostics.separable},
                          {"polished", sol.diagnostics.polished}};
    write_json_file(cfg.out_dir / "solution.json", out);
    write_vector_csv(cfg.out_dir / "w.csv", sol.w_star);
    std::cout << "margin " << format_double(sol.gamma_star) << ", support vectors "
              << sol.sv_set.size() << "/" << ds.n() << "\n";
    return 0;
}

int run_check(const RunConfig& cfg) {
    Dataset ds = dataset_for(cfg);
    if (!ds.has_labels()) throw ConfigError("/dataset", "dataset has no labels");
    GramFactor gf(ds);
    if (gf.singular()) {
        std::cerr << "error: Gram matrix is singular; the equivalence hypotheses fail\n";
        return 2;
    }

    EquivalenceOptions opts;
    opts.run_solver = cfg.body.value("run_solver", true);
    opts.tol_amb = cfg.body.value("tol_amb", 1e-9);
    opts.solver = cfg.solver;
    opts.solver_decision_band = 10.0 * cfg.solver.tol_sv;
    EquivalenceReport report = check_equivalence(ds, gf, opts);

    bool all_sv = report.cond2_all_positive;
    std::cout << "all support vectors: " << (all_sv ? "true" : "false")
              << "  (condition2 " << report.cond2_all_positive << ", condition3 "
              << report.cond3_all_below_one;
    if (report.cond1_all_sv) std::cout << ", solver " << *report.cond1_all_sv;
    std::cout << ", ambiguous " << report.ambiguous.size() << ")\n";

    const Eigen::Index show = std::min<Eigen::Index>(report.beta.size(), 200);
    std::cout << "    i     y_i*beta_i              h_i                  s_i\n";
    for (Eigen::Index i = 0; i < show; ++i) {
        std::cout << "  " << i << "  " << format_double(report.signed_margins[i]) << "  "
                  << format_double(report.loo_stats[i]) << "  " << format_double(report.schur[i])
                  << "\n";
    }
    if (show < report.beta.size()) std::cout << "  ... (" << report.beta.size() << " rows)\n";

    json out;
    out["cond2_all_positive"] = report.cond2_all_positive;
    out["cond3_all_below_one"] = report.cond3_all_below_one;
    if (report.cond1_all_sv) out["cond1_all_sv"] = *report.cond1_all_sv;
    out["ambiguous_indices"] = report.ambiguous;
    out["signed_margins"] =
        std::vector<double>(report.signed_margins.data(), report.signed_margins.data() + report.signed_margins.size());
    out["loo_stats"] =
        std::vector<double>(report.loo_stats.data(), report.loo_stats.data() + report.loo_stats.size());
    out["schur"] = std::vector<double>(report.schur.data(), report.schur.data() + report.schur.size());
    write_json_file(cfg.out_dir / "report.json", out);
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    SweepConfig sweep = sweep_from_config(cfg);
    SweepResult result = proliferation_sweep(sweep);
    write_sweep_csv(cfg.out_dir / "sweep.csv", result);
    write_json_file(cfg.out_dir / "sweep.json", sweep_to_json(result));
    for (const CellResult& cell : result.cells) {
        std::cout << "n=" << cell.n << " d=" << cell.d << " " << cell.ensemble << "/" << cell.law
                  << ": p_hat=" << format_double(cell.p_hat) << " +-"
                  << format_double(cell.ci_halfwidth) << " (singular " << cell.singular_count
                  << ", ambiguous " << cell.ambiguous_count << ")\n";
    }
    return 0;
}

int run_converse(const RunConfig& cfg) {
    ConverseConfig probe = converse_from_config(cfg);
    auto table = converse_probe(probe);
    write_converse_csv(cfg.out_dir / "converse.csv", table);
    write_json_file(cfg.out_dir / "converse.json", converse_to_json(table));
    bool all_ok = true;
    for (const ConverseCell& cell : table) {
        all_ok = all_ok && cell.consistent;
        std::cout << "n=" << cell.n << " d=" << cell.d << ": q_hat=" << format_double(cell.q_hat)
                  << " +-" << format_double(cell.ci_halfwidth)
                  << " bound=" << format_double(cell.bound)
                  << (cell.consistent ? " ok" : " VIOLATION") << "\n";
    }
    return all_ok ? 0 : 2;
}

int run_buhot(const RunConfig& cfg) {
    BuhotConfig buhot = buhot_from_config(cfg);
    auto rows = buhot_compare(buhot);
    write_buhot_csv(cfg.out_dir / "buhot.csv", rows);
    write_json_file(cfg.out_dir / "buhot.json", buhot_to_json(rows));
    for (const BuhotRow& row : rows) {
        std::cout << "delta=" << format_double(row.delta) << " d=" << row.d
                  << ": mean sv fraction " << format_double(row.mean_sv_fraction) << " vs "
                  << format_double(row.predicted) << " (gap " << format_double(row.abs_gap)
                  << ", resamples " << row.resamples << ")\n";
    }
    return 0;
}

int run_concentration(const RunConfig& cfg) {
    const json& body = cfg.body;
    long trials = body.value("trials", 200L);
    int n = body.value("n", 40);
    if (trials < 1) throw ConfigError("/trials", "trials must be >= 1");
    if (n < 1) throw ConfigError("/n", "n must be >= 1");
    if (!body.contains("spectrum")) throw ConfigError("/spectrum", "missing required key");
    Spectrum spectrum = spectrum_from_json(body.at("spectrum"), n);
    if (spectrum.d() < n) throw ConfigError("/spectrum", "requires d >= n");

    EntryLaw law = EntryLaw::Gaussian;
    std::string law_name = body.value("law", "gaussian");
    if (law_name == "rademacher") {
        law = EntryLaw::Rademacher;
    } else if (law_name == "uniform") {
        law = EntryLaw::UniformSqrt3;
    } else if (law_name != "gaussian") {
        throw ConfigError("/law", "expected gaussian|rademacher|uniform");
    }

    ConcentrationResult result = concentration_probe(n, spectrum, law, trials, cfg.seed, cfg.workers);
    json out = concentration_to_json(result);
    write_json_file(cfg.out_dir / "concentration.json", out);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_figure1(const RunConfig& cfg) {
    Figure1Options opts = figure1_from_config(cfg);
    Figure1Result result = figure1_repro(opts);
    write_figure1_outputs(cfg.out_dir, result);
    write_json_file(cfg.out_dir / "figure1.json", figure1_to_json(result));

    for (double decay : opts.decays) {
        long total = 0, all_sv = 0, matched = 0;
        for (const Figure1Instance& inst : result.instances) {
            if (inst.decay != decay) continue;
            ++total;
            all_sv += inst.all_sv ? 1 : 0;
            matched += inst.weights_match ? 1 : 0;
        }
        std::cout << "decay " << format_double(decay) << ": " << all_sv << "/" << total
                  << " seeds with all " << opts.n << " support vectors, " << matched
                  << " with svm == interpolator\n";
    }
    return 0;
}

json bound_request(const json& req, const std::string& pointer) {
    if (!req.is_object() || !req.contains("bound")) {
        throw ConfigError(pointer, "each request needs a 'bound' name");
    }
    std::string which = req.at("bound").get<std::string>();
    json out;
    out["bound"] = which;
    if (which == "thm1") {
        BoundValue bv = thm1_bound(req.at("n").get<int>(), req.at("d2").get<double>(),
                                   req.at("d_inf").get<double>(), req.value("v", 1.0),
                                   req.value("C", 1.0), req.value("c", 1.0));
        out["value"] = bv.value;
        out["raw"] = bv.raw;
        out["clipped"] = bv.clipped;
    } else if (which == "thm2") {
        BoundValue bv = thm2_bound(req.at("n").get<int>(), req.at("d").get<int>(),
                                   req.at("d_inf").get<double>(), req.value("C", 1.0),
                                   req.value("c", 1.0));
        out["value"] = bv.value;
        out["raw"] = bv.raw;
        out["clipped"] = bv.clipped;
    } else if (which == "thm3") {
        BoundValue bv = thm3_bound(req.at("n").get<int>(), req.at("d").get<int>());
        out["value"] = bv.value;
        out["raw"] = bv.raw;
        out["clipped"] = bv.clipped;
    } else if (which == "thm4") {
        int n = req.at("n").get<int>();
        Spectrum spectrum = spectrum_from_json(req.at("spectrum"), n);
        BoundValue bv = thm4_bound(n, spectrum, req.value("c", 1.0), req.value("c_prime", 1.0));
        out["value"] = bv.value;
        out["raw"] = bv.raw;
        out["clipped"] = bv.clipped;
        out["k"] = bv.k;
        out["b"] = bv.b;
    } else if (which == "buhot") {
        BuhotFraction f = buhot_fraction(req.at("delta").get<double>());
        out["value"] = f.value;
        out["large_delta_branch"] = f.large_delta_branch;
        out["small_delta_branch"] = f.small_delta_branch;
    } else {
        throw ConfigError(pointer + "/bound", "unknown bound '" + which + "'");
    }
    return out;
}

int run_bounds(const RunConfig& cfg) {
    if (!cfg.body.contains("requests") || !cfg.body.at("requests").is_array()) {
        throw ConfigError("/requests", "bounds requires an array of requests");
    }
    json results = json::array();
    int index = 0;
    for (const json& req : cfg.body.at("requests")) {
        results.push_back(bound_request(req, "/requests/" + std::to_string(index)));
        ++index;
    }
    std::cout << results.dump(2) << "\n";
    write_json_file(cfg.out_dir / "bounds.json", results);
    return 0;
}

int dispatch(const std::string& subcommand, const CommonFlags& flags) {
    auto start = std::chrono::steady_clock::now();
    RunConfig cfg = resolve(subcommand, flags);
    std::filesystem::create_directories(cfg.out_dir);

    int code = 0;
    if (subcommand == "gen") code = run_gen(cfg);
    else if (subcommand == "solve") code = run_solve(cfg);
    else if (subcommand == "check") code = run_check(cfg);
    else if (subcommand == "sweep") code = run_sweep(cfg);
    else if (subcommand == "converse") code = run_converse(cfg);
    else if (subcommand == "buhot") code = run_buhot(cfg);
    else if (subcommand == "concentration") code = run_concentration(cfg);
    else if (subcommand == "figure1") code = run_figure1(cfg);
    else if (subcommand == "bounds") code = run_bounds(cfg);
    else throw ConfigError("/", "unknown subcommand");

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(cfg.out_dir, subcommand, cfg.echo, cfg.seed, wall);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"support-vector proliferation experiment runner"};
    app.require_subcommand(1);

    const std::vector<std::string> subcommands = {"gen",   "solve",         "check",   "sweep",
                                                  "converse", "buhot",      "concentration",
                                                  "figure1",  "bounds"};
    std::map<std::string, CommonFlags> flags;
    for (const std::string& name : subcommands) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common_options(cmd, flags[name]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::string chosen = app.get_subcommands().front()->get_name();
    try {
        return dispatch(chosen, flags[chosen]);
    } catch (const svp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const svp::InconsistencyError& e) {
        std::cerr << "internal inconsistency: " << e.what() << "\n";
        return 3;
    } catch (const svp::SingularGram& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const svp::SingularLeaveOneOut& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const svp::NotSeparable& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const svp::SingularCoordinate& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const svp::NoAdmissibleK& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
