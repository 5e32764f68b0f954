#include "svp/config.hpp"

#include <algorithm>
#include <fstream>

#include "svp/errors.hpp"

namespace svp {

using nlohmann::json;

namespace {

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& pointer) {
    if (!obj.is_object()) throw ConfigError(pointer, "expected a JSON object");
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            std::string message = "unknown key '" + item.key() + "'";
            std::string suggestion = nearest_key(item.key(), allowed);
            if (!suggestion.empty()) message += "; did you mean '" + suggestion + "'?";
            throw ConfigError(pointer + "/" + item.key(), message);
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& pointer) {
    if (!obj.contains(key)) throw ConfigError(pointer + "/" + key, "missing required key");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(pointer + "/" + key, "expected a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const std::string& key, const std::string& pointer,
                     double fallback) {
    return obj.contains(key) ? get_number(obj, key, pointer) : fallback;
}

long get_integer(const json& obj, const std::string& key, const std::string& pointer) {
    if (!obj.contains(key)) throw ConfigError(pointer + "/" + key, "missing required key");
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(pointer + "/" + key, "expected an integer");
    return v.get<long>();
}

long get_integer_or(const json& obj, const std::string& key, const std::string& pointer,
                    long fallback) {
    return obj.contains(key) ? get_integer(obj, key, pointer) : fallback;
}

std::string get_string(const json& obj, const std::string& key, const std::string& pointer) {
    if (!obj.contains(key)) throw ConfigError(pointer + "/" + key, "missing required key");
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(pointer + "/" + key, "expected a string");
    return v.get<std::string>();
}

void require_range(double value, double lo, double hi, const std::string& pointer,
                   const std::string& what) {
    if (!(value >= lo && value <= hi)) {
        throw ConfigError(pointer, what + " out of range [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
    }
}

SpectrumSpec spectrum_spec_from_json(const json& j, const std::string& pointer) {
    SpectrumSpec spec;
    if (!j.is_object()) throw ConfigError(pointer, "spectrum must be a JSON object");

    std::string kind = j.contains("kind") ? get_string(j, "kind", pointer)
                                          : std::string(j.contains("lambda") ? "explicit" : "");
    if (kind == "isotropic") {
        check_keys(j, {"kind", "d"}, pointer);
        spec.kind = SpectrumSpec::Kind::Isotropic;
        spec.d = static_cast<int>(get_integer(j, "d", pointer));
        if (spec.d < 1) throw ConfigError(pointer + "/d", "d must be >= 1");
    } else if (kind == "bilevel") {
        check_keys(j, {"kind", "p", "q", "r"}, pointer);
        spec.kind = SpectrumSpec::Kind::Bilevel;
        spec.p = get_number(j, "p", pointer);
        spec.q = get_number(j, "q", pointer);
        spec.r = get_number(j, "r", pointer);
        try {
            RateRegionPoint validate(spec.p, spec.q, spec.r);
            if (spec.q == 0.0) throw std::invalid_argument("q must be > 0 for the construction");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(pointer, e.what());
        }
    } else if (kind == "trig") {
        check_keys(j, {"kind", "k", "decay"}, pointer);
        spec.kind = SpectrumSpec::Kind::Trig;
        spec.k = static_cast<int>(get_integer(j, "k", pointer));
        spec.decay = get_number(j, "decay", pointer);
        if (spec.k < 1) throw ConfigError(pointer + "/k", "k must be >= 1");
    } else if (kind == "explicit") {
        check_keys(j, {"kind", "d", "lambda"}, pointer);
        if (!j.contains("lambda") || !j.at("lambda").is_array()) {
            throw ConfigError(pointer + "/lambda", "expected an array of positive weights");
        }
        auto values = j.at("lambda").get<std::vector<double>>();
        spec.kind = SpectrumSpec::Kind::Explicit;
        spec.lambda = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
        try {
            Spectrum validate(spec.lambda);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(pointer + "/lambda", e.what());
        }
        if (j.contains("d") && get_integer(j, "d", pointer) != spec.lambda.size()) {
            throw ConfigError(pointer + "/d", "d does not match the length of lambda");
        }
    } else {
        throw ConfigError(pointer, "spectrum needs a 'kind' (isotropic|bilevel|trig|explicit) "
                                   "or an explicit 'lambda' array");
    }
    return spec;
}

LabelSpec label_spec_from_json(const json& j, const std::string& pointer) {
    LabelSpec spec;
    if (!j.is_object()) throw ConfigError(pointer, "labels must be a JSON object");
    std::string kind = get_string(j, "kind", pointer);

    if (kind == "random_signs") {
        check_keys(j, {"kind"}, pointer);
        spec.kind = LabelSpec::Kind::RandomSigns;
    } else if (kind == "fixed") {
        check_keys(j, {"kind", "pattern", "values"}, pointer);
        if (j.contains("values")) {
            auto values = j.at("values").get<std::vector<double>>();
            spec.kind = LabelSpec::Kind::FixedValues;
            spec.values = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
            for (double v : values) {
                if (v != 1.0 && v != -1.0) {
                    throw ConfigError(pointer + "/values", "labels must be +1 or -1");
                }
            }
        } else {
            std::string pattern =
                j.contains("pattern") ? get_string(j, "pattern", pointer) : "ones";
            if (pattern == "ones") {
                spec.kind = LabelSpec::Kind::FixedOnes;
            } else if (pattern == "alternating") {
                spec.kind = LabelSpec::Kind::FixedAlternating;
            } else {
                throw ConfigError(pointer + "/pattern", "expected 'ones' or 'alternating'");
            }
        }
    } else if (kind == "logistic" || kind == "probit" || kind == "one_bit") {
        check_keys(j, {"kind", "w"}, pointer);
        spec.kind = kind == "logistic" ? LabelSpec::Kind::Logistic
                    : kind == "probit" ? LabelSpec::Kind::Probit
                                       : LabelSpec::Kind::OneBit;
        if (j.contains("w")) {
            auto w = j.at("w").get<std::vector<double>>();
            spec.w_explicit = true;
            spec.w = Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
        }
    } else if (kind == "multi_index") {
        check_keys(j, {"kind", "k", "link", "W"}, pointer);
        spec.kind = LabelSpec::Kind::MultiIndex;
        spec.multi_k = static_cast<int>(get_integer_or(j, "k", pointer, 2));
        if (spec.multi_k < 1) throw ConfigError(pointer + "/k", "k must be >= 1");
        std::string link = j.contains("link") ? get_string(j, "link", pointer) : "intersection";
        if (link == "intersection") {
            spec.link = MultiIndexLink::Intersection;
        } else if (link == "logistic_sum") {
            spec.link = MultiIndexLink::LogisticSum;
        } else {
            throw ConfigError(pointer + "/link", "expected 'intersection' or 'logistic_sum'");
        }
        if (j.contains("W")) {
            auto rows = j.at("W").get<std::vector<std::vector<double>>>();
            if (rows.empty()) throw ConfigError(pointer + "/W", "W must be non-empty");
            spec.W.resize(rows.size(), rows.front().size());
            for (std::size_t a = 0; a < rows.size(); ++a) {
                if (rows[a].size() != rows.front().size()) {
                    throw ConfigError(pointer + "/W", "W rows have differing lengths");
                }
                for (std::size_t b = 0; b < rows[a].size(); ++b) spec.W(a, b) = rows[a][b];
            }
            spec.multi_k = static_cast<int>(rows.size());
        }
    } else {
        throw ConfigError(pointer + "/kind",
                          "unknown label kind '" + kind +
                              "' (random_signs|fixed|logistic|probit|one_bit|multi_index)");
    }
    return spec;
}

SolverOptions solver_from_json(const json& doc, const std::string& pointer) {
    SolverOptions opts;
    if (!doc.contains("solver")) return opts;
    const json& j = doc.at("solver");
    check_keys(j, {"tol_kkt", "tol_sv", "max_sweeps", "tol_feas"}, pointer);
    opts.tol_kkt = get_number_or(j, "tol_kkt", pointer, opts.tol_kkt);
    opts.tol_sv = get_number_or(j, "tol_sv", pointer, opts.tol_sv);
    opts.tol_feas = get_number_or(j, "tol_feas", pointer, opts.tol_feas);
    opts.max_sweeps = get_integer_or(j, "max_sweeps", pointer, opts.max_sweeps);
    if (!(opts.tol_kkt > 0.0)) throw ConfigError(pointer + "/tol_kkt", "must be positive");
    if (!(opts.tol_sv > 0.0)) throw ConfigError(pointer + "/tol_sv", "must be positive");
    if (opts.max_sweeps < 1) throw ConfigError(pointer + "/max_sweeps", "must be >= 1");
    return opts;
}

const std::vector<std::string> kCommonKeys = {"seed", "workers", "out", "solver"};

std::vector<std::string> with_common(std::vector<std::string> keys) {
    keys.insert(keys.end(), kCommonKeys.begin(), kCommonKeys.end());
    return keys;
}

std::vector<std::string> body_keys_for(const std::string& subcommand) {
    if (subcommand == "sweep") return {"trials", "mode", "cells", "tol_amb"};
    if (subcommand == "converse") {
        return {"trials", "n_list", "d_over_n_list", "labels", "tol_amb"};
    }
    if (subcommand == "buhot") return {"trials", "n", "delta_list"};
    if (subcommand == "concentration") return {"trials", "n", "spectrum", "law"};
    if (subcommand == "figure1") {
        return {"seeds", "n", "k", "decays", "labels", "curve_samples", "weight_match_tol"};
    }
    if (subcommand == "gen") return {"cell"};
    if (subcommand == "solve") return {"cell", "dataset"};
    if (subcommand == "check") return {"cell", "dataset", "run_solver", "tol_amb"};
    if (subcommand == "bounds") return {"requests"};
    throw ConfigError("/", "unknown subcommand '" + subcommand + "'");
}

}  // namespace

std::string nearest_key(const std::string& unknown, const std::vector<std::string>& known) {
    std::string best;
    int best_distance = 4;  // suggest only close misses
    for (const std::string& candidate : known) {
        int distance = edit_distance(unknown, candidate);
        if (distance < best_distance) {
            best_distance = distance;
            best = candidate;
        }
    }
    return best;
}

CellSpec cell_from_json(const json& cell, const std::string& pointer) {
    check_keys(cell, {"n", "ensemble", "spectrum", "labels"}, pointer);
    CellSpec spec;
    spec.n = static_cast<int>(get_integer(cell, "n", pointer));
    if (spec.n < 1) throw ConfigError(pointer + "/n", "n must be >= 1");

    std::string ensemble = get_string(cell, "ensemble", pointer);
    if (ensemble == "gaussian") {
        spec.ensemble = EnsembleKind::Independent;
        spec.law = EntryLaw::Gaussian;
    } else if (ensemble == "rademacher") {
        spec.ensemble = EnsembleKind::Independent;
        spec.law = EntryLaw::Rademacher;
    } else if (ensemble == "uniform") {
        spec.ensemble = EnsembleKind::Independent;
        spec.law = EntryLaw::UniformSqrt3;
    } else if (ensemble == "haar") {
        spec.ensemble = EnsembleKind::Haar;
    } else if (ensemble == "trig") {
        spec.ensemble = EnsembleKind::Trig;
    } else {
        throw ConfigError(pointer + "/ensemble",
                          "unknown ensemble '" + ensemble +
                              "' (gaussian|rademacher|uniform|haar|trig)");
    }

    if (!cell.contains("spectrum")) throw ConfigError(pointer + "/spectrum", "missing required key");
    spec.spectrum = spectrum_spec_from_json(cell.at("spectrum"), pointer + "/spectrum");
    if (spec.ensemble == EnsembleKind::Trig && spec.spectrum.kind != SpectrumSpec::Kind::Trig) {
        throw ConfigError(pointer + "/spectrum", "trig ensemble requires a trig spectrum");
    }

    int d = 0;
    try {
        d = spec.spectrum.dimension(spec.n);
    } catch (const std::exception& e) {
        throw ConfigError(pointer + "/spectrum", e.what());
    }
    if (d < spec.n) {
        throw ConfigError(pointer, "cell has d = " + std::to_string(d) + " < n = " +
                                       std::to_string(spec.n) + "; all samplers require d >= n");
    }

    spec.labels = cell.contains("labels")
                      ? label_spec_from_json(cell.at("labels"), pointer + "/labels")
                      : LabelSpec{};
    if (spec.labels.kind == LabelSpec::Kind::FixedValues && spec.labels.values.size() != spec.n) {
        throw ConfigError(pointer + "/labels/values", "fixed label vector must have length n");
    }
    return spec;
}

RunConfig resolve_config(const std::string& subcommand, const json& doc, const FlagOverrides& flags) {
    check_keys(doc, with_common(body_keys_for(subcommand)), "");

    RunConfig cfg;
    cfg.subcommand = subcommand;
    cfg.seed = flags.seed.value_or(
        doc.contains("seed") ? static_cast<std::uint64_t>(get_integer(doc, "seed", "")) : RunConfig::kDefaultSeed);
    long workers = flags.workers.value_or(get_integer_or(doc, "workers", "", 1));
    if (workers < 1) throw ConfigError("/workers", "workers must be >= 1");
    cfg.workers = static_cast<int>(workers);

    cfg.solver = solver_from_json(doc, "/solver");
    if (flags.tol_kkt) {
        if (!(*flags.tol_kkt > 0.0)) throw ConfigError("/tol_kkt", "must be positive");
        cfg.solver.tol_kkt = *flags.tol_kkt;
    }
    if (flags.tol_sv) {
        if (!(*flags.tol_sv > 0.0)) throw ConfigError("/tol_sv", "must be positive");
        cfg.solver.tol_sv = *flags.tol_sv;
    }

    cfg.body = doc;
    cfg.body.erase("seed");
    cfg.body.erase("workers");
    cfg.body.erase("out");
    cfg.body.erase("solver");
    if (flags.trials) {
        if (*flags.trials < 1) throw ConfigError("/trials", "trials must be >= 1");
        cfg.body["trials"] = *flags.trials;
    }

    if (flags.out) {
        cfg.out_dir = *flags.out;
    } else if (doc.contains("out")) {
        cfg.out_dir = get_string(doc, "out", "");
    } else {
        const char* root = std::getenv("SVP_OUT_ROOT");
        cfg.out_dir = std::filesystem::path(root != nullptr ? root : "runs") / subcommand;
    }

    cfg.echo = cfg.body;
    cfg.echo["seed"] = cfg.seed;
    cfg.echo["workers"] = cfg.workers;
    cfg.echo["out"] = cfg.out_dir.string();
    cfg.echo["solver"] = {{"tol_kkt", cfg.solver.tol_kkt},
                          {"tol_sv", cfg.solver.tol_sv},
                          {"tol_feas", cfg.solver.tol_feas},
                          {"max_sweeps", cfg.solver.max_sweeps}};
    return cfg;
}

RunConfig load_config(const std::string& subcommand, const std::filesystem::path& path,
                      const FlagOverrides& flags) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("JSON parse error: ") + e.what());
    }
    return resolve_config(subcommand, doc, flags);
}

SweepConfig sweep_from_config(const RunConfig& cfg) {
    const json& body = cfg.body;
    SweepConfig sweep;
    sweep.master_seed = cfg.seed;
    sweep.workers = cfg.workers;
    sweep.solver = cfg.solver;
    sweep.trials = get_integer_or(body, "trials", "", 100);
    if (sweep.trials < 1) throw ConfigError("/trials", "trials must be >= 1");
    sweep.tol_amb = get_number_or(body, "tol_amb", "", 1e-9);

    std::string mode = body.contains("mode") ? body.at("mode").get<std::string>() : "condition2";
    if (mode == "condition2") {
        sweep.mode = EquivalenceMode::Condition2;
    } else if (mode == "condition3") {
        sweep.mode = EquivalenceMode::Condition3;
    } else if (mode == "full") {
        sweep.mode = EquivalenceMode::FullSolver;
    } else {
        throw ConfigError("/mode", "expected condition2|condition3|full");
    }

    if (!body.contains("cells") || !body.at("cells").is_array() || body.at("cells").empty()) {
        throw ConfigError("/cells", "expected a non-empty array of cells");
    }
    int index = 0;
    for (const json& cell : body.at("cells")) {
        sweep.cells.push_back(cell_from_json(cell, "/cells/" + std::to_string(index)));
        ++index;
    }
    return sweep;
}

ConverseConfig converse_from_config(const RunConfig& cfg) {
    const json& body = cfg.body;
    ConverseConfig probe;
    probe.master_seed = cfg.seed;
    probe.workers = cfg.workers;
    probe.trials = get_integer_or(body, "trials", "", 1000);
    if (probe.trials < 1) throw ConfigError("/trials", "trials must be >= 1");
    probe.tol_amb = get_number_or(body, "tol_amb", "", 1e-9);

    if (!body.contains("n_list") || !body.contains("d_over_n_list")) {
        throw ConfigError("/", "converse needs n_list and d_over_n_list");
    }
    auto n_list = body.at("n_list").get<std::vector<int>>();
    auto ratios = body.at("d_over_n_list").get<std::vector<double>>();
    for (double ratio : ratios) {
        if (!(ratio >= 1.0)) throw ConfigError("/d_over_n_list", "ratios must be >= 1 (d >= n)");
    }
    for (int n : n_list) {
        if (n < 2) throw ConfigError("/n_list", "n must be >= 2");
    }
    probe.cells = make_converse_cells(n_list, ratios);

    std::string labels = body.contains("labels") ? body.at("labels").get<std::string>() : "ones";
    if (labels == "alternating") {
        probe.alternating_labels = true;
    } else if (labels != "ones") {
        throw ConfigError("/labels", "expected 'ones' or 'alternating'");
    }
    return probe;
}

BuhotConfig buhot_from_config(const RunConfig& cfg) {
    const json& body = cfg.body;
    BuhotConfig buhot;
    buhot.master_seed = cfg.seed;
    buhot.workers = cfg.workers;
    buhot.solver = cfg.solver;
    buhot.trials = get_integer_or(body, "trials", "", 200);
    if (buhot.trials < 1) throw ConfigError("/trials", "trials must be >= 1");
    buhot.n = static_cast<int>(get_integer_or(body, "n", "", 50));
    if (buhot.n < 1) throw ConfigError("/n", "n must be >= 1");
    if (!body.contains("delta_list")) throw ConfigError("/delta_list", "missing required key");
    buhot.delta_list = body.at("delta_list").get<std::vector<double>>();
    for (double delta : buhot.delta_list) {
        if (!(delta > 0.0 && delta <= 1.0)) {
            throw ConfigError("/delta_list", "delta must be in (0, 1]; datasets require d >= n");
        }
    }
    return buhot;
}

Figure1Options figure1_from_config(const RunConfig& cfg) {
    const json& body = cfg.body;
    Figure1Options opts;
    opts.master_seed = cfg.seed;
    opts.workers = cfg.workers;
    opts.solver = cfg.solver;
    opts.num_seeds = static_cast<int>(get_integer_or(body, "seeds", "", 50));
    opts.n = static_cast<int>(get_integer_or(body, "n", "", 32));
    opts.k = static_cast<int>(get_integer_or(body, "k", "", 16384));
    opts.curve_samples = static_cast<int>(get_integer_or(body, "curve_samples", "", 512));
    opts.weight_match_tol = get_number_or(body, "weight_match_tol", "", 1e-6);
    if (opts.num_seeds < 1) throw ConfigError("/seeds", "seeds must be >= 1");
    if (opts.n < 1) throw ConfigError("/n", "n must be >= 1");
    if (2 * opts.k + 1 < opts.n) throw ConfigError("/k", "need 2k+1 >= n");
    if (opts.curve_samples < 2) throw ConfigError("/curve_samples", "need at least 2 samples");
    if (body.contains("decays")) {
        opts.decays = body.at("decays").get<std::vector<double>>();
        if (opts.decays.empty()) throw ConfigError("/decays", "must be non-empty");
    }
    if (body.contains("labels")) {
        opts.labels = label_spec_from_json(body.at("labels"), "/labels");
    }
    return opts;
}

}  // namespace svp
