#include "svp/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "svp/bounds.hpp"
#include "svp/errors.hpp"

namespace svp {

namespace {

// Tasks are indexed deterministically and write into preallocated slots, so
// the merged result is identical for any worker count or schedule.
void parallel_for(long count, int workers, const std::function<void(long)>& body) {
    if (workers <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto run = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    int spawn = static_cast<int>(std::min<long>(workers, count));
    pool.reserve(spawn);
    for (int w = 0; w < spawn; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct TrialOutcome {
    enum class Verdict { Proliferated, NotProliferated, Singular, NoVerdict };
    Verdict verdict = Verdict::NoVerdict;
    double min_ybeta = std::numeric_limits<double>::quiet_NaN();
    double max_h = std::numeric_limits<double>::quiet_NaN();
    double sv_fraction = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

TrialOutcome evaluate_trial(const CellSpec& cell, std::uint64_t cell_master, long trial,
                            EquivalenceMode mode, const SolverOptions& solver, double tol_amb) {
    auto start = std::chrono::steady_clock::now();
    TrialOutcome out;
    try {
        SeedRecord seed{cell_master, static_cast<std::uint64_t>(trial)};
        Dataset ds = cell.generate(seed);
        GramFactor gf(ds);
        if (gf.singular()) {
            out.verdict = TrialOutcome::Verdict::Singular;
        } else if (mode == EquivalenceMode::FullSolver) {
            EquivalenceOptions eq;
            eq.tol_amb = tol_amb;
            eq.run_solver = true;
            eq.solver = solver;
            eq.solver_decision_band = 10.0 * solver.tol_sv;
            EquivalenceReport report = check_equivalence(ds, gf, eq);
            out.min_ybeta = report.signed_margins.minCoeff();
            out.max_h = report.loo_stats.maxCoeff();
            out.sv_fraction = static_cast<double>(report.solution->sv_set.size()) / cell.n;
            if (report.is_ambiguous()) {
                out.verdict = TrialOutcome::Verdict::NoVerdict;
            } else {
                out.verdict = report.cond2_all_positive ? TrialOutcome::Verdict::Proliferated
                                                        : TrialOutcome::Verdict::NotProliferated;
            }
        } else if (mode == EquivalenceMode::Condition3) {
            LooStats stats = loo_statistics(ds, gf);
            out.max_h = stats.h.maxCoeff();
            long below = (stats.h.array() < 1.0).count();
            out.sv_fraction = static_cast<double>(below) / cell.n;
            bool ambiguous = ((stats.h.array() - 1.0).abs() <= tol_amb).any();
            if (ambiguous) {
                out.verdict = TrialOutcome::Verdict::NoVerdict;
            } else {
                out.verdict = below == cell.n ? TrialOutcome::Verdict::Proliferated
                                              : TrialOutcome::Verdict::NotProliferated;
            }
        } else {
            Eigen::VectorXd beta = gf.solve(ds.y);
            Eigen::VectorXd margins = (ds.y.array() * beta.array()).matrix();
            double beta_inf = beta.cwiseAbs().maxCoeff();
            out.min_ybeta = margins.minCoeff();
            long positive = (margins.array() > 0.0).count();
            out.sv_fraction = static_cast<double>(positive) / cell.n;
            bool ambiguous = (margins.array().abs() <= tol_amb * beta_inf).any();
            if (ambiguous) {
                out.verdict = TrialOutcome::Verdict::NoVerdict;
            } else {
                out.verdict = positive == cell.n ? TrialOutcome::Verdict::Proliferated
                                                 : TrialOutcome::Verdict::NotProliferated;
            }
        }
    } catch (const SingularGram&) {
        out.verdict = TrialOutcome::Verdict::Singular;
    } catch (const SingularLeaveOneOut&) {
        out.verdict = TrialOutcome::Verdict::Singular;
    } catch (const NotSeparable&) {
        out.verdict = TrialOutcome::Verdict::NoVerdict;
    } catch (const SingularCoordinate&) {
        out.verdict = TrialOutcome::Verdict::Singular;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace

std::string to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Independent: return "independent";
        case EnsembleKind::Haar: return "haar";
        case EnsembleKind::Trig: return "trig";
    }
    return "unknown";
}

std::string to_string(EquivalenceMode mode) {
    switch (mode) {
        case EquivalenceMode::Condition2: return "condition2";
        case EquivalenceMode::Condition3: return "condition3";
        case EquivalenceMode::FullSolver: return "full";
    }
    return "unknown";
}

Spectrum SpectrumSpec::resolve(int n) const {
    switch (kind) {
        case Kind::Isotropic: return Spectrum::isotropic(d);
        case Kind::Bilevel: return bilevel_spectrum(RateRegionPoint(p, q, r), n);
        case Kind::Trig: return Spectrum::trig(k, decay);
        case Kind::Explicit: return Spectrum(lambda);
    }
    throw std::logic_error("SpectrumSpec: unknown kind");
}

int SpectrumSpec::dimension(int n) const {
    switch (kind) {
        case Kind::Isotropic: return d;
        case Kind::Bilevel:
            return static_cast<int>(std::floor(std::pow(static_cast<double>(n), p)));
        case Kind::Trig: return 2 * k + 1;
        case Kind::Explicit: return static_cast<int>(lambda.size());
    }
    throw std::logic_error("SpectrumSpec: unknown kind");
}

LabelModel LabelSpec::resolve(int n, int d, const SeedRecord& seed) const {
    switch (kind) {
        case Kind::RandomSigns: return LabelModel::random_signs();
        case Kind::FixedOnes: return LabelModel::fixed(Eigen::VectorXd::Ones(n));
        case Kind::FixedAlternating: {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
            return LabelModel::fixed(std::move(v));
        }
        case Kind::FixedValues: return LabelModel::fixed(values);
        case Kind::Logistic:
        case Kind::Probit:
        case Kind::OneBit: {
            Eigen::VectorXd weight;
            if (w_explicit) {
                weight = w;
            } else {
                auto rng = make_stream(seed, "label_params");
                std::normal_distribution<double> normal(0.0, 1.0);
                weight.resize(d);
                for (int j = 0; j < d; ++j) weight[j] = normal(rng);
            }
            if (kind == Kind::Logistic) return LabelModel::logistic(std::move(weight));
            if (kind == Kind::Probit) return LabelModel::probit(std::move(weight));
            return LabelModel::one_bit(std::move(weight));
        }
        case Kind::MultiIndex: {
            Eigen::MatrixXd Wm;
            if (W.size() > 0) {
                Wm = W;
            } else {
                auto rng = make_stream(seed, "label_params");
                std::normal_distribution<double> normal(0.0, 1.0);
                Wm.resize(multi_k, d);
                for (int a = 0; a < multi_k; ++a)
                    for (int j = 0; j < d; ++j) Wm(a, j) = normal(rng);
            }
            return LabelModel::multi_index(std::move(Wm), link);
        }
    }
    throw std::logic_error("LabelSpec: unknown kind");
}

Dataset CellSpec::generate(const SeedRecord& seed) const {
    if (ensemble == EnsembleKind::Trig) {
        if (spectrum.kind != SpectrumSpec::Kind::Trig) {
            throw std::invalid_argument("CellSpec: trig ensemble requires a trig spectrum");
        }
        LabelModel lm = labels.resolve(n, 2 * spectrum.k + 1, seed);
        return trig_dataset(n, spectrum.k, spectrum.decay, lm, seed);
    }
    Spectrum spec = spectrum.resolve(n);
    Dataset ds = ensemble == EnsembleKind::Haar ? sample_haar(n, spec, seed)
                                                : sample_independent(n, spec, law, seed);
    apply_labels(ds, labels.resolve(n, ds.d(), seed));
    return ds;
}

double wilson_halfwidth(long successes, long trials) {
    if (trials <= 0) return std::numeric_limits<double>::quiet_NaN();
    constexpr double z = 1.959963984540054;  // 97.5% standard normal quantile
    double m = static_cast<double>(trials);
    double p = static_cast<double>(successes) / m;
    double denom = 1.0 + z * z / m;
    return z * std::sqrt(p * (1.0 - p) / m + z * z / (4.0 * m * m)) / denom;
}

SweepResult proliferation_sweep(const SweepConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("proliferation_sweep: trials must be >= 1");
    const auto num_cells = static_cast<long>(cfg.cells.size());
    const long total_tasks = num_cells * cfg.trials;

    std::vector<TrialOutcome> outcomes(total_tasks);
    parallel_for(total_tasks, cfg.workers, [&](long task) {
        long cell_idx = task / cfg.trials;
        long trial = task % cfg.trials;
        std::uint64_t cell_master = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(cell_idx));
        outcomes[task] =
            evaluate_trial(cfg.cells[cell_idx], cell_master, trial, cfg.mode, cfg.solver, cfg.tol_amb);
    });

    SweepResult result;
    result.cells.reserve(num_cells);
    for (long c = 0; c < num_cells; ++c) {
        const CellSpec& cell = cfg.cells[c];
        CellResult row;
        row.n = cell.n;
        row.d = cell.dimension();
        row.ensemble = to_string(cell.ensemble);
        row.law = cell.ensemble == EnsembleKind::Independent ? to_string(cell.law) : "-";
        row.trials = cfg.trials;

        long decided = 0;
        double sum_sv = 0.0, sum_min = 0.0, sum_max_h = 0.0;
        long n_sv = 0, n_min = 0, n_max_h = 0;
        for (long t = 0; t < cfg.trials; ++t) {
            const TrialOutcome& out = outcomes[c * cfg.trials + t];
            row.runtime_s += out.seconds;
            switch (out.verdict) {
                case TrialOutcome::Verdict::Proliferated:
                    ++row.proliferation_count;
                    ++decided;
                    break;
                case TrialOutcome::Verdict::NotProliferated:
                    ++decided;
                    break;
                case TrialOutcome::Verdict::Singular:
                    ++row.singular_count;
                    break;
                case TrialOutcome::Verdict::NoVerdict:
                    ++row.ambiguous_count;
                    break;
            }
            if (!std::isnan(out.sv_fraction)) { sum_sv += out.sv_fraction; ++n_sv; }
            if (!std::isnan(out.min_ybeta)) { sum_min += out.min_ybeta; ++n_min; }
            if (!std::isnan(out.max_h)) { sum_max_h += out.max_h; ++n_max_h; }
        }
        row.p_hat = decided > 0
                        ? static_cast<double>(row.proliferation_count) / static_cast<double>(decided)
                        : std::numeric_limits<double>::quiet_NaN();
        row.ci_halfwidth = wilson_halfwidth(row.proliferation_count, decided);
        row.sv_fraction_mean = n_sv > 0 ? sum_sv / n_sv : std::numeric_limits<double>::quiet_NaN();
        row.mean_min_ybeta = n_min > 0 ? sum_min / n_min : std::numeric_limits<double>::quiet_NaN();
        row.mean_max_h = n_max_h > 0 ? sum_max_h / n_max_h : std::numeric_limits<double>::quiet_NaN();
        result.cells.push_back(std::move(row));
    }
    return result;
}

std::vector<std::pair<int, int>> make_converse_cells(const std::vector<int>& n_list,
                                                     const std::vector<double>& d_over_n_list) {
    std::vector<std::pair<int, int>> cells;
    for (int n : n_list) {
        for (double ratio : d_over_n_list) {
            int d = static_cast<int>(std::llround(ratio * n));
            cells.emplace_back(n, d);
        }
    }
    return cells;
}

std::vector<ConverseCell> converse_probe(const ConverseConfig& cfg) {
    SweepConfig sweep;
    sweep.trials = cfg.trials;
    sweep.master_seed = cfg.master_seed;
    sweep.workers = cfg.workers;
    sweep.mode = EquivalenceMode::Condition2;
    sweep.tol_amb = cfg.tol_amb;
    for (auto [n, d] : cfg.cells) {
        if (d < n || n < 2) {
            throw std::invalid_argument("converse_probe: cells require d >= n >= 2");
        }
        CellSpec cell;
        cell.n = n;
        cell.ensemble = EnsembleKind::Independent;
        cell.law = EntryLaw::Gaussian;
        cell.spectrum.kind = SpectrumSpec::Kind::Isotropic;
        cell.spectrum.d = d;
        cell.labels.kind =
            cfg.alternating_labels ? LabelSpec::Kind::FixedAlternating : LabelSpec::Kind::FixedOnes;
        sweep.cells.push_back(std::move(cell));
    }

    SweepResult swept = proliferation_sweep(sweep);
    std::vector<ConverseCell> table;
    table.reserve(swept.cells.size());
    for (const CellResult& row : swept.cells) {
        ConverseCell cell;
        cell.n = row.n;
        cell.d = row.d;
        cell.trials = row.trials;
        cell.singular_count = row.singular_count;
        cell.ambiguous_count = row.ambiguous_count;
        long decided = row.trials - row.singular_count - row.ambiguous_count;
        cell.nonsv_count = decided - row.proliferation_count;
        cell.q_hat = decided > 0 ? static_cast<double>(cell.nonsv_count) / decided
                                 : std::numeric_limits<double>::quiet_NaN();
        cell.ci_halfwidth = wilson_halfwidth(cell.nonsv_count, decided);
        cell.bound = thm3_bound(cell.n, cell.d).value;
        cell.consistent = decided > 0 && cell.q_hat + cell.ci_halfwidth >= cell.bound;
        table.push_back(cell);
    }
    return table;
}

ConcentrationResult concentration_probe(int n, const Spectrum& spectrum, EntryLaw law,
                                        long trials, std::uint64_t master_seed, int workers) {
    if (trials < 1) throw std::invalid_argument("concentration_probe: trials must be >= 1");
    const double l1 = spectrum.l1();

    std::vector<unsigned char> eigmin_hit(trials, 0);
    std::vector<unsigned char> opnorm_hit(trials, 0);
    parallel_for(trials, workers, [&](long t) {
        SeedRecord seed{master_seed, static_cast<std::uint64_t>(t)};
        Dataset ds = sample_independent(n, spectrum, law, seed);
        GramFactor gf(ds);
        eigmin_hit[t] = gf.eigmin() >= 0.5 * l1 ? 1 : 0;
        opnorm_hit[t] = gf.op_norm() <= 2.0 * l1 ? 1 : 0;
    });

    ConcentrationResult res;
    res.n = n;
    res.d = spectrum.d();
    res.trials = trials;
    long e = 0, o = 0;
    for (long t = 0; t < trials; ++t) {
        e += eigmin_hit[t];
        o += opnorm_hit[t];
    }
    res.freq_eigmin_event = static_cast<double>(e) / trials;
    res.freq_opnorm_event = static_cast<double>(o) / trials;
    EffectiveDims dims = effective_dims(spectrum);
    res.d2 = dims.d2;
    res.d_inf = dims.d_inf;
    return res;
}

std::vector<BuhotRow> buhot_compare(const BuhotConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("buhot_compare: trials must be >= 1");

    std::vector<BuhotRow> rows(cfg.delta_list.size());
    for (std::size_t di = 0; di < cfg.delta_list.size(); ++di) {
        double delta = cfg.delta_list[di];
        if (!(delta > 0.0) || delta > 1.0) {
            throw std::invalid_argument(
                "buhot_compare: delta must be in (0, 1]; d >= n is required of every dataset");
        }
        int d = std::max(cfg.n, static_cast<int>(std::llround(cfg.n / delta)));
        Spectrum spectrum = Spectrum::isotropic(d);
        std::uint64_t delta_master = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(di));

        std::vector<double> fractions(cfg.trials, std::numeric_limits<double>::quiet_NaN());
        std::vector<long> resamples(cfg.trials, 0);
        parallel_for(cfg.trials, cfg.workers, [&](long t) {
            constexpr int kMaxAttempts = 16;
            for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
                SeedRecord seed{delta_master,
                                static_cast<std::uint64_t>(t) * kMaxAttempts + attempt};
                Dataset ds = sample_independent(cfg.n, spectrum, EntryLaw::Gaussian, seed);
                apply_labels(ds, LabelModel::random_signs());
                GramFactor gf(ds);
                try {
                    SvmSolution sol = solve_dual(ds, gf, cfg.solver);
                    if (!sol.diagnostics.converged) {
                        ++resamples[t];
                        continue;
                    }
                    fractions[t] = static_cast<double>(sol.sv_set.size()) / cfg.n;
                    return;
                } catch (const NotSeparable&) {
                    ++resamples[t];
                }
            }
        });

        BuhotRow& row = rows[di];
        row.delta = delta;
        row.n = cfg.n;
        row.d = d;
        row.trials = cfg.trials;
        double sum = 0.0;
        long have = 0;
        for (long t = 0; t < cfg.trials; ++t) {
            row.resamples += resamples[t];
            if (!std::isnan(fractions[t])) {
                sum += fractions[t];
                ++have;
            }
        }
        row.mean_sv_fraction = have > 0 ? sum / have : std::numeric_limits<double>::quiet_NaN();
        row.predicted = buhot_fraction(delta).value;
        row.abs_gap = std::abs(row.mean_sv_fraction - row.predicted);
    }
    return rows;
}

Figure1Result figure1_repro(const Figure1Options& opts) {
    const auto num_decays = static_cast<long>(opts.decays.size());
    const long total = num_decays * opts.num_seeds;

    struct Slot {
        Figure1Instance instance;
        Figure1Curve curve;
        bool has_curve = false;
        bool valid = false;
    };
    std::vector<Slot> slots(total);

    parallel_for(total, opts.workers, [&](long task) {
        long decay_idx = task / opts.num_seeds;
        int seed_idx = static_cast<int>(task % opts.num_seeds);
        double decay = opts.decays[decay_idx];

        SeedRecord seed{mix_seed(opts.master_seed, static_cast<std::uint64_t>(decay_idx)),
                        static_cast<std::uint64_t>(seed_idx)};
        Eigen::VectorXd t_inputs;
        LabelModel lm = opts.labels.resolve(opts.n, 2 * opts.k + 1, seed);
        Dataset ds = trig_dataset(opts.n, opts.k, decay, lm, seed, &t_inputs);
        GramFactor gf(ds);

        Slot& slot = slots[task];
        Figure1Instance& inst = slot.instance;
        inst.decay = decay;
        inst.seed_index = seed_idx;
        inst.lambda_dims = effective_dims(ds.spectrum);
        inst.gram_dims = gf.effective_dims();
        if (gf.singular()) return;  // skipped instance, left invalid

        RidgelessSolution interp = ridgeless(ds, gf);
        SvmSolution sol = solve_dual(ds, gf, opts.solver);

        inst.sv_count = static_cast<int>(sol.sv_set.size());
        inst.all_sv = inst.sv_count == opts.n;
        double ref = interp.w.norm();
        inst.rel_weight_diff = ref > 0.0 ? (sol.w_star - interp.w).norm() / ref : 0.0;
        inst.weights_match = inst.rel_weight_diff <= opts.weight_match_tol;
        inst.margin = sol.gamma_star;
        slot.valid = true;

        if (seed_idx == 0) {
            Figure1Curve& curve = slot.curve;
            curve.decay = decay;
            curve.seed_index = seed_idx;
            curve.t_grid.resize(opts.curve_samples);
            curve.f_svm.resize(opts.curve_samples);
            curve.f_interp.resize(opts.curve_samples);
            Eigen::VectorXd sqrt_lambda = ds.spectrum.lambda().array().sqrt();
            for (int s = 0; s < opts.curve_samples; ++s) {
                double t = 2.0 * std::numbers::pi * s / opts.curve_samples;
                Eigen::VectorXd phi =
                    (sqrt_lambda.array() * trig_feature_row(t, opts.k).array()).matrix();
                curve.t_grid[s] = t;
                curve.f_svm[s] = sol.w_star.dot(phi);
                curve.f_interp[s] = interp.w.dot(phi);
            }
            curve.train_t = t_inputs;
            curve.train_y = ds.y;
            slot.has_curve = true;
        }
    });

    Figure1Result result;
    for (const Slot& slot : slots) {
        if (slot.valid) result.instances.push_back(slot.instance);
        if (slot.has_curve) result.curves.push_back(slot.curve);
    }
    return result;
}

}  // namespace svp
