#include "svp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "svp/errors.hpp"

namespace svp {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::vector<double>> parse_csv_rows(std::istream& in, const std::string& name) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw std::runtime_error(name + ": malformed numeric field '" + field + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error(name + ": ragged CSV rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(name + ": empty CSV");
    return rows;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    auto rows = parse_csv_rows(in, path.string());
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
    Eigen::MatrixXd m = read_matrix_csv(path);
    if (m.cols() != 1) throw std::runtime_error(path.string() + ": expected a single column");
    return m.col(0);
}

json spectrum_to_json(const Spectrum& s) {
    json j;
    j["d"] = s.d();
    j["lambda"] = std::vector<double>(s.lambda().data(), s.lambda().data() + s.d());
    return j;
}

Spectrum spectrum_from_json(const json& j, int n_for_bilevel) {
    if (!j.is_object()) throw ConfigError("/spectrum", "spectrum must be a JSON object");
    if (j.contains("kind")) {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "isotropic") return Spectrum::isotropic(j.at("d").get<int>());
        if (kind == "trig") return Spectrum::trig(j.at("k").get<int>(), j.at("decay").get<double>());
        if (kind == "bilevel") {
            if (n_for_bilevel < 2) {
                throw ConfigError("/spectrum", "bilevel spectrum needs the cell's n (>= 2)");
            }
            RateRegionPoint pt(j.at("p").get<double>(), j.at("q").get<double>(),
                               j.at("r").get<double>());
            return bilevel_spectrum(pt, n_for_bilevel);
        }
        if (kind != "explicit") throw ConfigError("/spectrum/kind", "unknown spectrum kind '" + kind + "'");
    }
    auto lambda = j.at("lambda").get<std::vector<double>>();
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(lambda.data(), lambda.size());
    if (j.contains("d") && j.at("d").get<int>() != v.size()) {
        throw ConfigError("/spectrum/d", "d does not match the length of lambda");
    }
    return Spectrum(std::move(v));
}

void save_dataset(const std::filesystem::path& dir, const Dataset& ds,
                  const std::string& label_summary) {
    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "features.csv", ds.Z);
    if (ds.has_labels()) write_vector_csv(dir / "labels.csv", ds.y);

    json sidecar;
    sidecar["n"] = ds.n();
    sidecar["d"] = ds.d();
    sidecar["spectrum"] = spectrum_to_json(ds.spectrum);
    sidecar["label_model"] = label_summary;
    sidecar["seed_record"] = {{"master_seed", ds.seed_record.master_seed},
                              {"trial_index", ds.seed_record.trial_index}};
    auto out = open_out(dir / "dataset.json");
    out << sidecar.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
    auto in = open_in(dir / "dataset.json");
    json sidecar = json::parse(in);

    Dataset ds{read_matrix_csv(dir / "features.csv"),
               spectrum_from_json(sidecar.at("spectrum")), Eigen::VectorXd(), SeedRecord{}};
    if (std::filesystem::exists(dir / "labels.csv")) {
        ds.y = read_vector_csv(dir / "labels.csv");
        if (ds.y.size() != ds.Z.rows()) {
            throw std::runtime_error("load_dataset: labels length does not match features");
        }
    }
    if (sidecar.contains("seed_record")) {
        ds.seed_record.master_seed = sidecar["seed_record"].value("master_seed", 0ULL);
        ds.seed_record.trial_index = sidecar["seed_record"].value("trial_index", 0ULL);
    }
    if (ds.Z.cols() != ds.spectrum.d()) {
        throw std::runtime_error("load_dataset: spectrum dimension does not match features");
    }
    return ds;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "n,d,ensemble,law,trials,proliferation_count,singular,ambiguous,p_hat,"
           "ci_halfwidth,sv_fraction_mean,runtime_s\n";
    for (const CellResult& c : result.cells) {
        out << c.n << ',' << c.d << ',' << c.ensemble << ',' << c.law << ',' << c.trials << ','
            << c.proliferation_count << ',' << c.singular_count << ',' << c.ambiguous_count << ','
            << format_double(c.p_hat) << ',' << format_double(c.ci_halfwidth) << ','
            << format_double(c.sv_fraction_mean) << ',' << format_double(c.runtime_s) << '\n';
    }
}

json sweep_to_json(const SweepResult& result) {
    json cells = json::array();
    for (const CellResult& c : result.cells) {
        cells.push_back({{"n", c.n},
                         {"d", c.d},
                         {"ensemble", c.ensemble},
                         {"law", c.law},
                         {"trials", c.trials},
                         {"proliferation_count", c.proliferation_count},
                         {"singular", c.singular_count},
                         {"ambiguous", c.ambiguous_count},
                         {"p_hat", c.p_hat},
                         {"ci_halfwidth", c.ci_halfwidth},
                         {"sv_fraction_mean", c.sv_fraction_mean},
                         {"mean_min_ybeta", c.mean_min_ybeta},
                         {"mean_max_h", c.mean_max_h},
                         {"runtime_s", c.runtime_s}});
    }
    return json{{"cells", cells}};
}

void write_converse_csv(const std::filesystem::path& path, const std::vector<ConverseCell>& table) {
    auto out = open_out(path);
    out << "n,d,trials,nonsv_count,singular,ambiguous,q_hat,ci_halfwidth,bound,consistent\n";
    for (const ConverseCell& c : table) {
        out << c.n << ',' << c.d << ',' << c.trials << ',' << c.nonsv_count << ','
            << c.singular_count << ',' << c.ambiguous_count << ',' << format_double(c.q_hat) << ','
            << format_double(c.ci_halfwidth) << ',' << format_double(c.bound) << ','
            << (c.consistent ? 1 : 0) << '\n';
    }
}

json converse_to_json(const std::vector<ConverseCell>& table) {
    json rows = json::array();
    for (const ConverseCell& c : table) {
        rows.push_back({{"n", c.n},
                        {"d", c.d},
                        {"trials", c.trials},
                        {"nonsv_count", c.nonsv_count},
                        {"singular", c.singular_count},
                        {"ambiguous", c.ambiguous_count},
                        {"q_hat", c.q_hat},
                        {"ci_halfwidth", c.ci_halfwidth},
                        {"bound", c.bound},
                        {"consistent", c.consistent}});
    }
    return json{{"cells", rows}};
}

void write_buhot_csv(const std::filesystem::path& path, const std::vector<BuhotRow>& rows) {
    auto out = open_out(path);
    out << "delta,n,d,trials,resamples,mean_sv_fraction,predicted,abs_gap\n";
    for (const BuhotRow& r : rows) {
        out << format_double(r.delta) << ',' << r.n << ',' << r.d << ',' << r.trials << ','
            << r.resamples << ',' << format_double(r.mean_sv_fraction) << ','
            << format_double(r.predicted) << ',' << format_double(r.abs_gap) << '\n';
    }
}

json buhot_to_json(const std::vector<BuhotRow>& rows) {
    json arr = json::array();
    for (const BuhotRow& r : rows) {
        arr.push_back({{"delta", r.delta},
                       {"n", r.n},
                       {"d", r.d},
                       {"trials", r.trials},
                       {"resamples", r.resamples},
                       {"mean_sv_fraction", r.mean_sv_fraction},
                       {"predicted", r.predicted},
                       {"abs_gap", r.abs_gap}});
    }
    return json{{"rows", arr}};
}

json concentration_to_json(const ConcentrationResult& r) {
    return json{{"n", r.n},
                {"d", r.d},
                {"trials", r.trials},
                {"freq_eigmin_ge_half_l1", r.freq_eigmin_event},
                {"freq_opnorm_le_twice_l1", r.freq_opnorm_event},
                {"d2", r.d2},
                {"d_inf", r.d_inf}};
}

json figure1_to_json(const Figure1Result& result) {
    json instances = json::array();
    for (const Figure1Instance& inst : result.instances) {
        instances.push_back({{"decay", inst.decay},
                             {"seed_index", inst.seed_index},
                             {"sv_count", inst.sv_count},
                             {"all_sv", inst.all_sv},
                             {"weights_match", inst.weights_match},
                             {"rel_weight_diff", inst.rel_weight_diff},
                             {"margin", inst.margin},
                             {"lambda_d2", inst.lambda_dims.d2},
                             {"lambda_d_inf", inst.lambda_dims.d_inf},
                             {"gram_d2", inst.gram_dims.d2},
                             {"gram_d_inf", inst.gram_dims.d_inf}});
    }
    return json{{"instances", instances}};
}

void write_figure1_outputs(const std::filesystem::path& dir, const Figure1Result& result) {
    std::filesystem::create_directories(dir);

    {
        auto out = open_out(dir / "figure1_summary.csv");
        out << "decay,seed_index,sv_count,all_sv,weights_match,rel_weight_diff,margin,"
               "lambda_d2,lambda_d_inf,gram_d2,gram_d_inf\n";
        for (const Figure1Instance& inst : result.instances) {
            out << format_double(inst.decay) << ',' << inst.seed_index << ',' << inst.sv_count
                << ',' << (inst.all_sv ? 1 : 0) << ',' << (inst.weights_match ? 1 : 0) << ','
                << format_double(inst.rel_weight_diff) << ',' << format_double(inst.margin) << ','
                << format_double(inst.lambda_dims.d2) << ',' << format_double(inst.lambda_dims.d_inf)
                << ',' << format_double(inst.gram_dims.d2) << ','
                << format_double(inst.gram_dims.d_inf) << '\n';
        }
    }

    for (const Figure1Curve& curve : result.curves) {
        std::string tag = "decay" + format_double(curve.decay);
        {
            auto out = open_out(dir / ("curves_" + tag + ".csv"));
            out << "t,f_svm,f_interp\n";
            for (Eigen::Index s = 0; s < curve.t_grid.size(); ++s) {
                out << format_double(curve.t_grid[s]) << ',' << format_double(curve.f_svm[s]) << ','
                    << format_double(curve.f_interp[s]) << '\n';
            }
        }
        {
            auto out = open_out(dir / ("train_points_" + tag + ".csv"));
            out << "t,y\n";
            for (Eigen::Index i = 0; i < curve.train_t.size(); ++i) {
                out << format_double(curve.train_t[i]) << ',' << format_double(curve.train_y[i])
                    << '\n';
            }
        }
    }

    auto out = open_out(dir / "figure1.gnuplot");
    out << "# gnuplot script: decision functions of the SVM and the least-norm\n"
           "# interpolator over the input circle, training points overlaid.\n"
           "set terminal pngcairo size 1200,500\n"
           "set output 'figure1.png'\n"
           "set multiplot layout 1," << result.curves.size() << "\n";
    for (const Figure1Curve& curve : result.curves) {
        std::string tag = "decay" + format_double(curve.decay);
        out << "set title 'decay = " << format_double(curve.decay) << "'\n"
            << "set xlabel 't'\n"
            << "plot 'curves_" << tag << ".csv' using 1:2 with lines title 'svm', \\\n"
            << "     'curves_" << tag << ".csv' using 1:3 with lines title 'interpolator', \\\n"
            << "     'train_points_" << tag << ".csv' using 1:2 with points pt 2 title 'train'\n";
    }
    out << "unset multiplot\n";
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const json& config_echo, std::uint64_t seed, double wall_time_s) {
    json manifest;
    manifest["tool"] = "svp";
    manifest["version"] = "0.1.0";
    manifest["subcommand"] = subcommand;
    manifest["seed"] = seed;
    manifest["config"] = config_echo;
    manifest["wall_time_s"] = wall_time_s;
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace svp
