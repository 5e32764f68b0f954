#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "svp/dataset.hpp"
#include "svp/experiments.hpp"
#include "svp/spectrum.hpp"

namespace svp {

// 17-significant-digit decimal formatting; round-trips doubles bit-exactly.
std::string format_double(double v);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

// Spectrum serialization: emits the explicit {"d":, "lambda": [...]} form;
// accepts the explicit form or a named constructor
// {"kind": "isotropic"|"bilevel"|"trig", params...}.
nlohmann::json spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const nlohmann::json& j, int n_for_bilevel = 0);

// Dataset persistence: a features CSV (n x d), a labels CSV (n x 1) and a
// JSON sidecar recording the spectrum, label summary, and seed record.
void save_dataset(const std::filesystem::path& dir, const Dataset& ds,
                  const std::string& label_summary);
Dataset load_dataset(const std::filesystem::path& dir);

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
nlohmann::json sweep_to_json(const SweepResult& result);

void write_converse_csv(const std::filesystem::path& path, const std::vector<ConverseCell>& table);
nlohmann::json converse_to_json(const std::vector<ConverseCell>& table);

void write_buhot_csv(const std::filesystem::path& path, const std::vector<BuhotRow>& rows);
nlohmann::json buhot_to_json(const std::vector<BuhotRow>& rows);

nlohmann::json concentration_to_json(const ConcentrationResult& result);

void write_figure1_outputs(const std::filesystem::path& dir, const Figure1Result& result);
nlohmann::json figure1_to_json(const Figure1Result& result);

// Re-run manifest: config echo, seed, version, wall time.
void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const nlohmann::json& config_echo, std::uint64_t seed, double wall_time_s);

}  // namespace svp
