#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "pinsim/evaluator.hpp"
#include "pinsim/mapping.hpp"
#include "pinsim/rbm.hpp"

namespace pinsim {

inline constexpr int kArtifactVersion = 1;

/// Checkpoints are JSON documents with a "format" tag and "version". Doubles
/// are written in shortest round-trip form, so load(save(x)) is bit-exact.
void save_model(const DbnModel& model, const std::filesystem::path& path);
DbnModel load_model(const std::filesystem::path& path);

void save_resistive(const ResistiveDbn& rdbn, const std::filesystem::path& path);
ResistiveDbn load_resistive(const std::filesystem::path& path);

void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

/// posWeight<k>.csv, negWeight<k>.csv, posBias<k>.csv, negBias<k>.csv for
/// k = 1..num_rbms, values in ohm with 6 significant digits.
void export_resistance_csvs(const ResistiveDbn& rdbn, const std::filesystem::path& dir);

/// Writes text atomically (temporary file + rename).
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace pinsim
