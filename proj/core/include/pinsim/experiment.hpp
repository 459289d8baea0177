#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pinsim/config.hpp"
#include "pinsim/evaluator.hpp"
#include "pinsim/mnist.hpp"

namespace pinsim {

struct ExperimentData {
    LabeledDataset train;
    LabeledDataset test;
};

/// Loads and binarizes `train_count` training and `test_count` test images.
ExperimentData load_experiment_data(const DataConfig& cfg, std::size_t train_count, std::size_t test_count);

/// Seed tags for derive_seed.
enum SeedTag : std::uint64_t { kSeedHardware = 1, kSeedSoftware = 2, kSeedVariation = 3, kSeedDevice = 4 };

DbnModel train_or_load(const RunConfig& cfg, const ExperimentData& data);

/// Maps the model and applies the configured resistance variation.
ResistiveDbn map_for_hardware(const DbnModel& model, const RunConfig& cfg);

struct ExperimentResult {
    DbnModel model;
    ResistiveDbn rdbn;
    EvalReport software;
    EvalReport hardware;
};

/// Train (or load), map, evaluate in software and hardware. When `out_dir`
/// is non-empty, writes checkpoints, result CSVs and summary.json there.
ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentData& data,
                                const std::filesystem::path& out_dir = {});

/// sample_id,label,prediction,<score columns>,cycles,energy_J
std::string results_csv(const EvalReport& report, const char* score_prefix);
nlohmann::json report_summary(const EvalReport& report);

struct SweepSpec {
    std::string parameter;  // topology, train_num, delta_r_w, Q, variation_sigma, input_noise_sigma
    std::vector<std::string> values;
    int replications = 1;
    RunConfig base;

    void validate() const;
};

struct SweepRow {
    std::string value;
    int replication = 0;
    std::uint64_t seed = 0;
    double sw_err = 0.0;
    double hw_err = 0.0;
    double hw_rmse = 0.0;
    PowerBreakdown power;
    double energy = 0.0;
    int cycles = 0;
};

struct SweepPoint {
    std::string value;
    int n = 0;
    double hw_err_mean = 0.0;
    std::optional<double> hw_err_std;  // absent for a single replication
    double sw_err_mean = 0.0;
    double power_mean = 0.0;
    double energy_mean = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepPoint> points;
};

/// Config for one sweep row: `value` applied to the base, seed of replication r.
RunConfig sweep_row_config(const SweepSpec& spec, const std::string& value, int replication);

/// One row per (value, replication). Trained models are reused across rows
/// that only change mapping or circuit parameters.
SweepResult run_sweep(const SweepSpec& spec, const ExperimentData& data, const std::filesystem::path& out_dir = {});

std::string sweep_rows_csv(const SweepSpec& spec, const SweepResult& result);
std::string sweep_points_csv(const SweepSpec& spec, const SweepResult& result);

/// Device-mode transfer curve on the configured grid; writes device_curve.csv
/// (v_in,mean_output,std,fit_value) and device_fit.json when out_dir is set.
TransferCurve run_device_curve(const RunConfig& cfg, const std::filesystem::path& out_dir = {});

}  // namespace pinsim
