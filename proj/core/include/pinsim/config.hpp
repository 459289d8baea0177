#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinsim/circuit.hpp"
#include "pinsim/device.hpp"
#include "pinsim/mapping.hpp"
#include "pinsim/rbm.hpp"

namespace pinsim {

struct DataConfig {
    std::string mnist_dir = "data/mnist";
    int binarize_threshold = 127;
    std::size_t num_test_samples = 1000;
    bool full_test = false;  // evaluate all 10,000 test images
};

struct DeviceCurveConfig {
    std::size_t grid_points = 17;
    std::size_t windows_per_point = 1000;
};

struct RunConfig {
    std::string topology = "784x200x10";
    TrainConfig train;
    MappingConfig mapping;
    CircuitConfig circuit;  // its device and device_sim are taken from the fields below
    DeviceParams device;
    NeuronSimConfig neuron_sim;
    DataConfig data;
    DeviceCurveConfig device_curve;
    int sw_averaging_samples = 0;
    std::string model_path;  // load this checkpoint instead of training
    std::string output_dir = "runs";
    std::uint64_t seed = 1;

    NetworkTopology network() const;
    CircuitConfig circuit_config() const;
    TrainConfig train_config() const;  // rng_seed taken from seed
    std::size_t test_count() const;
    /// Field and cross-field checks (visible layer = 784 pixels, 10 classes).
    void validate() const;
};

/// Seed for an independent purpose (`tag`) derived from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const MappingConfig& c);
void from_json(const nlohmann::json& j, MappingConfig& c);
void to_json(nlohmann::json& j, const CircuitConfig& c);
void from_json(const nlohmann::json& j, CircuitConfig& c);
void to_json(nlohmann::json& j, const DeviceParams& c);
void from_json(const nlohmann::json& j, DeviceParams& c);
void to_json(nlohmann::json& j, const NeuronSimConfig& c);
void from_json(const nlohmann::json& j, NeuronSimConfig& c);
void to_json(nlohmann::json& j, const SigmoidFit& c);
void from_json(const nlohmann::json& j, SigmoidFit& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Parses and validates a config document. Missing keys keep their
/// defaults; unknown keys are a ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies "a.b.c=value" to `doc`. The value is read as JSON when it parses,
/// otherwise as a string. The path must name an existing key.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Default config, optional file, then overrides in order.
RunConfig resolve_run_config(const std::filesystem::path* file, const std::vector<std::string>& overrides);

}  // namespace pinsim
