#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pinsim/circuit.hpp"
#include "pinsim/metrics.hpp"
#include "pinsim/mnist.hpp"

namespace pinsim {

struct SampleRecord {
    std::size_t sample_id = 0;
    int label = 0;
    int prediction = 0;
    Vector scores;        // software: top activations; hardware: integrator volts
    int cycles = 0;
    double energy = 0.0;  // J
};

struct EvalReport {
    Metrics metrics;
    ConfusionMatrix confusion;
    std::vector<PowerBreakdown> layer_power;  // mean over samples
    double energy = 0.0;                      // J per inference, mean over samples
    int cycles = 0;
    std::vector<SampleRecord> records;

    PowerBreakdown total_power() const;
};

/// Worker count from PINSIM_WORKERS, else the hardware concurrency.
std::size_t default_worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Exceptions are
/// rethrown on the caller after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

/// Software classification of the first `count` samples (0 = all).
/// averaging_samples as in software_infer; sample i uses stream (seed, i).
EvalReport evaluate_software(const DbnModel& model, const LabeledDataset& data, std::size_t count,
                             int averaging_samples, std::uint64_t seed, std::size_t workers = 0);

/// Circuit-level classification. RMSE uses integrator volts scaled by the
/// one-clock full-scale level and clipped to [0, 1].
EvalReport evaluate_hardware(const ResistiveDbn& rdbn, const LabeledDataset& data, std::size_t count,
                             const CircuitConfig& cfg, std::uint64_t seed, std::size_t workers = 0);

}  // namespace pinsim
