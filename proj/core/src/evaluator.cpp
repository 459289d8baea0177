#include "pinsim/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "pinsim/error.hpp"

namespace pinsim {

PowerBreakdown EvalReport::total_power() const {
    PowerBreakdown p;
    for (const auto& l : layer_power) p += l;
    return p;
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("PINSIM_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) throw ConfigError("PINSIM_WORKERS must be a positive integer");
        return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = default_worker_count();
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

std::size_t resolve_count(const LabeledDataset& data, std::size_t count) {
    if (count == 0) count = data.size();
    require(count >= 1 && count <= data.size(), "evaluation count exceeds the dataset");
    return count;
}

void finish(EvalReport& r, std::size_t num_classes) {
    std::vector<int> pred, labels;
    std::vector<Vector> scores;
    for (const auto& rec : r.records) {
        pred.push_back(rec.prediction);
        labels.push_back(rec.label);
        scores.push_back(rec.scores);
    }
    r.metrics = compute_metrics(pred, scores, labels, num_classes);
    r.confusion = confusion_matrix(pred, labels, num_classes);
}

}  // namespace

EvalReport evaluate_software(const DbnModel& model, const LabeledDataset& data, std::size_t count,
                             int averaging_samples, std::uint64_t seed, std::size_t workers) {
    model.validate();
    count = resolve_count(data, count);
    EvalReport r;
    r.records.resize(count);
    parallel_for(count, workers, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        Vector s = software_infer(model, data.images[i], averaging_samples, rng);
        r.records[i] = SampleRecord{i, data.labels[i], argmax(s), std::move(s), 0, 0.0};
    });
    finish(r, model.topology.num_outputs());
    return r;
}

EvalReport evaluate_hardware(const ResistiveDbn& rdbn, const LabeledDataset& data, std::size_t count,
                             const CircuitConfig& cfg, std::uint64_t seed, std::size_t workers) {
    cfg.validate();
    const PreparedDbn net = PreparedDbn::from(rdbn);
    count = resolve_count(data, count);
    EvalReport r;
    r.records.resize(count);
    std::vector<std::vector<PowerBreakdown>> power(count);
    parallel_for(count, workers, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        HardwareResult hw = evaluate_dbn_hardware(net, data.images[i], cfg, rng);
        r.records[i] = SampleRecord{i, data.labels[i], hw.prediction, hw.output_voltages, hw.cycles, hw.energy};
        power[i] = std::move(hw.layer_power);
    });

    const double n = static_cast<double>(count);
    r.layer_power.assign(net.layers.size(), PowerBreakdown{});
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < net.layers.size(); ++j) r.layer_power[j] += power[i][j];
        r.energy += r.records[i].energy / n;
    }
    for (auto& p : r.layer_power) {
        p.array /= n;
        p.neuron /= n;
        p.integrator /= n;
        p.amplifier /= n;
    }
    r.cycles = r.records.front().cycles;

    // Metrics read the scaled scores; records keep volts for the CSV.
    EvalReport scaled = r;
    const double fs = cfg.full_scale();
    for (auto& rec : scaled.records) rec.scores = (rec.scores / fs).cwiseMax(0.0).cwiseMin(1.0);
    finish(scaled, rdbn.topology.num_outputs());
    r.metrics = scaled.metrics;
    r.confusion = std::move(scaled.confusion);
    return r;
}

}  // namespace pinsim
