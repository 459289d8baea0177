#include <benchmark/benchmark.h>

#include "pinsim/circuit.hpp"
#include "pinsim/device.hpp"
#include "pinsim/mapping.hpp"
#include "pinsim/rbm.hpp"

using namespace pinsim;

namespace {

RbmParams random_rbm(std::size_t nv, std::size_t nh, Rng& rng) {
    RbmParams rbm = RbmParams::zeros(nv, nh);
    rbm.weights = rbm.weights.unaryExpr([&](double) { return 0.1 * rng.normal(); });
    rbm.hidden_bias = rbm.hidden_bias.unaryExpr([&](double) { return 0.1 * rng.normal(); });
    return rbm;
}

BinaryState random_bits(std::size_t n, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform() < 0.2 ? 1.0 : 0.0;
    return BinaryState(std::move(v));
}

void BM_LlgStep(benchmark::State& state) {
    const DeviceParams p;
    const DeviceConstants c = DeviceConstants::derive(p);
    Rng rng(1);
    Magnetization m = Magnetization::random(rng);
    const Vec3 spin(0.0, 0.0, 20e-6);
    for (auto _ : state) {
        m = llg_step(m, spin, 1e-12, c, p, rng);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_LlgStep);

void BM_NeuronWindow(benchmark::State& state) {
    const DeviceParams p;
    const DeviceConstants c = DeviceConstants::derive(p);
    const NeuronSimConfig cfg;
    Rng rng(2);
    Magnetization m = Magnetization::random(rng);
    for (auto _ : state) {
        const auto r = simulate_neuron_window(0.4, cfg, c, p, m, rng, false);
        m = r.final_state;
        benchmark::DoNotOptimize(r.mean_output);
    }
}
BENCHMARK(BM_NeuronWindow);

void BM_CdStep(benchmark::State& state) {
    const auto nh = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    RbmParams rbm = random_rbm(784, nh, rng);
    const BinaryState v = random_bits(784, rng);
    for (auto _ : state) {
        const CdPhases ph = cd_phases(rbm, v, rng);
        apply_cd_update(rbm, ph, 1e-4);
        benchmark::DoNotOptimize(rbm.weights.data());
    }
}
BENCHMARK(BM_CdStep)->Arg(10)->Arg(200);

void BM_EvaluateLayer(benchmark::State& state) {
    Rng rng(4);
    DbnModel model;
    model.topology = NetworkTopology::parse("784x200");
    model.rbms.push_back(random_rbm(784, 200, rng));
    const PreparedDbn net = PreparedDbn::from(map_dbn(model, MappingConfig{}));
    const BinaryState v = random_bits(784, rng);
    CircuitConfig cfg;
    cfg.neuron_mode = state.range(0) ? NeuronMode::Device : NeuronMode::Behavioral;
    std::vector<Magnetization> states;
    if (cfg.neuron_mode == NeuronMode::Device)
        for (int i = 0; i < 200; ++i) states.push_back(Magnetization::random(rng));
    for (auto _ : state) {
        const LayerResult r = evaluate_layer(net.layers[0], v, cfg, states.empty() ? nullptr : &states, rng);
        benchmark::DoNotOptimize(r.output);
    }
}
BENCHMARK(BM_EvaluateLayer)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
