#include "pinsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "pinsim/error.hpp"

namespace pinsim {

const char* to_string(NeuronMode mode) {
    return mode == NeuronMode::Device ? "device" : "behavioral";
}

NeuronMode parse_neuron_mode(const std::string& text) {
    if (text == "behavioral") return NeuronMode::Behavioral;
    if (text == "device") return NeuronMode::Device;
    throw ConfigError("unknown neuron mode '" + text + "' (expected behavioral or device)");
}

double CircuitConfig::full_scale() const {
    return vdd * (1.0 - std::exp(-clock_period / time_constant()));
}

double CircuitConfig::restore_level() const {
    return restore_threshold ? *restore_threshold : 0.5 * vdd;
}

void CircuitConfig::validate() const {
    if (!(r0 > 0 && r1 > 0 && ri > 0 && ci > 0 && clock_period > 0 && vdd > 0))
        throw ConfigError("circuit resistances, capacitance, clock and vdd must be positive");
    if (!(g_load >= 0.0)) throw ConfigError("g_load must be >= 0");
    if (!(input_noise_sigma >= 0.0)) throw ConfigError("input_noise_sigma must be >= 0");
    if (!(amp_static_power >= 0.0)) throw ConfigError("amp_static_power must be >= 0");
    if (!(behavioral_dt > 0.0 && behavioral_dt < time_constant() && behavioral_dt <= clock_period))
        throw ConfigError("behavioral_dt must be positive, below RiCi and at most one clock");
    if (restore_threshold && !(*restore_threshold > 0.0 && *restore_threshold < vdd))
        throw ConfigError("restore threshold must lie strictly between the rails");
    if (!(neuron_fit.slope > 0.0)) throw ConfigError("neuron fit slope must be positive");
    if (neuron_mode == NeuronMode::Device) {
        if (std::abs(device.vdd - vdd) > 1e-12)
            throw ConfigError("device vdd must equal circuit vdd in device mode");
        NeuronSimConfig sim = device_sim;
        sim.window = clock_period;
        sim.validate(device);
        if (!(sim.dt < time_constant())) throw ConfigError("device dt must be below RiCi");
    }
}

PowerBreakdown& PowerBreakdown::operator+=(const PowerBreakdown& o) {
    array += o.array;
    neuron += o.neuron;
    integrator += o.integrator;
    amplifier += o.amplifier;
    return *this;
}

double column_voltage(const Vector& input_voltages, const Vector& conductances, double g_load) {
    require(input_voltages.size() == conductances.size(), "column inputs and conductances differ in length");
    require(g_load >= 0.0, "g_load must be >= 0");
    const double g_sum = conductances.sum();
    if (g_sum + g_load <= 0.0) {
        spdlog::warn("column with zero total conductance held at 0 V");
        return 0.0;
    }
    return conductances.dot(input_voltages) / (g_sum + g_load);
}

double diff_amp_output(double v_plus, double v_minus, const CircuitConfig& cfg) {
    return std::clamp(cfg.gain() * (v_plus - v_minus) + 0.5 * cfg.vdd, 0.0, cfg.vdd);
}

namespace {

struct Integration {
    double v = 0.0;
    double mean_power = 0.0;  // dissipated in Ri
};

template <typename Level>
Integration integrate(std::size_t n, Level level, double dt, const CircuitConfig& cfg) {
    const double tau = cfg.time_constant();
    if (!(dt > 0.0 && dt < tau)) throw ContractError("integrator step must lie in (0, RiCi)");
    const double k = dt / tau;
    Integration out;
    double energy_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double drive = level(i) - out.v;
        energy_sum += drive * drive;
        out.v += k * drive;
    }
    if (n > 0) out.mean_power = energy_sum / (cfg.ri * static_cast<double>(n));
    return out;
}

}  // namespace

double rc_integrator_sample(std::span<const double> trace, double dt, const CircuitConfig& cfg) {
    return integrate(trace.size(), [&](std::size_t i) { return trace[i]; }, dt, cfg).v;
}

double rc_integrator_sample(std::span<const std::uint8_t> bits, double dt, const CircuitConfig& cfg) {
    return integrate(bits.size(), [&](std::size_t i) { return bits[i] ? cfg.vdd : 0.0; }, dt, cfg).v;
}

Vector inject_input_noise(const Vector& amp_outputs, double sigma, double vdd, Rng& rng) {
    require(sigma >= 0.0, "noise sigma must be >= 0");
    if (sigma == 0.0) return amp_outputs;
    return amp_outputs.unaryExpr([&](double v) { return std::clamp(v + sigma * rng.normal(), 0.0, vdd); });
}

double expected_neuron_current(double v_in, const NeuronSimConfig& sim, const DeviceConstants& consts,
                               const DeviceParams& params) {
    const double alpha = transistor_conductance(v_in, sim, consts, params) / consts.g0;
    constexpr int kNodes = 64;
    double sum = 0.0;
    for (int k = 0; k < kNodes; ++k) {
        const double mz = std::cos(2.0 * std::numbers::pi * (k + 0.5) / kNodes);
        const double v_drain = drain_voltage(mz, alpha, params.tmr);
        sum += params.vdd * (1.0 - v_drain) * mtj_conductance(mz, consts, params.tmr);
    }
    return sum / kNodes;
}

PreparedLayer PreparedLayer::from(const ResistiveLayer& layer) {
    layer.validate();
    PreparedLayer p;
    p.g_pos = layer.rw_pos.cwiseInverse();
    p.g_neg = layer.rw_neg.cwiseInverse();
    p.gb_pos = layer.rb_pos.cwiseInverse();
    p.gb_neg = layer.rb_neg.cwiseInverse();
    p.col_sum_pos = p.g_pos.colwise().sum().transpose();
    p.col_sum_neg = p.g_neg.colwise().sum().transpose();
    return p;
}

PreparedDbn PreparedDbn::from(const ResistiveDbn& rdbn) {
    rdbn.validate();
    PreparedDbn p;
    p.topology = rdbn.topology;
    for (const auto& layer : rdbn.layers) p.layers.push_back(PreparedLayer::from(layer));
    return p;
}

NeuronStates random_neuron_states(const NetworkTopology& topology, Rng& rng) {
    NeuronStates states;
    for (std::size_t j = 1; j < topology.layer_sizes.size(); ++j) {
        std::vector<Magnetization> layer;
        layer.reserve(topology.layer_sizes[j]);
        for (std::size_t i = 0; i < topology.layer_sizes[j]; ++i) layer.push_back(Magnetization::random(rng));
        states.push_back(std::move(layer));
    }
    return states;
}

namespace {

// Closed-form array dissipation for rail inputs: active rows and the bias row
// sit at vdd, idle rows at 0 V, the load at 0 V.
double array_power(const Vector& active, const Vector& col_sum, const Vector& gb, const Vector& v_col,
                   double vdd, double g_load) {
    const Vector high = active + gb;
    const Vector low = col_sum - active;
    const Vector d_high = (vdd - v_col.array()).matrix();
    return (high.array() * d_high.array().square() + (low.array() + g_load) * v_col.array().square()).sum();
}

struct Columns {
    Vector active_pos;
    Vector active_neg;
    Vector v_pos;
    Vector v_neg;
};

Columns column_voltages(const PreparedLayer& layer, const BinaryState& input, const CircuitConfig& cfg) {
    Columns c;
    const Vector& bits = input.values();
    c.active_pos.noalias() = layer.g_pos.transpose() * bits;
    c.active_neg.noalias() = layer.g_neg.transpose() * bits;
    auto voltages = [&](const Vector& active, const Vector& gb, const Vector& col_sum) {
        const Vector denom = (col_sum + gb).array() + cfg.g_load;
        return Vector((cfg.vdd * (active + gb).array() / denom.array()).matrix());
    };
    c.v_pos = voltages(c.active_pos, layer.gb_pos, layer.col_sum_pos);
    c.v_neg = voltages(c.active_neg, layer.gb_neg, layer.col_sum_neg);
    return c;
}

}  // namespace

LayerResult evaluate_layer(const PreparedLayer& layer, const BinaryState& input, const CircuitConfig& cfg,
                           std::vector<Magnetization>* states, Rng& rng, bool keep_bit_streams) {
    require(input.size() == layer.n_inputs(), "layer input does not match the crossbar rows");
    const auto m = static_cast<Eigen::Index>(layer.n_outputs());
    const bool device = cfg.neuron_mode == NeuronMode::Device;
    if (device) require(states && states->size() == layer.n_outputs(), "device mode needs one state per neuron");

    Columns cols = column_voltages(layer, input, cfg);
    LayerResult r;
    LayerTrace& t = r.trace;
    t.amp_out.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) t.amp_out[j] = diff_amp_output(cols.v_pos[j], cols.v_neg[j], cfg);
    t.amp_out = inject_input_noise(t.amp_out, cfg.input_noise_sigma, cfg.vdd, rng);
    t.integrator.resize(m);
    t.neuron_current.resize(m);
    if (keep_bit_streams) t.bit_streams.resize(static_cast<std::size_t>(m));

    const DeviceConstants consts = DeviceConstants::derive(cfg.device);
    NeuronSimConfig sim = cfg.device_sim;
    sim.window = cfg.clock_period;
    const double restore = cfg.restore_level();
    Vector bits(m);
    double integrator_power = 0.0;

    for (Eigen::Index j = 0; j < m; ++j) {
        const double v_in = t.amp_out[j];
        std::vector<std::uint8_t> stream;
        double dt = 0.0;
        if (device) {
            auto& state = (*states)[static_cast<std::size_t>(j)];
            auto w = simulate_neuron_window(v_in, sim, consts, cfg.device, state, rng, true);
            state = w.final_state;
            t.neuron_current[j] = w.mean_current;
            stream = std::move(w.bit_trace);
            dt = sim.dt;
        } else {
            const auto n = static_cast<std::size_t>(std::llround(cfg.clock_period / cfg.behavioral_dt));
            const double p = cfg.neuron_fit.probability(v_in);
            stream.resize(n);
            for (auto& b : stream) b = rng.uniform() < p ? 1 : 0;
            t.neuron_current[j] = expected_neuron_current(v_in, sim, consts, cfg.device);
            dt = cfg.clock_period / static_cast<double>(n);
        }
        const auto integ = integrate(stream.size(), [&](std::size_t i) { return stream[i] ? cfg.vdd : 0.0; },
                                     dt, cfg);
        t.integrator[j] = integ.v;
        integrator_power += integ.mean_power;
        bits[j] = integ.v > restore ? 1.0 : 0.0;
        if (keep_bit_streams) t.bit_streams[static_cast<std::size_t>(j)] = std::move(stream);
    }

    t.v_pos = std::move(cols.v_pos);
    t.v_neg = std::move(cols.v_neg);
    t.power.array = array_power(cols.active_pos, layer.col_sum_pos, layer.gb_pos, t.v_pos, cfg.vdd, cfg.g_load) +
                    array_power(cols.active_neg, layer.col_sum_neg, layer.gb_neg, t.v_neg, cfg.vdd, cfg.g_load);
    t.power.neuron = cfg.device.vdd * t.neuron_current.sum();
    t.power.integrator = integrator_power;
    t.power.amplifier = cfg.amp_static_power * static_cast<double>(m);
    r.output = BinaryState(std::move(bits));
    return r;
}

LayerResult evaluate_layer(const ResistiveLayer& layer, const BinaryState& input, const CircuitConfig& cfg,
                           std::vector<Magnetization>* states, Rng& rng, bool keep_bit_streams) {
    return evaluate_layer(PreparedLayer::from(layer), input, cfg, states, rng, keep_bit_streams);
}

PowerBreakdown estimate_power(const ResistiveLayer& layer, const BinaryState& input, const LayerTrace& trace,
                              const CircuitConfig& cfg) {
    const PreparedLayer p = PreparedLayer::from(layer);
    require(input.size() == p.n_inputs(), "layer input does not match the crossbar rows");
    require(trace.v_pos.size() == static_cast<Eigen::Index>(p.n_outputs()) &&
                trace.v_neg.size() == trace.v_pos.size(),
            "trace does not match the layer");
    const Vector active_pos = p.g_pos.transpose() * input.values();
    const Vector active_neg = p.g_neg.transpose() * input.values();
    PowerBreakdown out;
    out.array = array_power(active_pos, p.col_sum_pos, p.gb_pos, trace.v_pos, cfg.vdd, cfg.g_load) +
                array_power(active_neg, p.col_sum_neg, p.gb_neg, trace.v_neg, cfg.vdd, cfg.g_load);
    out.neuron = cfg.device.vdd * trace.neuron_current.sum();
    out.integrator = trace.power.integrator;
    out.amplifier = cfg.amp_static_power * static_cast<double>(p.n_outputs());
    return out;
}

HardwareResult evaluate_dbn_hardware(const PreparedDbn& net, const BinaryState& sample,
                                     const CircuitConfig& cfg, Rng& rng, bool keep_traces) {
    require(sample.size() == net.topology.num_visible(), "sample does not match the visible layer");
    NeuronStates states;
    if (cfg.neuron_mode == NeuronMode::Device) states = random_neuron_states(net.topology, rng);

    HardwareResult out;
    BinaryState x = sample;
    for (std::size_t j = 0; j < net.layers.size(); ++j) {
        auto* layer_states = states.empty() ? nullptr : &states[j];
        LayerResult lr = evaluate_layer(net.layers[j], x, cfg, layer_states, rng, keep_traces);
        out.layer_power.push_back(lr.trace.power);
        out.energy += lr.trace.power.total() * cfg.clock_period;
        ++out.cycles;
        if (j + 1 == net.layers.size()) out.output_voltages = lr.trace.integrator;
        x = std::move(lr.output);
        if (keep_traces) out.traces.push_back(std::move(lr.trace));
    }
    out.prediction = argmax(out.output_voltages);
    return out;
}

HardwareResult evaluate_dbn_hardware(const ResistiveDbn& rdbn, const BinaryState& sample,
                                     const CircuitConfig& cfg, Rng& rng, bool keep_traces) {
    return evaluate_dbn_hardware(PreparedDbn::from(rdbn), sample, cfg, rng, keep_traces);
}

}  // namespace pinsim
