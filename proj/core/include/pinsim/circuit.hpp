#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinsim/device.hpp"
#include "pinsim/mapping.hpp"
#include "pinsim/rbm.hpp"

namespace pinsim {

enum class NeuronMode { Behavioral, Device };

const char* to_string(NeuronMode mode);
NeuronMode parse_neuron_mode(const std::string& text);

struct CircuitConfig {
    double r0 = 1e3;              // ohm, amplifier input resistor
    double r1 = 5e3;              // ohm, amplifier feedback resistor
    double ri = 100e3;            // ohm, integrator
    double ci = 20e-15;           // F, integrator
    double clock_period = 2e-9;   // s
    double vdd = 0.8;             // V
    double g_load = 0.0;          // S, column termination to ground
    double input_noise_sigma = 0.0;  // V, added to amplifier outputs
    NeuronMode neuron_mode = NeuronMode::Behavioral;
    /// Spacing of independent draws in the behavioral bit stream. 100 ps is
    /// about the m_z correlation time; it comes within ~15% of the device-mode
    /// integrator spread.
    double behavioral_dt = 100e-12;
    /// Integrator level (V) above which a neuron drives the next layer high;
    /// empty means vdd / 2.
    std::optional<double> restore_threshold;
    double amp_static_power = 0.0;  // W per differential amplifier
    SigmoidFit neuron_fit;          // behavioral neuron calibration
    NeuronSimConfig device_sim;     // device-mode neuron
    DeviceParams device;

    double gain() const { return r1 / r0; }
    double time_constant() const { return ri * ci; }
    double restore_level() const;
    /// Integrator output after one clock with the neuron held high.
    double full_scale() const;
    void validate() const;
};

/// V = sum G_i V_i / (sum G_i + g_load). All-zero conductance gives 0 V and a warning.
double column_voltage(const Vector& input_voltages, const Vector& conductances, double g_load);

/// clamp((R1/R0)(v+ - v-) + vdd/2, 0, vdd)
double diff_amp_output(double v_plus, double v_minus, const CircuitConfig& cfg);

/// First-order RC response to a rail-voltage trace with spacing dt, starting
/// at 0 V; returns the voltage after the last sample. Throws ContractError
/// when dt >= RiCi.
double rc_integrator_sample(std::span<const double> trace, double dt, const CircuitConfig& cfg);
double rc_integrator_sample(std::span<const std::uint8_t> bits, double dt, const CircuitConfig& cfg);

/// Adds N(0, sigma) to each entry and clamps to [0, vdd].
Vector inject_input_noise(const Vector& amp_outputs, double sigma, double vdd, Rng& rng);

/// Mean MTJ charge current (A) of a neuron held at v_in, averaged over the
/// in-plane magnetization angle. Used for neuron power in behavioral mode.
double expected_neuron_current(double v_in, const NeuronSimConfig& sim, const DeviceConstants& consts,
                               const DeviceParams& params);

struct PowerBreakdown {
    double array = 0.0;       // W, both resistive arrays incl. bias rows and load
    double neuron = 0.0;      // W, transistor + MTJ branch
    double integrator = 0.0;  // W, RC integrator resistor
    double amplifier = 0.0;   // W, static amplifier term

    double total() const { return array + neuron + integrator + amplifier; }
    PowerBreakdown& operator+=(const PowerBreakdown& o);
};

struct LayerTrace {
    Vector v_pos;             // column voltages, positive array
    Vector v_neg;             // column voltages, negative array
    Vector amp_out;           // neuron inputs after noise
    std::vector<std::vector<std::uint8_t>> bit_streams;  // only when requested
    Vector integrator;        // volts at the sampling instant
    Vector neuron_current;    // mean MTJ current per neuron, A
    PowerBreakdown power;
};

/// Magnetization of every neuron, per layer (device mode only).
using NeuronStates = std::vector<std::vector<Magnetization>>;

NeuronStates random_neuron_states(const NetworkTopology& topology, Rng& rng);

struct LayerResult {
    BinaryState output;
    LayerTrace trace;
};

/// One clock of one RBM. The bias row is driven at vdd. `states` must hold one
/// magnetization per output in device mode and is ignored otherwise.
LayerResult evaluate_layer(const ResistiveLayer& layer, const BinaryState& input, const CircuitConfig& cfg,
                           std::vector<Magnetization>* states, Rng& rng, bool keep_bit_streams = false);

/// Static dissipation of the arrays for given inputs and column voltages,
/// plus the per-neuron and integrator terms recorded in the trace.
PowerBreakdown estimate_power(const ResistiveLayer& layer, const BinaryState& input, const LayerTrace& trace,
                              const CircuitConfig& cfg);

/// Conductance form of a layer, computed once and shared by all evaluations.
struct PreparedLayer {
    Matrix g_pos;        // n x m, S
    Matrix g_neg;
    Vector gb_pos;       // bias row, S
    Vector gb_neg;
    Vector col_sum_pos;  // sum over weight rows, excluding the bias row
    Vector col_sum_neg;

    static PreparedLayer from(const ResistiveLayer& layer);
    std::size_t n_inputs() const { return static_cast<std::size_t>(g_pos.rows()); }
    std::size_t n_outputs() const { return static_cast<std::size_t>(g_pos.cols()); }
};

struct PreparedDbn {
    NetworkTopology topology;
    std::vector<PreparedLayer> layers;

    static PreparedDbn from(const ResistiveDbn& rdbn);
};

LayerResult evaluate_layer(const PreparedLayer& layer, const BinaryState& input, const CircuitConfig& cfg,
                           std::vector<Magnetization>* states, Rng& rng, bool keep_bit_streams = false);

struct HardwareResult {
    int prediction = 0;
    Vector output_voltages;  // last-layer integrator samples
    std::vector<PowerBreakdown> layer_power;
    int cycles = 0;
    double energy = 0.0;     // J, sum of layer power x clock period
    std::vector<LayerTrace> traces;  // only when requested
};

/// Clocks a sample through every layer, feeding each layer's restored bits to the next.
HardwareResult evaluate_dbn_hardware(const ResistiveDbn& rdbn, const BinaryState& sample,
                                     const CircuitConfig& cfg, Rng& rng, bool keep_traces = false);
HardwareResult evaluate_dbn_hardware(const PreparedDbn& net, const BinaryState& sample,
                                     const CircuitConfig& cfg, Rng& rng, bool keep_traces = false);

}  // namespace pinsim
