#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pinsim/random.hpp"

namespace pinsim {

using Vec3 = Eigen::Vector3d;

/// Nanomagnet / MTJ parameters of the embedded-MRAM neuron. Magnetic
/// quantities are CGS, electrical ones SI.
struct DeviceParams {
    double saturation_magnetization = 1100.0;  // emu/cc
    double free_layer_diameter = 22.0;         // nm
    double free_layer_thickness = 2.0;         // nm
    double polarization = 0.59;
    double tmr = 1.10;                         // 110 %
    double ra_product = 9.0;                   // ohm um^2
    double damping = 0.01;                     // Gilbert alpha
    double temperature = 300.0;                // K (26.85 C)
    double vdd = 0.8;                          // V

    double volume_cm3() const;
    void validate() const;
};

/// Quantities derived once from DeviceParams.
struct DeviceConstants {
    double g_parallel = 0.0;       // S
    double g_antiparallel = 0.0;   // S
    double g0 = 0.0;               // S, (G_P + G_AP) / 2
    double n_spins = 0.0;          // Ms Vol / mu_B
    double ms_volume = 0.0;        // emu
    double gyromagnetic_ratio = 0.0;  // rad / (s Oe)
    double electron_charge = 0.0;  // C
    double kT = 0.0;               // erg
    double demag_field = 0.0;      // 4 pi Ms, Oe

    static DeviceConstants derive(const DeviceParams& params);

    /// Standard deviation (Oe) of each thermal-field component held for one step of length dt.
    double thermal_field_sigma(double damping, double dt) const;
};

namespace physical {
inline constexpr double kBohrMagneton = 9.2740100783e-21;     // erg / G
inline constexpr double kBoltzmann = 1.380649e-16;            // erg / K
inline constexpr double kElectronCharge = 1.602176634e-19;    // C
inline constexpr double kGyromagneticRatio = 1.760859630e7;   // rad / (s Oe)
}  // namespace physical

/// Unit magnetization of the free layer; x is out of plane, z lies along the
/// fixed-layer polarization.
class Magnetization {
public:
    Magnetization() : m_(0.0, 0.0, 1.0) {}
    /// Throws ContractError if |m| differs from 1 by more than 1e-9.
    explicit Magnetization(const Vec3& m);

    static Magnetization random(Rng& rng);
    /// Scales an arbitrary nonzero vector onto the unit sphere.
    static Magnetization normalized(const Vec3& v);

    const Vec3& vector() const { return m_; }
    double x() const { return m_.x(); }
    double y() const { return m_.y(); }
    double z() const { return m_.z(); }

private:
    Vec3 m_;
};

enum class TransistorModel {
    Linear,  // G_T = kappa (v - V_th) above threshold
};

struct NeuronSimConfig {
    double dt = 1e-12;                     // s
    double window = 2e-9;                  // s
    double transistor_threshold = 0.2;     // V
    TransistorModel transistor_model = TransistorModel::Linear;
    double inverter_threshold_fraction = 0.5;  // of VDD
    /// Flip the inverter sense (output high when the drain is above threshold).
    bool invert_output = false;

    std::size_t steps_per_window() const;
    void validate(const DeviceParams& params) const;
};

/// G = G0 [1 + m_z TMR / (2 + TMR)]
double mtj_conductance(double m_z, const DeviceConstants& consts, double tmr);

/// V_drain / VDD = [(2+TMR) + TMR m_z] / [(2+TMR)(1+alpha) + TMR m_z], alpha = G_T / G0.
double drain_voltage(double m_z, double alpha_ratio, double tmr);

/// Behavioral NMOS conductance: zero up to the threshold, then linear, scaled
/// so that G_T(VDD/2) = G0.
double transistor_conductance(double v_in, const NeuronSimConfig& cfg, const DeviceConstants& consts,
                              const DeviceParams& params);

/// Right-hand side of the stochastic LLG equation for a fixed total field (Oe)
/// and spin current (A).
Vec3 llg_rhs(const Vec3& m, const Vec3& field, const Vec3& spin_current, double damping,
             const DeviceConstants& consts);

/// One Heun step with a given thermal field held over the step, then renormalized.
Magnetization llg_heun_step(const Magnetization& m, const Vec3& spin_current,
                            const Vec3& thermal_field, double dt, const DeviceConstants& consts,
                            double damping);

/// One stochastic Heun step; the thermal field is drawn from `rng` (zero at T = 0).
Magnetization llg_step(const Magnetization& m, const Vec3& spin_current, double dt,
                       const DeviceConstants& consts, const DeviceParams& params, Rng& rng);

struct NeuronWindowResult {
    double mean_output = 0.0;      // time-average of the rail output, fraction of VDD
    double mean_current = 0.0;     // time-average charge current, A
    Magnetization final_state;
    std::vector<std::uint8_t> bit_trace;  // inverter output per dt step (1 = VDD)
};

/// Self-consistent neuron simulation over one observation window.
NeuronWindowResult simulate_neuron_window(double v_in, const NeuronSimConfig& cfg,
                                          const DeviceConstants& consts, const DeviceParams& params,
                                          const Magnetization& state, Rng& rng,
                                          bool keep_trace = true);

/// VDD * sigma(lambda (v - v0)), used as the behavioral neuron.
struct SigmoidFit {
    double v0 = 0.4;        // V
    double slope = 27.0;    // 1/V
    double max_residual = 0.0;  // fraction of VDD, over the fitted grid

    double probability(double v_in) const;
};

bool behavioral_neuron_sample(double v_in, const SigmoidFit& fit, Rng& rng);

struct TransferPoint {
    double v_in = 0.0;
    double mean_output = 0.0;  // fraction of VDD
    double std_output = 0.0;   // std of per-window means
    double fit_value = 0.0;
};

struct TransferCurve {
    std::vector<TransferPoint> points;
    SigmoidFit fit;
    std::size_t windows_per_point = 0;
};

/// Mean device output over `windows_per_point` consecutive windows at each grid voltage.
std::vector<TransferPoint> measure_transfer_curve(const NeuronSimConfig& cfg,
                                                  const DeviceConstants& consts,
                                                  const DeviceParams& params,
                                                  std::size_t windows_per_point,
                                                  const std::vector<double>& grid, Rng& rng);

/// Least-squares fit of sigma(lambda (v - v0)) to measured points, where
/// std_output is read as the standard error of each mean. Throws
/// Error(Runtime) if the curve decreases by more than 3 standard errors
/// between neighbours or the fit does not converge.
SigmoidFit fit_sigmoid(std::vector<TransferPoint>& points);

/// Measures the device curve on `grid` and fits it.
TransferCurve fit_transfer_curve(const NeuronSimConfig& cfg, const DeviceConstants& consts,
                                 const DeviceParams& params, std::size_t windows_per_point,
                                 const std::vector<double>& grid, Rng& rng);

/// n evenly spaced voltages from 0 to vdd inclusive.
std::vector<double> voltage_grid(double vdd, std::size_t n);

}  // namespace pinsim
