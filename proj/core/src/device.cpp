#include "pinsim/device.hpp"

#include <cmath>
#include <numbers>

#include "pinsim/error.hpp"
#include "pinsim/math.hpp"

namespace pinsim {

double DeviceParams::volume_cm3() const {
    const double r = 0.5 * free_layer_diameter;
    return std::numbers::pi * r * r * free_layer_thickness * 1e-21;  // nm^3 -> cm^3
}

void DeviceParams::validate() const {
    if (!(saturation_magnetization > 0 && free_layer_diameter > 0 && free_layer_thickness > 0 &&
          tmr > 0 && ra_product > 0 && damping > 0 && temperature >= 0 && vdd > 0))
        throw ConfigError("device parameters must be positive");
    if (!(polarization > 0.0 && polarization <= 1.0))
        throw ConfigError("polarization must lie in (0, 1]");
}

DeviceConstants DeviceConstants::derive(const DeviceParams& p) {
    p.validate();
    DeviceConstants c;
    const double r_um = 0.5 * p.free_layer_diameter * 1e-3;
    const double area_um2 = std::numbers::pi * r_um * r_um;
    const double r_parallel = p.ra_product / area_um2;
    const double r_antiparallel = r_parallel * (1.0 + p.tmr);
    c.g_parallel = 1.0 / r_parallel;
    c.g_antiparallel = 1.0 / r_antiparallel;
    c.g0 = 0.5 * (c.g_parallel + c.g_antiparallel);
    c.ms_volume = p.saturation_magnetization * p.volume_cm3();
    c.n_spins = c.ms_volume / physical::kBohrMagneton;
    c.gyromagnetic_ratio = physical::kGyromagneticRatio;
    c.electron_charge = physical::kElectronCharge;
    c.kT = physical::kBoltzmann * p.temperature;
    c.demag_field = 4.0 * std::numbers::pi * p.saturation_magnetization;
    return c;
}

double DeviceConstants::thermal_field_sigma(double damping, double dt) const {
    return std::sqrt(2.0 * damping * kT / (gyromagnetic_ratio * ms_volume * dt));
}

Magnetization::Magnetization(const Vec3& m) : m_(m) {
    if (!m.allFinite() || std::abs(m.norm() - 1.0) > 1e-9)
        throw ContractError("magnetization must be a unit vector");
}

Magnetization Magnetization::random(Rng& rng) {
    Vec3 v;
    do {
        v = Vec3(rng.normal(), rng.normal(), rng.normal());
    } while (v.norm() < 1e-12);
    return normalized(v);
}

Magnetization Magnetization::normalized(const Vec3& v) {
    const double n = v.norm();
    require(n > 0.0 && std::isfinite(n), "cannot normalize a zero or non-finite vector");
    Magnetization m;
    m.m_ = v / n;
    return m;
}

std::size_t NeuronSimConfig::steps_per_window() const {
    return static_cast<std::size_t>(std::llround(window / dt));
}

void NeuronSimConfig::validate(const DeviceParams& params) const {
    if (!(dt > 0.0) || !(window > 0.0)) throw ConfigError("neuron dt and window must be positive");
    if (steps_per_window() < 100) throw ConfigError("neuron window must span at least 100 steps");
    if (!(transistor_threshold > 0.0 && transistor_threshold < 0.5 * params.vdd))
        throw ConfigError("transistor threshold must lie in (0, VDD/2)");
    if (!(inverter_threshold_fraction > 0.0 && inverter_threshold_fraction < 1.0))
        throw ConfigError("inverter threshold must lie strictly between the rails");
}

double mtj_conductance(double m_z, const DeviceConstants& consts, double tmr) {
    if (!(std::abs(m_z) <= 1.0)) throw ContractError("m_z must lie in [-1, 1]");
    return consts.g0 * (1.0 + m_z * tmr / (2.0 + tmr));
}

double drain_voltage(double m_z, double alpha_ratio, double tmr) {
    require(alpha_ratio >= 0.0, "conductance ratio must be non-negative");
    const double num = (2.0 + tmr) + tmr * m_z;
    return num / ((2.0 + tmr) * (1.0 + alpha_ratio) + tmr * m_z);
}

double transistor_conductance(double v_in, const NeuronSimConfig& cfg, const DeviceConstants& consts,
                              const DeviceParams& params) {
    if (!(v_in >= 0.0 && v_in <= params.vdd))
        throw ContractError("transistor gate voltage outside the supply rails");
    const double v_th = cfg.transistor_threshold;
    if (v_in <= v_th) return 0.0;
    const double kappa = consts.g0 / (0.5 * params.vdd - v_th);
    return kappa * (v_in - v_th);
}

Vec3 llg_rhs(const Vec3& m, const Vec3& field, const Vec3& spin_current, double damping,
             const DeviceConstants& consts) {
    const double gamma = consts.gyromagnetic_ratio;
    const double inv_qn = 1.0 / (consts.electron_charge * consts.n_spins);
    const Vec3 m_x_h = m.cross(field);
    Vec3 rhs = -gamma * m_x_h - damping * gamma * m.cross(m_x_h);
    rhs += inv_qn * m.cross(spin_current.cross(m));
    rhs += damping * inv_qn * m.cross(spin_current);
    return rhs / (1.0 + damping * damping);
}

namespace {

Vec3 effective_field(const Vec3& m, const Vec3& thermal, const DeviceConstants& consts) {
    return Vec3(-consts.demag_field * m.x(), 0.0, 0.0) + thermal;
}

}  // namespace

Magnetization llg_heun_step(const Magnetization& m, const Vec3& spin_current,
                            const Vec3& thermal_field, double dt, const DeviceConstants& consts,
                            double damping) {
    require(dt > 0.0, "time step must be positive");
    const Vec3& m0 = m.vector();
    const Vec3 f0 = llg_rhs(m0, effective_field(m0, thermal_field, consts), spin_current, damping, consts);
    const Vec3 m1 = m0 + dt * f0;
    const Vec3 f1 = llg_rhs(m1, effective_field(m1, thermal_field, consts), spin_current, damping, consts);
    return Magnetization::normalized(m0 + 0.5 * dt * (f0 + f1));
}

Magnetization llg_step(const Magnetization& m, const Vec3& spin_current, double dt,
                       const DeviceConstants& consts, const DeviceParams& params, Rng& rng) {
    Vec3 thermal = Vec3::Zero();
    if (params.temperature > 0.0) {
        const double sigma = consts.thermal_field_sigma(params.damping, dt);
        thermal = Vec3(rng.normal(), rng.normal(), rng.normal()) * sigma;
    }
    return llg_heun_step(m, spin_current, thermal, dt, consts, params.damping);
}

NeuronWindowResult simulate_neuron_window(double v_in, const NeuronSimConfig& cfg,
                                          const DeviceConstants& consts, const DeviceParams& params,
                                          const Magnetization& state, Rng& rng, bool keep_trace) {
    const double alpha = transistor_conductance(v_in, cfg, consts, params) / consts.g0;
    const std::size_t steps = cfg.steps_per_window();
    const double threshold = cfg.inverter_threshold_fraction;

    NeuronWindowResult r;
    if (keep_trace) r.bit_trace.reserve(steps);
    Magnetization m = state;
    std::size_t high = 0;
    double current_sum = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double mz = m.z();
        const double v_drain = drain_voltage(mz, alpha, params.tmr);  // fraction of VDD
        bool out = v_drain < threshold;
        if (cfg.invert_output) out = !out;
        high += out ? 1 : 0;
        if (keep_trace) r.bit_trace.push_back(out ? 1 : 0);

        const double i_c = params.vdd * (1.0 - v_drain) * mtj_conductance(mz, consts, params.tmr);
        current_sum += i_c;
        m = llg_step(m, Vec3(0.0, 0.0, params.polarization * i_c), cfg.dt, consts, params, rng);
    }
    r.mean_output = static_cast<double>(high) / static_cast<double>(steps);
    r.mean_current = current_sum / static_cast<double>(steps);
    r.final_state = m;
    return r;
}

double SigmoidFit::probability(double v_in) const { return sigmoid(slope * (v_in - v0)); }

bool behavioral_neuron_sample(double v_in, const SigmoidFit& fit, Rng& rng) {
    return rng.uniform() < fit.probability(v_in);
}

std::vector<double> voltage_grid(double vdd, std::size_t n) {
    require(n >= 2, "voltage grid needs at least two points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = vdd * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace pinsim
