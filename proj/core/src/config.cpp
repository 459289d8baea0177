#include "pinsim/config.hpp"

#include <initializer_list>

#include "pinsim/error.hpp"
#include "pinsim/persistence.hpp"

namespace pinsim {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> known, const char* section) {
    if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + section);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(j, key, v);
    out = v;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

// Like merge_patch, but null is a value rather than a deletion.
void deep_merge(json& base, const json& patch) {
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object())
            deep_merge(base[key], value);
        else
            base[key] = value;
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return Rng::stream(seed, tag).next_u64(); }

void to_json(json& j, const TrainConfig& c) {
    j = json{{"learning_rate", c.learning_rate},     {"max_iter", c.max_iter},
             {"epochs", c.epochs},                   {"num_train_samples", c.num_train_samples},
             {"rng_seed", c.rng_seed},               {"init_weight_sigma", c.init_weight_sigma},
             {"literal_alg1", c.literal_alg1},       {"clamp_labels_top", c.clamp_labels_top}};
}

void from_json(const json& j, TrainConfig& c) {
    check_keys(j, {"learning_rate", "max_iter", "epochs", "num_train_samples", "rng_seed", "init_weight_sigma",
                   "literal_alg1", "clamp_labels_top"},
               "train");
    read(j, "learning_rate", c.learning_rate);
    read(j, "max_iter", c.max_iter);
    read(j, "epochs", c.epochs);
    read(j, "num_train_samples", c.num_train_samples);
    read(j, "rng_seed", c.rng_seed);
    read(j, "init_weight_sigma", c.init_weight_sigma);
    read(j, "literal_alg1", c.literal_alg1);
    read(j, "clamp_labels_top", c.clamp_labels_top);
}

void to_json(json& j, const MappingConfig& c) {
    j = json{{"r_min", c.r_min},
             {"delta_r_w", c.delta_r_w},
             {"quantization", optional_json(c.quantization)},
             {"variation_sigma", c.variation_sigma}};
}

void from_json(const json& j, MappingConfig& c) {
    check_keys(j, {"r_min", "delta_r_w", "quantization", "variation_sigma"}, "mapping");
    read(j, "r_min", c.r_min);
    read(j, "delta_r_w", c.delta_r_w);
    read_optional(j, "quantization", c.quantization);
    read(j, "variation_sigma", c.variation_sigma);
}

void to_json(json& j, const SigmoidFit& c) {
    j = json{{"v0", c.v0}, {"slope", c.slope}, {"max_residual", c.max_residual}};
}

void from_json(const json& j, SigmoidFit& c) {
    check_keys(j, {"v0", "slope", "max_residual"}, "neuron_fit");
    read(j, "v0", c.v0);
    read(j, "slope", c.slope);
    read(j, "max_residual", c.max_residual);
}

void to_json(json& j, const CircuitConfig& c) {
    j = json{{"r0", c.r0},
             {"r1", c.r1},
             {"ri", c.ri},
             {"ci", c.ci},
             {"clock_period", c.clock_period},
             {"vdd", c.vdd},
             {"g_load", c.g_load},
             {"input_noise_sigma", c.input_noise_sigma},
             {"neuron_mode", to_string(c.neuron_mode)},
             {"behavioral_dt", c.behavioral_dt},
             {"restore_threshold", optional_json(c.restore_threshold)},
             {"amp_static_power", c.amp_static_power},
             {"neuron_fit", c.neuron_fit}};
}

void from_json(const json& j, CircuitConfig& c) {
    check_keys(j, {"r0", "r1", "ri", "ci", "clock_period", "vdd", "g_load", "input_noise_sigma", "neuron_mode",
                   "behavioral_dt", "restore_threshold", "amp_static_power", "neuron_fit"},
               "circuit");
    read(j, "r0", c.r0);
    read(j, "r1", c.r1);
    read(j, "ri", c.ri);
    read(j, "ci", c.ci);
    read(j, "clock_period", c.clock_period);
    read(j, "vdd", c.vdd);
    read(j, "g_load", c.g_load);
    read(j, "input_noise_sigma", c.input_noise_sigma);
    if (j.contains("neuron_mode")) {
        std::string mode;
        read(j, "neuron_mode", mode);
        c.neuron_mode = parse_neuron_mode(mode);
    }
    read(j, "behavioral_dt", c.behavioral_dt);
    read_optional(j, "restore_threshold", c.restore_threshold);
    read(j, "amp_static_power", c.amp_static_power);
    if (j.contains("neuron_fit")) c.neuron_fit = j.at("neuron_fit").get<SigmoidFit>();
}

void to_json(json& j, const DeviceParams& c) {
    j = json{{"saturation_magnetization", c.saturation_magnetization},
             {"free_layer_diameter", c.free_layer_diameter},
             {"free_layer_thickness", c.free_layer_thickness},
             {"polarization", c.polarization},
             {"tmr", c.tmr},
             {"ra_product", c.ra_product},
             {"damping", c.damping},
             {"temperature", c.temperature},
             {"vdd", c.vdd}};
}

void from_json(const json& j, DeviceParams& c) {
    check_keys(j, {"saturation_magnetization", "free_layer_diameter", "free_layer_thickness", "polarization", "tmr",
                   "ra_product", "damping", "temperature", "vdd"},
               "device");
    read(j, "saturation_magnetization", c.saturation_magnetization);
    read(j, "free_layer_diameter", c.free_layer_diameter);
    read(j, "free_layer_thickness", c.free_layer_thickness);
    read(j, "polarization", c.polarization);
    read(j, "tmr", c.tmr);
    read(j, "ra_product", c.ra_product);
    read(j, "damping", c.damping);
    read(j, "temperature", c.temperature);
    read(j, "vdd", c.vdd);
}

void to_json(json& j, const NeuronSimConfig& c) {
    j = json{{"dt", c.dt},
             {"window", c.window},
             {"transistor_threshold", c.transistor_threshold},
             {"transistor_model", "linear"},
             {"inverter_threshold_fraction", c.inverter_threshold_fraction},
             {"invert_output", c.invert_output}};
}

void from_json(const json& j, NeuronSimConfig& c) {
    check_keys(j, {"dt", "window", "transistor_threshold", "transistor_model", "inverter_threshold_fraction",
                   "invert_output"},
               "neuron_sim");
    read(j, "dt", c.dt);
    read(j, "window", c.window);
    read(j, "transistor_threshold", c.transistor_threshold);
    if (j.contains("transistor_model") && j.at("transistor_model") != "linear")
        throw ConfigError("transistor_model must be 'linear'");
    read(j, "inverter_threshold_fraction", c.inverter_threshold_fraction);
    read(j, "invert_output", c.invert_output);
}

void to_json(json& j, const RunConfig& c) {
    j = json{{"topology", c.topology},
             {"train", c.train},
             {"mapping", c.mapping},
             {"circuit", c.circuit},
             {"device", c.device},
             {"neuron_sim", c.neuron_sim},
             {"data",
              {{"mnist_dir", c.data.mnist_dir},
               {"binarize_threshold", c.data.binarize_threshold},
               {"num_test_samples", c.data.num_test_samples},
               {"full_test", c.data.full_test}}},
             {"device_curve",
              {{"grid_points", c.device_curve.grid_points},
               {"windows_per_point", c.device_curve.windows_per_point}}},
             {"sw_averaging_samples", c.sw_averaging_samples},
             {"model_path", c.model_path},
             {"output_dir", c.output_dir},
             {"seed", c.seed}};
}

void from_json(const json& j, RunConfig& c) {
    check_keys(j, {"topology", "train", "mapping", "circuit", "device", "neuron_sim", "data", "device_curve",
                   "sw_averaging_samples", "model_path", "output_dir", "seed"},
               "config");
    read(j, "topology", c.topology);
    if (j.contains("train")) from_json(j.at("train"), c.train);
    if (j.contains("mapping")) from_json(j.at("mapping"), c.mapping);
    if (j.contains("circuit")) from_json(j.at("circuit"), c.circuit);
    if (j.contains("device")) from_json(j.at("device"), c.device);
    if (j.contains("neuron_sim")) from_json(j.at("neuron_sim"), c.neuron_sim);
    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, {"mnist_dir", "binarize_threshold", "num_test_samples", "full_test"}, "data");
        read(d, "mnist_dir", c.data.mnist_dir);
        read(d, "binarize_threshold", c.data.binarize_threshold);
        read(d, "num_test_samples", c.data.num_test_samples);
        read(d, "full_test", c.data.full_test);
    }
    if (j.contains("device_curve")) {
        const json& d = j.at("device_curve");
        check_keys(d, {"grid_points", "windows_per_point"}, "device_curve");
        read(d, "grid_points", c.device_curve.grid_points);
        read(d, "windows_per_point", c.device_curve.windows_per_point);
    }
    read(j, "sw_averaging_samples", c.sw_averaging_samples);
    read(j, "model_path", c.model_path);
    read(j, "output_dir", c.output_dir);
    read(j, "seed", c.seed);
}

NetworkTopology RunConfig::network() const { return NetworkTopology::parse(topology); }

CircuitConfig RunConfig::circuit_config() const {
    CircuitConfig c = circuit;
    c.device = device;
    c.device_sim = neuron_sim;
    return c;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t = train;
    t.rng_seed = seed;
    return t;
}

std::size_t RunConfig::test_count() const { return data.full_test ? 10000 : data.num_test_samples; }

void RunConfig::validate() const {
    const NetworkTopology t = network();
    if (t.num_visible() != 784) throw ConfigError("visible layer must have 784 nodes (28x28 images)");
    if (t.num_outputs() != 10) throw ConfigError("output layer must have 10 nodes (digit classes)");
    train.validate();
    mapping.validate();
    device.validate();
    circuit_config().validate();
    if (data.binarize_threshold < 0 || data.binarize_threshold > 255)
        throw ConfigError("binarize_threshold must lie in [0, 255]");
    if (data.num_test_samples < 1 || data.num_test_samples > 10000)
        throw ConfigError("num_test_samples must lie in [1, 10000]");
    if (train.num_train_samples > 60000) throw ConfigError("num_train_samples exceeds the MNIST training set");
    if (device_curve.grid_points < 3 || device_curve.windows_per_point < 2)
        throw ConfigError("device_curve needs >= 3 grid points and >= 2 windows per point");
    if (sw_averaging_samples < 0) throw ConfigError("sw_averaging_samples must be >= 0");
}

RunConfig parse_run_config(const json& doc) {
    RunConfig c;
    try {
        from_json(doc, c);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return parse_run_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    *node = std::move(value);
}

RunConfig resolve_run_config(const std::filesystem::path* file, const std::vector<std::string>& overrides) {
    json doc = RunConfig{};
    if (file) {
        json user;
        try {
            user = json::parse(read_text_file(*file));
        } catch (const json::exception& e) {
            throw ConfigError(file->string() + " is not valid JSON: " + e.what());
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
        parse_run_config(user);  // rejects unknown keys before merging
        deep_merge(doc, user);
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_run_config(doc);
}

}  // namespace pinsim
