#include "pinsim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include <spdlog/spdlog.h>

#include "pinsim/error.hpp"
#include "pinsim/persistence.hpp"

namespace pinsim {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

json power_json(const PowerBreakdown& p) {
    return json{{"array_W", p.array},
                {"neuron_W", p.neuron},
                {"integrator_W", p.integrator},
                {"amplifier_W", p.amplifier},
                {"total_W", p.total()}};
}

}  // namespace

ExperimentData load_experiment_data(const DataConfig& cfg, std::size_t train_count, std::size_t test_count) {
    const MnistPaths paths = MnistPaths::in_directory(cfg.mnist_dir);
    ExperimentData d;
    if (train_count > 0)
        d.train = binarize(load_mnist_idx(paths.train_images, paths.train_labels, Split::Train, train_count),
                           cfg.binarize_threshold);
    if (test_count > 0)
        d.test = binarize(load_mnist_idx(paths.test_images, paths.test_labels, Split::Test, test_count),
                          cfg.binarize_threshold);
    if (d.train.size() < train_count || d.test.size() < test_count)
        throw DataError("MNIST files hold fewer samples than requested");
    return d;
}

DbnModel train_or_load(const RunConfig& cfg, const ExperimentData& data) {
    if (!cfg.model_path.empty()) {
        DbnModel m = load_model(cfg.model_path);
        if (!(m.topology == cfg.network()))
            throw ConfigError("model " + cfg.model_path + " has topology " + m.topology.to_string());
        return m;
    }
    const TrainConfig t = cfg.train_config();
    return train_dbn(data.train.view(t.num_train_samples), cfg.network(), t);
}

ResistiveDbn map_for_hardware(const DbnModel& model, const RunConfig& cfg) {
    ResistiveDbn r = map_dbn(model, cfg.mapping);
    if (cfg.mapping.variation_sigma > 0.0) {
        Rng rng(derive_seed(cfg.seed, kSeedVariation));
        r = apply_resistance_variation(std::move(r), cfg.mapping.variation_sigma, rng);
    }
    return r;
}

std::string results_csv(const EvalReport& report, const char* score_prefix) {
    std::string out = "sample_id,label,prediction";
    const auto classes = report.records.empty() ? 0 : report.records.front().scores.size();
    for (Eigen::Index k = 0; k < classes; ++k) out += "," + std::string(score_prefix) + std::to_string(k);
    out += ",cycles,energy_J\n";
    for (const auto& r : report.records) {
        out += std::to_string(r.sample_id) + "," + std::to_string(r.label) + "," + std::to_string(r.prediction);
        for (Eigen::Index k = 0; k < r.scores.size(); ++k) out += "," + fmt_double(r.scores[k]);
        out += "," + std::to_string(r.cycles) + "," + fmt_double(r.energy) + "\n";
    }
    return out;
}

json report_summary(const EvalReport& report) {
    json layers = json::array();
    for (const auto& p : report.layer_power) layers.push_back(power_json(p));
    const PowerBreakdown total = report.total_power();
    return json{{"err", report.metrics.err},
                {"rmse", report.metrics.rmse},
                {"num_samples", report.metrics.num_samples},
                {"num_false", report.metrics.num_false},
                {"cycles", report.cycles},
                {"energy_J", report.energy},
                {"power", power_json(total)},
                {"neuron_share", total.total() > 0 ? total.neuron / total.total() : 0.0},
                {"layer_power", std::move(layers)},
                {"confusion", report.confusion}};
}

ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentData& data,
                                const std::filesystem::path& out_dir) {
    cfg.validate();
    const std::size_t n_test = cfg.test_count();
    require(data.test.size() >= n_test, "test set smaller than the configured evaluation count");

    ExperimentResult r;
    r.model = train_or_load(cfg, data);
    r.rdbn = map_for_hardware(r.model, cfg);
    r.software = evaluate_software(r.model, data.test, n_test, cfg.sw_averaging_samples,
                                   derive_seed(cfg.seed, kSeedSoftware));
    r.hardware = evaluate_hardware(r.rdbn, data.test, n_test, cfg.circuit_config(),
                                   derive_seed(cfg.seed, kSeedHardware));
    spdlog::info("{}: software ERR {:.4f}, hardware ERR {:.4f}, power {:.4g} W, energy {:.4g} J",
                 cfg.topology, r.software.metrics.err, r.hardware.metrics.err, r.hardware.total_power().total(),
                 r.hardware.energy);

    if (!out_dir.empty()) {
        write_text_file(out_dir / "config.json", json(cfg).dump(2) + "\n");
        save_model(r.model, out_dir / "model.json");
        save_resistive(r.rdbn, out_dir / "resistive.json");
        export_resistance_csvs(r.rdbn, out_dir / "resistances");
        write_text_file(out_dir / "sw_results.csv", results_csv(r.software, "score"));
        write_text_file(out_dir / "hw_results.csv", results_csv(r.hardware, "v"));
        save_report(r.hardware, out_dir / "hw_report.json");
        const json summary{{"topology", cfg.topology},
                           {"train_schedule", cfg.train_config()},
                           {"software", report_summary(r.software)},
                           {"hardware", report_summary(r.hardware)}};
        write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
    }
    return r;
}

void SweepSpec::validate() const {
    static const char* known[] = {"topology", "train_num", "delta_r_w", "Q", "variation_sigma", "input_noise_sigma"};
    bool ok = false;
    for (const char* k : known) ok = ok || parameter == k;
    if (!ok) throw ConfigError("unknown sweep parameter '" + parameter + "'");
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (replications < 1) throw ConfigError("replications must be >= 1");
}

namespace {

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid " + what + " value '" + text + "'");
    }
}

bool trains_model(const std::string& parameter) { return parameter == "topology" || parameter == "train_num"; }

}  // namespace

RunConfig sweep_row_config(const SweepSpec& spec, const std::string& value, int replication) {
    RunConfig c = spec.base;
    const std::string& p = spec.parameter;
    if (p == "topology") {
        c.topology = value;
    } else if (p == "train_num") {
        const double n = parse_number(value, p);
        if (n < 1 || n != std::floor(n)) throw ConfigError("train_num must be a positive integer");
        c.train.num_train_samples = static_cast<std::size_t>(n);
    } else if (p == "delta_r_w") {
        c.mapping.delta_r_w = parse_number(value, p);
    } else if (p == "Q") {
        if (value == "none" || value == "inf") {
            c.mapping.quantization.reset();
        } else {
            const double q = parse_number(value, p);
            if (q < 1 || q != std::floor(q)) throw ConfigError("Q must be a positive integer, none or inf");
            c.mapping.quantization = static_cast<int>(q);
        }
    } else if (p == "variation_sigma") {
        c.mapping.variation_sigma = parse_number(value, p);
    } else if (p == "input_noise_sigma") {
        c.circuit.input_noise_sigma = parse_number(value, p);
    }
    if (replication > 0) c.seed = derive_seed(spec.base.seed, 100 + static_cast<std::uint64_t>(replication));
    c.validate();
    return c;
}

SweepResult run_sweep(const SweepSpec& spec, const ExperimentData& data, const std::filesystem::path& out_dir) {
    spec.validate();
    SweepResult result;
    std::map<std::string, DbnModel> models;  // keyed by what training depends on
    for (const auto& value : spec.values) {
        SweepPoint point;
        point.value = value;
        std::vector<double> errs;
        for (int rep = 0; rep < spec.replications; ++rep) {
            const RunConfig cfg = sweep_row_config(spec, value, rep);
            const std::string key = cfg.topology + "|" + std::to_string(cfg.train.num_train_samples) + "|" +
                                    std::to_string(cfg.seed);
            auto it = models.find(key);
            if (it == models.end()) it = models.emplace(key, train_or_load(cfg, data)).first;
            const DbnModel& model = it->second;
            const std::size_t n_test = cfg.test_count();
            require(data.test.size() >= n_test, "test set smaller than the configured evaluation count");
            const EvalReport sw = evaluate_software(model, data.test, n_test, cfg.sw_averaging_samples,
                                                    derive_seed(cfg.seed, kSeedSoftware));
            const EvalReport hw = evaluate_hardware(map_for_hardware(model, cfg), data.test, n_test,
                                                    cfg.circuit_config(), derive_seed(cfg.seed, kSeedHardware));
            SweepRow row{value, rep, cfg.seed, sw.metrics.err, hw.metrics.err, hw.metrics.rmse,
                         hw.total_power(), hw.energy, hw.cycles};
            spdlog::info("sweep {}={} rep {}: software ERR {:.4f}, hardware ERR {:.4f}", spec.parameter, value, rep,
                         row.sw_err, row.hw_err);
            errs.push_back(row.hw_err);
            point.sw_err_mean += row.sw_err / spec.replications;
            point.power_mean += row.power.total() / spec.replications;
            point.energy_mean += row.energy / spec.replications;
            result.rows.push_back(std::move(row));
            if (trains_model(spec.parameter)) models.erase(key);
        }
        point.n = spec.replications;
        for (double e : errs) point.hw_err_mean += e / spec.replications;
        if (spec.replications > 1) {
            double ss = 0.0;
            for (double e : errs) ss += (e - point.hw_err_mean) * (e - point.hw_err_mean);
            point.hw_err_std = std::sqrt(ss / (spec.replications - 1));
        }
        result.points.push_back(std::move(point));
    }
    if (!out_dir.empty()) {
        json base = spec.base;
        write_text_file(out_dir / "config.json", base.dump(2) + "\n");
        write_text_file(out_dir / "sweep_rows.csv", sweep_rows_csv(spec, result));
        write_text_file(out_dir / "sweep_summary.csv", sweep_points_csv(spec, result));
    }
    return result;
}

std::string sweep_rows_csv(const SweepSpec& spec, const SweepResult& result) {
    std::string out = spec.parameter +
                      ",replication,seed,sw_err,hw_err,hw_rmse,array_W,neuron_W,integrator_W,amplifier_W,total_W,"
                      "energy_J,cycles,epochs,learning_rate\n";
    for (const auto& r : result.rows) {
        out += r.value + "," + std::to_string(r.replication) + "," + std::to_string(r.seed) + "," +
               fmt_double(r.sw_err) + "," + fmt_double(r.hw_err) + "," + fmt_double(r.hw_rmse) + "," +
               fmt_double(r.power.array) + "," + fmt_double(r.power.neuron) + "," + fmt_double(r.power.integrator) +
               "," + fmt_double(r.power.amplifier) + "," + fmt_double(r.power.total()) + "," + fmt_double(r.energy) +
               "," + std::to_string(r.cycles) + "," + std::to_string(spec.base.train.epochs) + "," +
               fmt_double(spec.base.train.learning_rate) + "\n";
    }
    return out;
}

std::string sweep_points_csv(const SweepSpec& spec, const SweepResult& result) {
    std::string out = spec.parameter + ",n,hw_err_mean,hw_err_std,sw_err_mean,power_W_mean,energy_J_mean\n";
    for (const auto& p : result.points) {
        out += p.value + "," + std::to_string(p.n) + "," + fmt_double(p.hw_err_mean) + "," +
               (p.hw_err_std ? fmt_double(*p.hw_err_std) : std::string()) + "," + fmt_double(p.sw_err_mean) + "," +
               fmt_double(p.power_mean) + "," + fmt_double(p.energy_mean) + "\n";
    }
    return out;
}

TransferCurve run_device_curve(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.device.validate();
    const DeviceConstants consts = DeviceConstants::derive(cfg.device);
    spdlog::info("device: G0 = {:.6g} S, N = {:.6g}", consts.g0, consts.n_spins);
    Rng rng(derive_seed(cfg.seed, kSeedDevice));
    TransferCurve curve = fit_transfer_curve(cfg.neuron_sim, consts, cfg.device, cfg.device_curve.windows_per_point,
                                             voltage_grid(cfg.device.vdd, cfg.device_curve.grid_points), rng);
    if (!out_dir.empty()) {
        std::string csv = "v_in,mean_output,std,fit_value\n";
        for (const auto& p : curve.points)
            csv += fmt_double(p.v_in) + "," + fmt_double(p.mean_output) + "," + fmt_double(p.std_output) + "," +
                   fmt_double(p.fit_value) + "\n";
        write_text_file(out_dir / "device_curve.csv", csv);
        write_text_file(out_dir / "device_fit.json",
                        json{{"fit", curve.fit}, {"windows_per_point", curve.windows_per_point},
                             {"g0_S", consts.g0}, {"n_spins", consts.n_spins}}
                                .dump(2) + "\n");
    }
    return curve;
}

}  // namespace pinsim
