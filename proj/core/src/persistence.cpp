#include "pinsim/persistence.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pinsim/config.hpp"
#include "pinsim/error.hpp"

namespace pinsim {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows))
        throw DataError("matrix row count does not match its header");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = data[static_cast<std::size_t>(i)];
        if (row.size() != static_cast<std::size_t>(cols)) throw DataError("matrix row has the wrong length");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << text;
        if (!out) throw DataError("failed while writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

json envelope(const char* format, json body) {
    return json{{"format", format}, {"version", kArtifactVersion}, {"body", std::move(body)}};
}

json open_envelope(const std::filesystem::path& path, const char* format) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw DataError(path.string() + " is corrupt or truncated: " + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != format)
        throw DataError(path.string() + " is not a " + format + " file");
    if (doc.value("version", -1) != kArtifactVersion)
        throw DataError(path.string() + ": unsupported version " + doc.value("version", json(-1)).dump());
    return doc.at("body");
}

template <typename F>
auto decode(const std::filesystem::path& path, F f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw DataError(path.string() + " is malformed: " + e.what());
    }
}

}  // namespace

void save_model(const DbnModel& model, const std::filesystem::path& path) {
    model.validate();
    json rbms = json::array();
    for (const auto& r : model.rbms)
        rbms.push_back({{"weights", matrix_to_json(r.weights)},
                        {"hidden_bias", vector_to_json(r.hidden_bias)},
                        {"visible_bias", vector_to_json(r.visible_bias)}});
    json body{{"topology", model.topology.to_string()},
              {"train_config", model.train_config},
              {"rbms", std::move(rbms)}};
    write_text_file(path, envelope("pinsim-model", std::move(body)).dump() + "\n");
}

DbnModel load_model(const std::filesystem::path& path) {
    const json body = open_envelope(path, "pinsim-model");
    DbnModel m = decode(path, [&] {
        DbnModel model;
        model.topology = NetworkTopology::parse(body.at("topology").get<std::string>());
        model.train_config = body.at("train_config").get<TrainConfig>();
        for (const auto& r : body.at("rbms"))
            model.rbms.push_back(RbmParams{matrix_from_json(r.at("weights")), vector_from_json(r.at("hidden_bias")),
                                           vector_from_json(r.at("visible_bias"))});
        return model;
    });
    try {
        m.validate();
    } catch (const ContractError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return m;
}

void save_resistive(const ResistiveDbn& rdbn, const std::filesystem::path& path) {
    rdbn.validate();
    json layers = json::array();
    for (const auto& l : rdbn.layers)
        layers.push_back({{"rw_pos", matrix_to_json(l.rw_pos)},
                          {"rw_neg", matrix_to_json(l.rw_neg)},
                          {"rb_pos", vector_to_json(l.rb_pos)},
                          {"rb_neg", vector_to_json(l.rb_neg)}});
    json body{{"topology", rdbn.topology.to_string()}, {"mapping", rdbn.config}, {"layers", std::move(layers)}};
    write_text_file(path, envelope("pinsim-resistive", std::move(body)).dump() + "\n");
}

ResistiveDbn load_resistive(const std::filesystem::path& path) {
    const json body = open_envelope(path, "pinsim-resistive");
    ResistiveDbn r = decode(path, [&] {
        ResistiveDbn out;
        out.topology = NetworkTopology::parse(body.at("topology").get<std::string>());
        out.config = body.at("mapping").get<MappingConfig>();
        for (const auto& l : body.at("layers"))
            out.layers.push_back(ResistiveLayer{matrix_from_json(l.at("rw_pos")), matrix_from_json(l.at("rw_neg")),
                                                vector_from_json(l.at("rb_pos")), vector_from_json(l.at("rb_neg"))});
        return out;
    });
    try {
        r.validate();
    } catch (const ContractError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return r;
}

namespace {

json power_to_json(const PowerBreakdown& p) {
    return json{{"array", p.array}, {"neuron", p.neuron}, {"integrator", p.integrator}, {"amplifier", p.amplifier}};
}

PowerBreakdown power_from_json(const json& j) {
    return PowerBreakdown{j.at("array").get<double>(), j.at("neuron").get<double>(),
                          j.at("integrator").get<double>(), j.at("amplifier").get<double>()};
}

}  // namespace

void save_report(const EvalReport& r, const std::filesystem::path& path) {
    json layers = json::array();
    for (const auto& p : r.layer_power) layers.push_back(power_to_json(p));
    json records = json::array();
    for (const auto& s : r.records)
        records.push_back({{"sample_id", s.sample_id},
                           {"label", s.label},
                           {"prediction", s.prediction},
                           {"scores", vector_to_json(s.scores)},
                           {"cycles", s.cycles},
                           {"energy", s.energy}});
    json body{{"err", r.metrics.err},
              {"rmse", r.metrics.rmse},
              {"num_samples", r.metrics.num_samples},
              {"num_false", r.metrics.num_false},
              {"confusion", r.confusion},
              {"layer_power", std::move(layers)},
              {"energy", r.energy},
              {"cycles", r.cycles},
              {"records", std::move(records)}};
    write_text_file(path, envelope("pinsim-report", std::move(body)).dump() + "\n");
}

EvalReport load_report(const std::filesystem::path& path) {
    const json body = open_envelope(path, "pinsim-report");
    return decode(path, [&] {
        EvalReport r;
        r.metrics.err = body.at("err").get<double>();
        r.metrics.rmse = body.at("rmse").get<double>();
        r.metrics.num_samples = body.at("num_samples").get<std::size_t>();
        r.metrics.num_false = body.at("num_false").get<std::size_t>();
        r.confusion = body.at("confusion").get<ConfusionMatrix>();
        for (const auto& p : body.at("layer_power")) r.layer_power.push_back(power_from_json(p));
        r.energy = body.at("energy").get<double>();
        r.cycles = body.at("cycles").get<int>();
        for (const auto& s : body.at("records"))
            r.records.push_back(SampleRecord{s.at("sample_id").get<std::size_t>(), s.at("label").get<int>(),
                                             s.at("prediction").get<int>(), vector_from_json(s.at("scores")),
                                             s.at("cycles").get<int>(), s.at("energy").get<double>()});
        return r;
    });
}

void export_resistance_csvs(const ResistiveDbn& rdbn, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const Matrix& m) {
        std::string text;
        char buf[32];
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index k = 0; k < m.cols(); ++k) {
                std::snprintf(buf, sizeof buf, "%.6g", m(i, k));
                if (k) text += ',';
                text += buf;
            }
            text += '\n';
        }
        write_text_file(dir / name, text);
    };
    for (std::size_t j = 0; j < rdbn.layers.size(); ++j) {
        const auto& l = rdbn.layers[j];
        const std::string k = std::to_string(j + 1);
        write("posWeight" + k + ".csv", l.rw_pos);
        write("negWeight" + k + ".csv", l.rw_neg);
        write("posBias" + k + ".csv", l.rb_pos.transpose());
        write("negBias" + k + ".csv", l.rb_neg.transpose());
    }
}

}  // namespace pinsim
