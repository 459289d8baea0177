#include "pinsim/mapping.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "pinsim/error.hpp"

namespace pinsim {

std::optional<double> MappingConfig::grid_pitch() const {
    if (!quantization) return std::nullopt;
    return (r_max() - r_min) / *quantization;
}

void MappingConfig::validate() const {
    if (!(r_min > 0.0)) throw ConfigError("r_min must be positive");
    if (!(delta_r_w > 0.0)) throw ConfigError("delta_r_w must be positive");
    if (quantization && *quantization < 1) throw ConfigError("quantization factor must be >= 1");
    if (!(variation_sigma >= 0.0)) throw ConfigError("variation_sigma must be >= 0");
}

void ResistiveLayer::validate() const {
    const bool ok = rw_neg.rows() == rw_pos.rows() && rw_neg.cols() == rw_pos.cols() &&
                    rb_pos.size() == rw_pos.cols() && rb_neg.size() == rw_pos.cols();
    if (!ok) throw ContractError("resistive layer arrays have inconsistent shapes");
    if (!(rw_pos.array() > 0).all() || !(rw_neg.array() > 0).all() || !(rb_pos.array() > 0).all() ||
        !(rb_neg.array() > 0).all())
        throw ContractError("resistances must be positive");
}

void ResistiveDbn::validate() const {
    topology.validate();
    if (layers.size() != topology.num_rbms())
        throw ContractError("resistive network layer count does not match its topology");
    for (std::size_t j = 0; j < layers.size(); ++j) {
        layers[j].validate();
        if (layers[j].n_inputs() != topology.layer_sizes[j] ||
            layers[j].n_outputs() != topology.layer_sizes[j + 1])
            throw ContractError("resistive layer " + std::to_string(j) + " does not match its layer pair");
    }
}

SignedSplit split_signed(const Matrix& values) {
    require(values.allFinite(), "cannot split a matrix with non-finite entries");
    return SignedSplit{values.cwiseMax(0.0), (-values).cwiseMax(0.0)};
}

ValueRange split_range(const SignedSplit& s) {
    require(s.pos.size() > 0, "cannot take the range of an empty matrix");
    return ValueRange{std::min(s.pos.minCoeff(), s.neg.minCoeff()),
                      std::max(s.pos.maxCoeff(), s.neg.maxCoeff())};
}

Matrix map_to_conductance(const Matrix& values, ValueRange range, const MappingConfig& cfg) {
    const double g_min = cfg.g_min();
    const double g_max = cfg.g_max();
    const double width = range.max - range.min;
    if (!(width > 0.0)) {
        spdlog::warn("degenerate mapping range [{}, {}]: all entries map to g_min", range.min, range.max);
        return Matrix::Constant(values.rows(), values.cols(), g_min);
    }
    const double scale = (g_max - g_min) / width;
    return ((values.array() - range.min) * scale + g_min).cwiseMax(g_min).cwiseMin(g_max).matrix();
}

Matrix quantize_resistances(const Matrix& conductances, const MappingConfig& cfg) {
    Matrix r = conductances.cwiseInverse();
    const auto pitch = cfg.grid_pitch();
    if (!pitch) return r;
    // nearbyint under the default rounding mode rounds half to even.
    const double r_min = cfg.r_min;
    return r.unaryExpr([&](double x) { return r_min + std::nearbyint((x - r_min) / *pitch) * *pitch; });
}

namespace {

Matrix map_block(const Matrix& half, ValueRange range, const MappingConfig& cfg) {
    return quantize_resistances(map_to_conductance(half, range, cfg), cfg);
}

}  // namespace

ResistiveDbn map_dbn(const DbnModel& model, const MappingConfig& cfg) {
    model.validate();
    cfg.validate();
    ResistiveDbn out;
    out.topology = model.topology;
    out.config = cfg;
    for (const auto& rbm : model.rbms) {
        const SignedSplit w = split_signed(rbm.weights);
        const SignedSplit b = split_signed(Matrix(rbm.hidden_bias));
        const ValueRange w_range = split_range(w);
        const ValueRange b_range = split_range(b);
        ResistiveLayer layer;
        layer.rw_pos = map_block(w.pos, w_range, cfg);
        layer.rw_neg = map_block(w.neg, w_range, cfg);
        layer.rb_pos = map_block(b.pos, b_range, cfg).col(0);
        layer.rb_neg = map_block(b.neg, b_range, cfg).col(0);
        out.layers.push_back(std::move(layer));
    }
    return out;
}

ResistiveDbn apply_resistance_variation(ResistiveDbn rdbn, double sigma, Rng& rng) {
    require(sigma >= 0.0, "variation sigma must be non-negative");
    if (sigma == 0.0) return rdbn;
    const double lo = 0.5 * rdbn.config.r_min;
    const double hi = 2.0 * rdbn.config.r_max();
    auto perturb = [&](double r) { return std::clamp(r + sigma * rng.normal(), lo, hi); };
    for (auto& layer : rdbn.layers) {
        layer.rw_pos = layer.rw_pos.unaryExpr(perturb);
        layer.rw_neg = layer.rw_neg.unaryExpr(perturb);
        layer.rb_pos = layer.rb_pos.unaryExpr(perturb);
        layer.rb_neg = layer.rb_neg.unaryExpr(perturb);
    }
    return rdbn;
}

}  // namespace pinsim
