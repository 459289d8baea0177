#pragma once

#include <optional>
#include <vector>

#include "pinsim/rbm.hpp"

namespace pinsim {

struct MappingConfig {
    double r_min = 1000.0;      // ohm
    double delta_r_w = 400.0;   // percent; r_max = (1 + delta_r_w / 100) r_min
    std::optional<int> quantization = 8;  // Q; empty = unquantized
    double variation_sigma = 0.0;         // ohm, 0 disables

    double r_max() const { return (1.0 + delta_r_w / 100.0) * r_min; }
    double g_min() const { return 1.0 / r_max(); }
    double g_max() const { return 1.0 / r_min; }
    /// Spacing of the resistance grid, (r_max - r_min) / Q.
    std::optional<double> grid_pitch() const;
    void validate() const;
};

/// Resistances (ohm) of one RBM's positive and negative arrays.
struct ResistiveLayer {
    Matrix rw_pos;  // n_visible x n_hidden
    Matrix rw_neg;
    Vector rb_pos;  // n_hidden
    Vector rb_neg;

    std::size_t n_inputs() const { return static_cast<std::size_t>(rw_pos.rows()); }
    std::size_t n_outputs() const { return static_cast<std::size_t>(rw_pos.cols()); }
    void validate() const;
};

struct ResistiveDbn {
    NetworkTopology topology;
    std::vector<ResistiveLayer> layers;
    MappingConfig config;

    void validate() const;
};

struct SignedSplit {
    Matrix pos;  // max(w, 0)
    Matrix neg;  // max(-w, 0)
};

SignedSplit split_signed(const Matrix& values);

struct ValueRange {
    double min = 0.0;
    double max = 0.0;
};

/// Smallest and largest entry over the union of the two halves of a split.
ValueRange split_range(const SignedSplit& split);

/// g = (g_max - g_min)(w - w_min) / (w_max - w_min) + g_min. A degenerate range
/// (w_max == w_min) maps everything to g_min and logs a warning.
Matrix map_to_conductance(const Matrix& values, ValueRange range, const MappingConfig& cfg);

/// 1/g snapped to the grid r_min + k (r_max - r_min) / Q, ties to even;
/// plain 1/g when the config is unquantized.
Matrix quantize_resistances(const Matrix& conductances, const MappingConfig& cfg);

/// Split, map and quantize every RBM. Weights and biases use separate
/// per-RBM ranges. variation_sigma in the config is not applied here.
ResistiveDbn map_dbn(const DbnModel& model, const MappingConfig& cfg);

/// Adds independent N(0, sigma) to every resistance, clamped to [r_min/2, 2 r_max].
ResistiveDbn apply_resistance_variation(ResistiveDbn rdbn, double sigma, Rng& rng);

}  // namespace pinsim
