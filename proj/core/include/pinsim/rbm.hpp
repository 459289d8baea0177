#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pinsim/math.hpp"
#include "pinsim/random.hpp"

namespace pinsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Vector of binary node states. Entries are stored as doubles (0.0 / 1.0) so
/// they feed straight into matrix products.
class BinaryState {
public:
    BinaryState() = default;
    /// Throws ContractError unless every entry is exactly 0 or 1.
    explicit BinaryState(Vector bits);

    static BinaryState zeros(std::size_t n);
    static BinaryState from_bits(std::span<const int> bits);

    std::size_t size() const { return static_cast<std::size_t>(bits_.size()); }
    bool operator[](std::size_t i) const { return bits_[static_cast<Eigen::Index>(i)] != 0.0; }
    const Vector& values() const { return bits_; }

    /// Packs the state into an integer, bit i = node i. Only for size() <= 63.
    std::uint64_t code() const;

    friend bool operator==(const BinaryState& a, const BinaryState& b) {
        return a.bits_.size() == b.bits_.size() && a.bits_ == b.bits_;
    }

private:
    Vector bits_;
};

struct NetworkTopology {
    std::vector<std::size_t> layer_sizes;

    /// Parses "784x200x10".
    static NetworkTopology parse(const std::string& text);
    std::string to_string() const;

    std::size_t num_rbms() const { return layer_sizes.empty() ? 0 : layer_sizes.size() - 1; }
    std::size_t num_visible() const { return layer_sizes.front(); }
    std::size_t num_outputs() const { return layer_sizes.back(); }
    void validate() const;

    friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;
};

/// One restricted Boltzmann machine. weights is n_visible x n_hidden.
struct RbmParams {
    Matrix weights;
    Vector hidden_bias;
    Vector visible_bias;

    static RbmParams zeros(std::size_t n_visible, std::size_t n_hidden);

    std::size_t n_visible() const { return static_cast<std::size_t>(weights.rows()); }
    std::size_t n_hidden() const { return static_cast<std::size_t>(weights.cols()); }
    std::size_t num_nodes() const { return n_visible() + n_hidden(); }
    void validate() const;
};

struct TrainConfig {
    double learning_rate = 0.1;
    int max_iter = 1;           // CD repetitions per sample per RBM
    int epochs = 10;            // passes over the training set
    std::size_t num_train_samples = 3000;
    std::uint64_t rng_seed = 1;
    double init_weight_sigma = 0.01;
    /// Per-sample loop over all RBMs (the original loop order) instead of
    /// greedy layer-wise training.
    bool literal_alg1 = false;
    /// Clamp the top RBM's positive-phase hidden state to the one-hot label.
    bool clamp_labels_top = true;

    void validate() const;
};

struct DbnModel {
    NetworkTopology topology;
    std::vector<RbmParams> rbms;
    TrainConfig train_config;  // echo of the configuration that produced the model

    void validate() const;
};

/// E(v, h) = -c.v - b.h - v^T W h
double network_energy(const BinaryState& visible, const BinaryState& hidden, const RbmParams& rbm);

/// sigma(bias + sum_j w_j s_j)
double activation_probability(double bias, const Vector& incoming_weights,
                              const BinaryState& source_state);

/// Element-wise sigma(B + W^T v).
Vector hidden_probabilities(const RbmParams& rbm, const Vector& visible);
/// Element-wise sigma(C + W h).
Vector visible_probabilities(const RbmParams& rbm, const Vector& hidden);

BinaryState sample_layer(const Vector& probabilities, Rng& rng);

/// The four vectors that enter a contrastive-divergence update.
struct CdPhases {
    Vector v;        // data
    Vector h;        // sampled hidden (or clamped label)
    Vector v_recon;  // sampled reconstruction
    Vector h_recon;  // hidden probabilities for the reconstruction
};

struct CdDeltas {
    Matrix dW;
    Vector dB;
    Vector dC;
};

/// dW = eta (v h^T - v' h'^T), dB = eta (h - h'), dC = eta (v - v').
CdDeltas cd_deltas(const CdPhases& phases, double learning_rate);

/// Runs Feed-Forward 1 / Feed-Back / Feed-Forward 2 for one sample.
CdPhases cd_phases(const RbmParams& rbm, const BinaryState& v, Rng& rng);
/// Same, with the positive-phase hidden state fixed to `clamped_hidden`.
CdPhases cd_phases_clamped(const RbmParams& rbm, const BinaryState& v,
                           const BinaryState& clamped_hidden, Rng& rng);

/// One CD-1 step; returns the deltas without applying them.
CdDeltas cd_update(const RbmParams& rbm, const BinaryState& v, double learning_rate, Rng& rng);

/// Applies the update of `phases` to `rbm` in place (rank-1 updates, no temporaries).
void apply_cd_update(RbmParams& rbm, const CdPhases& phases, double learning_rate);

/// Training images with optional labels (labels may be empty when no RBM is clamped).
struct TrainingSet {
    std::span<const BinaryState> images;
    std::span<const int> labels;
};

/// Contrastive-divergence training of a DBN. Deterministic for a fixed seed.
DbnModel train_dbn(const TrainingSet& data, const NetworkTopology& topology,
                   const TrainConfig& cfg);

/// Forward pass through the stack. averaging_samples == 0 propagates mean
/// activations; otherwise every layer is sampled and the top-layer bits are
/// averaged over that many stochastic passes.
Vector software_infer(const DbnModel& model, const BinaryState& input, int averaging_samples,
                      Rng& rng);

/// Index of the largest score; ties resolve to the lowest index.
int argmax(const Vector& scores);

}  // namespace pinsim
