#include <optional>

#include "pinsim/error.hpp"
#include "pinsim/rbm.hpp"

namespace pinsim {

namespace {

RbmParams init_rbm(std::size_t n_visible, std::size_t n_hidden, double sigma, Rng& rng) {
    RbmParams rbm = RbmParams::zeros(n_visible, n_hidden);
    if (sigma > 0.0)
        rbm.weights = rbm.weights.unaryExpr([&](double) { return sigma * rng.normal(); });
    return rbm;
}

BinaryState one_hot(int label, std::size_t n) {
    require(label >= 0 && static_cast<std::size_t>(label) < n,
            "label " + std::to_string(label) + " out of range for the output layer");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v[label] = 1.0;
    return BinaryState(std::move(v));
}

class Trainer {
public:
    Trainer(const TrainingSet& data, const NetworkTopology& topology, const TrainConfig& cfg)
        : data_(data), cfg_(cfg), rng_(Rng::stream(cfg.rng_seed, 0)) {
        model_.topology = topology;
        model_.train_config = cfg;
        for (std::size_t j = 0; j < topology.num_rbms(); ++j)
            model_.rbms.push_back(init_rbm(topology.layer_sizes[j], topology.layer_sizes[j + 1],
                                           cfg.init_weight_sigma, rng_));
    }

    DbnModel run() {
        if (cfg_.literal_alg1)
            train_literal();
        else
            train_greedy();
        return std::move(model_);
    }

private:
    std::size_t num_samples() const { return std::min(cfg_.num_train_samples, data_.images.size()); }

    bool clamps(std::size_t rbm_index) const {
        return cfg_.clamp_labels_top && rbm_index + 1 == model_.rbms.size() && !data_.labels.empty();
    }

    void step(std::size_t j, const BinaryState& v, std::size_t sample) {
        RbmParams& rbm = model_.rbms[j];
        for (int k = 0; k < cfg_.max_iter; ++k) {
            const CdPhases phases =
                clamps(j) ? cd_phases_clamped(rbm, v, one_hot(data_.labels[sample], rbm.n_hidden()), rng_)
                          : cd_phases(rbm, v, rng_);
            apply_cd_update(rbm, phases, cfg_.learning_rate);
        }
    }

    // Each RBM is trained to completion on representations sampled from the
    // already-trained layers below it.
    void train_greedy() {
        const std::size_t n = num_samples();
        std::vector<BinaryState> layer_input(data_.images.begin(), data_.images.begin() + n);
        for (std::size_t j = 0; j < model_.rbms.size(); ++j) {
            for (int epoch = 0; epoch < cfg_.epochs; ++epoch)
                for (std::size_t i = 0; i < n; ++i) step(j, layer_input[i], i);
            if (j + 1 < model_.rbms.size()) {
                for (auto& x : layer_input)
                    x = sample_layer(hidden_probabilities(model_.rbms[j], x.values()), rng_);
            }
        }
    }

    // Per sample, every RBM in turn receives max_iter CD steps, the sample
    // being pushed up through the freshly updated RBM before the next one.
    void train_literal() {
        const std::size_t n = num_samples();
        for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
            for (std::size_t i = 0; i < n; ++i) {
                BinaryState v = data_.images[i];
                for (std::size_t j = 0; j < model_.rbms.size(); ++j) {
                    step(j, v, i);
                    if (j + 1 < model_.rbms.size())
                        v = sample_layer(hidden_probabilities(model_.rbms[j], v.values()), rng_);
                }
            }
        }
    }

    const TrainingSet& data_;
    const TrainConfig& cfg_;
    Rng rng_;
    DbnModel model_;
};

}  // namespace

DbnModel train_dbn(const TrainingSet& data, const NetworkTopology& topology, const TrainConfig& cfg) {
    topology.validate();
    cfg.validate();
    if (data.images.empty()) throw ContractError("training set is empty");
    if (!data.labels.empty() && data.labels.size() != data.images.size())
        throw ContractError("training labels and images differ in count");
    for (const auto& img : data.images)
        require(img.size() == topology.num_visible(), "training image does not match the visible layer");
    return Trainer(data, topology, cfg).run();
}

}  // namespace pinsim
