#include "pinsim/rbm.hpp"

#include <cmath>
#include <sstream>

#include "pinsim/error.hpp"

namespace pinsim {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
    if (!m.allFinite()) throw ContractError(std::string(what) + " contains non-finite entries");
}

}  // namespace

BinaryState::BinaryState(Vector bits) : bits_(std::move(bits)) {
    for (Eigen::Index i = 0; i < bits_.size(); ++i) {
        if (bits_[i] != 0.0 && bits_[i] != 1.0)
            throw ContractError("binary state entry " + std::to_string(i) + " is not 0 or 1");
    }
}

BinaryState BinaryState::zeros(std::size_t n) {
    return BinaryState(Vector::Zero(static_cast<Eigen::Index>(n)));
}

BinaryState BinaryState::from_bits(std::span<const int> bits) {
    Vector v(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) v[static_cast<Eigen::Index>(i)] = bits[i];
    return BinaryState(std::move(v));
}

std::uint64_t BinaryState::code() const {
    require(size() <= 63, "state too large to pack into an integer");
    std::uint64_t c = 0;
    for (Eigen::Index i = 0; i < bits_.size(); ++i)
        if (bits_[i] != 0.0) c |= std::uint64_t{1} << i;
    return c;
}

NetworkTopology NetworkTopology::parse(const std::string& text) {
    NetworkTopology t;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, 'x')) {
        try {
            std::size_t used = 0;
            long long n = std::stoll(part, &used);
            if (used != part.size() || n < 1) throw std::invalid_argument(part);
            t.layer_sizes.push_back(static_cast<std::size_t>(n));
        } catch (const std::exception&) {
            throw ConfigError("invalid topology '" + text + "'");
        }
    }
    t.validate();
    return t;
}

std::string NetworkTopology::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(layer_sizes[i]);
    }
    return s;
}

void NetworkTopology::validate() const {
    if (layer_sizes.size() < 2) throw ContractError("topology needs at least two layers");
    for (auto n : layer_sizes)
        if (n < 1) throw ContractError("topology layer sizes must be positive");
}

RbmParams RbmParams::zeros(std::size_t n_visible, std::size_t n_hidden) {
    const auto nv = static_cast<Eigen::Index>(n_visible);
    const auto nh = static_cast<Eigen::Index>(n_hidden);
    return RbmParams{Matrix::Zero(nv, nh), Vector::Zero(nh), Vector::Zero(nv)};
}

void RbmParams::validate() const {
    if (hidden_bias.size() != weights.cols() || visible_bias.size() != weights.rows())
        throw ContractError("RBM bias sizes do not match the weight matrix");
    require_finite(weights, "weight matrix");
    require_finite(hidden_bias, "hidden bias");
    require_finite(visible_bias, "visible bias");
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (num_train_samples < 1) throw ConfigError("num_train_samples must be >= 1");
    if (!(init_weight_sigma >= 0.0)) throw ConfigError("init_weight_sigma must be >= 0");
}

void DbnModel::validate() const {
    topology.validate();
    if (rbms.size() != topology.num_rbms())
        throw ContractError("model has " + std::to_string(rbms.size()) + " RBMs, topology needs " +
                            std::to_string(topology.num_rbms()));
    for (std::size_t j = 0; j < rbms.size(); ++j) {
        rbms[j].validate();
        if (rbms[j].n_visible() != topology.layer_sizes[j] ||
            rbms[j].n_hidden() != topology.layer_sizes[j + 1])
            throw ContractError("RBM " + std::to_string(j) + " does not match its layer pair");
    }
}

double network_energy(const BinaryState& visible, const BinaryState& hidden, const RbmParams& rbm) {
    require(visible.size() == rbm.n_visible(), "visible state size does not match the RBM");
    require(hidden.size() == rbm.n_hidden(), "hidden state size does not match the RBM");
    const Vector& v = visible.values();
    const Vector& h = hidden.values();
    return -rbm.visible_bias.dot(v) - rbm.hidden_bias.dot(h) - v.dot(rbm.weights * h);
}

double activation_probability(double bias, const Vector& incoming_weights,
                              const BinaryState& source_state) {
    require(static_cast<std::size_t>(incoming_weights.size()) == source_state.size(),
            "weight vector and source state differ in length");
    if (!std::isfinite(bias) || !incoming_weights.allFinite())
        throw ContractError("activation inputs must be finite");
    return sigmoid(bias + incoming_weights.dot(source_state.values()));
}

Vector hidden_probabilities(const RbmParams& rbm, const Vector& visible) {
    Vector z = rbm.hidden_bias;
    z.noalias() += rbm.weights.transpose() * visible;
    return z.unaryExpr([](double x) { return sigmoid(x); });
}

Vector visible_probabilities(const RbmParams& rbm, const Vector& hidden) {
    Vector z = rbm.visible_bias;
    z.noalias() += rbm.weights * hidden;
    return z.unaryExpr([](double x) { return sigmoid(x); });
}

BinaryState sample_layer(const Vector& probabilities, Rng& rng) {
    Vector bits(probabilities.size());
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
        const double p = probabilities[i];
        require(p >= 0.0 && p <= 1.0, "sampling probability outside [0, 1]");
        bits[i] = rng.uniform() < p ? 1.0 : 0.0;
    }
    return BinaryState(std::move(bits));
}

namespace {

CdPhases finish_phases(const RbmParams& rbm, Vector v, Vector h, Rng& rng) {
    Vector v_recon = sample_layer(visible_probabilities(rbm, h), rng).values();
    Vector h_recon = hidden_probabilities(rbm, v_recon);
    return CdPhases{std::move(v), std::move(h), std::move(v_recon), std::move(h_recon)};
}

}  // namespace

CdPhases cd_phases(const RbmParams& rbm, const BinaryState& v, Rng& rng) {
    require(v.size() == rbm.n_visible(), "training vector does not match the visible layer");
    Vector h = sample_layer(hidden_probabilities(rbm, v.values()), rng).values();
    return finish_phases(rbm, v.values(), std::move(h), rng);
}

CdPhases cd_phases_clamped(const RbmParams& rbm, const BinaryState& v,
                           const BinaryState& clamped_hidden, Rng& rng) {
    require(v.size() == rbm.n_visible(), "training vector does not match the visible layer");
    require(clamped_hidden.size() == rbm.n_hidden(), "clamped state does not match the hidden layer");
    return finish_phases(rbm, v.values(), clamped_hidden.values(), rng);
}

CdDeltas cd_deltas(const CdPhases& p, double learning_rate) {
    require(p.v.size() == p.v_recon.size() && p.h.size() == p.h_recon.size(),
            "CD phases have inconsistent sizes");
    CdDeltas d;
    d.dW = learning_rate * (p.v * p.h.transpose() - p.v_recon * p.h_recon.transpose());
    d.dB = learning_rate * (p.h - p.h_recon);
    d.dC = learning_rate * (p.v - p.v_recon);
    return d;
}

CdDeltas cd_update(const RbmParams& rbm, const BinaryState& v, double learning_rate, Rng& rng) {
    return cd_deltas(cd_phases(rbm, v, rng), learning_rate);
}

void apply_cd_update(RbmParams& rbm, const CdPhases& p, double learning_rate) {
    rbm.weights.noalias() += learning_rate * p.v * p.h.transpose();
    rbm.weights.noalias() -= learning_rate * p.v_recon * p.h_recon.transpose();
    rbm.hidden_bias += learning_rate * (p.h - p.h_recon);
    rbm.visible_bias += learning_rate * (p.v - p.v_recon);
}

Vector software_infer(const DbnModel& model, const BinaryState& input, int averaging_samples,
                      Rng& rng) {
    require(input.size() == model.topology.num_visible(), "input does not match the visible layer");
    require(averaging_samples >= 0, "averaging_samples must be >= 0");
    if (averaging_samples == 0) {
        Vector a = input.values();
        for (const auto& rbm : model.rbms) a = hidden_probabilities(rbm, a);
        return a;
    }
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(model.topology.num_outputs()));
    for (int s = 0; s < averaging_samples; ++s) {
        Vector a = input.values();
        for (const auto& rbm : model.rbms) a = sample_layer(hidden_probabilities(rbm, a), rng).values();
        acc += a;
    }
    return acc / averaging_samples;
}

int argmax(const Vector& scores) {
    require(scores.size() > 0, "argmax of an empty vector");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return static_cast<int>(best);
}

}  // namespace pinsim
