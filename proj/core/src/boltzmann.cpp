#include "pinsim/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pinsim/error.hpp"

namespace pinsim {

namespace {

BinaryState unpack(std::uint64_t code, std::size_t n) {
    Vector bits(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) bits[static_cast<Eigen::Index>(i)] = (code >> i) & 1u;
    return BinaryState(std::move(bits));
}

void require_enumerable(const RbmParams& rbm) {
    if (rbm.num_nodes() > kMaxEnumeratedNodes)
        throw ContractError("network has " + std::to_string(rbm.num_nodes()) +
                            " nodes; enumeration is limited to " +
                            std::to_string(kMaxEnumeratedNodes));
}

}  // namespace

std::size_t StateDistribution::index_of(const BinaryState& v, const BinaryState& h) {
    return static_cast<std::size_t>(v.code() | (h.code() << v.size()));
}

double StateDistribution::total() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

StateDistribution exact_boltzmann_distribution(const RbmParams& rbm) {
    rbm.validate();
    require_enumerable(rbm);
    const std::size_t nv = rbm.n_visible();
    const std::size_t nh = rbm.n_hidden();
    const std::size_t count = std::size_t{1} << (nv + nh);

    std::vector<double> neg_energy(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto v = unpack(k, nv);
        const auto h = unpack(k >> nv, nh);
        neg_energy[k] = -network_energy(v, h, rbm);
    }
    // Shift by the maximum so exp() cannot overflow; the shift cancels in Z.
    const double shift = *std::max_element(neg_energy.begin(), neg_energy.end());
    StateDistribution d{nv, nh, std::vector<double>(count)};
    double z = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        d.probabilities[k] = std::exp(neg_energy[k] - shift);
        z += d.probabilities[k];
    }
    for (auto& p : d.probabilities) p /= z;
    return d;
}

StateDistribution gibbs_empirical_distribution(const RbmParams& rbm, std::uint64_t sweeps, Rng& rng) {
    rbm.validate();
    require_enumerable(rbm);
    require(sweeps >= 1, "at least one Gibbs sweep is required");
    const std::size_t nv = rbm.n_visible();
    const std::size_t nh = rbm.n_hidden();

    std::vector<std::uint64_t> counts(std::size_t{1} << (nv + nh), 0);
    Vector v = sample_layer(Vector::Constant(static_cast<Eigen::Index>(nv), 0.5), rng).values();
    Vector h;
    for (std::uint64_t s = 0; s < sweeps; ++s) {
        h = sample_layer(hidden_probabilities(rbm, v), rng).values();
        v = sample_layer(visible_probabilities(rbm, h), rng).values();
        std::size_t code = 0;
        for (std::size_t i = 0; i < nv; ++i)
            if (v[static_cast<Eigen::Index>(i)] != 0.0) code |= std::size_t{1} << i;
        for (std::size_t j = 0; j < nh; ++j)
            if (h[static_cast<Eigen::Index>(j)] != 0.0) code |= std::size_t{1} << (nv + j);
        ++counts[code];
    }
    StateDistribution d{nv, nh, std::vector<double>(counts.size())};
    for (std::size_t k = 0; k < counts.size(); ++k)
        d.probabilities[k] = static_cast<double>(counts[k]) / static_cast<double>(sweeps);
    return d;
}

double total_variation(const StateDistribution& a, const StateDistribution& b) {
    require(a.probabilities.size() == b.probabilities.size(), "distributions differ in size");
    double tv = 0.0;
    for (std::size_t k = 0; k < a.probabilities.size(); ++k)
        tv += std::abs(a.probabilities[k] - b.probabilities[k]);
    return 0.5 * tv;
}

}  // namespace pinsim
