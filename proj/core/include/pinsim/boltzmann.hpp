#pragma once

#include <cstdint>
#include <vector>

#include "pinsim/rbm.hpp"

namespace pinsim {

/// Probability table over all joint states of a small RBM. Entry k holds the
/// state whose visible bits are the low n_visible bits of k and whose hidden
/// bits are the next n_hidden bits.
struct StateDistribution {
    std::size_t n_visible = 0;
    std::size_t n_hidden = 0;
    std::vector<double> probabilities;

    static std::size_t index_of(const BinaryState& v, const BinaryState& h);
    double total() const;
};

inline constexpr std::size_t kMaxEnumeratedNodes = 20;

/// P(s) = exp(-E(s)) / Z by full enumeration. Refuses networks with more than
/// kMaxEnumeratedNodes nodes.
StateDistribution exact_boltzmann_distribution(const RbmParams& rbm);

/// Block Gibbs sampling (h | v, then v | h). The joint state after each sweep
/// is counted; the chain starts from a uniformly random visible state.
StateDistribution gibbs_empirical_distribution(const RbmParams& rbm, std::uint64_t sweeps, Rng& rng);

double total_variation(const StateDistribution& a, const StateDistribution& b);

}  // namespace pinsim
