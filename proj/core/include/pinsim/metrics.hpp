#pragma once

#include <span>
#include <vector>

#include "pinsim/rbm.hpp"

namespace pinsim {

struct Metrics {
    double err = 0.0;   // N_F / N
    double rmse = 0.0;  // against one-hot targets
    std::size_t num_samples = 0;
    std::size_t num_false = 0;
};

/// ERR = N_F / N and RMSE = sqrt(1/(M N) sum_k ||y_k - F(x_k)||^2) with y_k one-hot.
Metrics compute_metrics(std::span<const int> predictions, std::span<const Vector> scores,
                        std::span<const int> labels, std::size_t num_classes);

/// counts[label][prediction]
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;
ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels,
                                 std::size_t num_classes);

}  // namespace pinsim
