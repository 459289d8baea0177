#include "pinsim/metrics.hpp"

#include <cmath>

#include "pinsim/error.hpp"

namespace pinsim {

Metrics compute_metrics(std::span<const int> predictions, std::span<const Vector> scores,
                        std::span<const int> labels, std::size_t num_classes) {
    require(num_classes >= 1, "need at least one class");
    require(!labels.empty(), "metrics need at least one sample");
    require(predictions.size() == labels.size() && scores.size() == labels.size(),
            "predictions, scores and labels differ in length");

    Metrics m;
    m.num_samples = labels.size();
    double sq = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        require(static_cast<std::size_t>(scores[k].size()) == num_classes,
                "score vector length differs from the class count");
        require(labels[k] >= 0 && static_cast<std::size_t>(labels[k]) < num_classes,
                "label out of range");
        if (predictions[k] != labels[k]) ++m.num_false;
        for (Eigen::Index c = 0; c < scores[k].size(); ++c) {
            const double y = (c == labels[k]) ? 1.0 : 0.0;
            sq += (y - scores[k][c]) * (y - scores[k][c]);
        }
    }
    const double n = static_cast<double>(m.num_samples);
    m.err = static_cast<double>(m.num_false) / n;
    m.rmse = std::sqrt(sq / (static_cast<double>(num_classes) * n));
    return m;
}

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels,
                                 std::size_t num_classes) {
    require(predictions.size() == labels.size(), "predictions and labels differ in length");
    ConfusionMatrix cm(num_classes, std::vector<std::size_t>(num_classes, 0));
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const auto l = static_cast<std::size_t>(labels[k]);
        const auto p = static_cast<std::size_t>(predictions[k]);
        require(l < num_classes && p < num_classes, "class index out of range");
        ++cm[l][p];
    }
    return cm;
}

}  // namespace pinsim
