#pragma once

#include <cmath>

namespace pinsim {

/// 1 / (1 + e^-z), evaluated without overflow for large |z|.
inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace pinsim
