#include "basisn/types.hpp"

#include <string>

namespace basisn {

void LayerShape::validate() const {
    if (n <= 0 || t <= 0 || w <= 0 || h <= 0) {
        throw DimensionError("layer shape must be positive, got (n=" +
                             std::to_string(n) + ", t=" + std::to_string(t) +
                             ", w=" + std::to_string(w) +
                             ", h=" + std::to_string(h) + ")");
    }
}

void NetworkSpec::validate() const {
    if (layers.empty()) {
        throw DataError("network spec '" + name + "' has no layers");
    }
    for (const auto& layer : layers) {
        layer.validate();
    }
}

long long NetworkSpec::total_weights() const {
    long long total = 0;
    for (const auto& layer : layers) {
        total += static_cast<long long>(layer.n) * layer.flat_len();
    }
    return total;
}

void QuantizationConfig::validate() const {
    if (coeff_bits < kMinCoeffBits || coeff_bits > kMaxCoeffBits) {
        throw ConfigError("coeff_bits must be in [1, 16], got " +
                          std::to_string(coeff_bits));
    }
    if (cell_bits < kMinCellBits || cell_bits > kMaxCellBits) {
        throw ConfigError("cell_bits must be in [1, 6], got " +
                          std::to_string(cell_bits));
    }
}

void CrossbarConfig::validate() const {
    if (dim <= 0) {
        throw DimensionError("crossbar dim must be positive, got " +
                             std::to_string(dim));
    }
    if (num_crossbars <= 0) {
        throw ConfigError("num_crossbars must be positive, got " +
                          std::to_string(num_crossbars));
    }
    if (tg_groups < 1) {
        throw ConfigError("tg_groups must be at least 1, got " +
                          std::to_string(tg_groups));
    }
    QuantizationConfig{coeff_bits, cell_bits}.validate();
}

}  // namespace basisn
