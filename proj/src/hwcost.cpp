#include "waferbench/hwcost.hpp"

#include <algorithm>
#include <cmath>

#include "waferbench/errors.hpp"

namespace waferbench::hwcost {

void CostTable::validate() const {
    for (double v : {memristor_area_um2, neuron_area_um2, gate_block_area_um2, memristor_power_mw, neuron_power_mw,
                     gate_block_power_mw}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("cost constants must be finite and >= 0");
    }
}

Inventory inventory(const NetworkSpec& spec) {
    if (spec.layer_sizes.empty()) return {};
    spec.validate();
    std::size_t weights = 0;
    std::size_t biases = 0;
    std::size_t neurons = 0;
    for (std::size_t k = 0; k + 1 < spec.layer_sizes.size(); ++k) {
        weights += spec.layer_sizes[k] * spec.layer_sizes[k + 1];
        if (spec.use_bias) biases += spec.layer_sizes[k + 1];
        neurons += spec.layer_sizes[k + 1];
    }
    return {2 * weights + 2 * biases, neurons, 0};
}

Inventory inventory(const LstmConfig& config) {
    config.validate();
    const std::size_t in = config.input_dim;
    const std::size_t hid = config.hidden_dim;
    const std::size_t weights = gate_count * (hid * in + hid * hid) + hid;
    const std::size_t biases = gate_count * hid + 1;
    return {2 * weights + 2 * biases, hid + 1, gate_count * hid};
}

Inventory inventory(const htm::SpatialPoolerConfig& pooler, std::size_t input_width) {
    pooler.validate();
    const auto pool_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(pooler.potential_fraction * static_cast<double>(input_width))));
    const std::size_t weights = pooler.num_columns * pool_size + pooler.num_columns;
    const std::size_t biases = 1;
    return {2 * weights + 2 * biases, pooler.num_columns + 1, 0};
}

Estimate estimate(const Inventory& inv, const CostTable& t) {
    t.validate();
    const auto m = static_cast<double>(inv.memristor_count);
    const auto n = static_cast<double>(inv.neuron_count);
    const auto g = static_cast<double>(inv.gate_block_count);
    return {m * t.memristor_area_um2 + n * t.neuron_area_um2 + g * t.gate_block_area_um2,
            m * t.memristor_power_mw + n * t.neuron_power_mw + g * t.gate_block_power_mw};
}

}  // namespace waferbench::hwcost
