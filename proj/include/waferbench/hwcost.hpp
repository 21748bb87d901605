#pragma once

#include <cstddef>

#include "waferbench/htm.hpp"
#include "waferbench/lstm.hpp"
#include "waferbench/nn.hpp"

namespace waferbench::hwcost {

// Per-primitive constants. Area in um^2, power in mW.
struct CostTable {
    double memristor_area_um2 = 0.0;
    double neuron_area_um2 = 0.0;
    double gate_block_area_um2 = 0.0;
    double memristor_power_mw = 0.0;
    double neuron_power_mw = 0.0;
    double gate_block_power_mw = 0.0;

    void validate() const;
};

// Hardware primitive counts. Every weight and bias is a differential pair.
struct Inventory {
    std::size_t memristor_count = 0;
    std::size_t neuron_count = 0;
    std::size_t gate_block_count = 0;

    bool operator==(const Inventory&) const = default;
};

struct Estimate {
    double area_um2 = 0.0;
    double power_mw = 0.0;
};

// Neurons: one per non-input node.
Inventory inventory(const NetworkSpec& spec);
// Gate blocks: one per gate per hidden unit. Neurons: one tanh(c) output per
// hidden unit plus the read-out neuron.
Inventory inventory(const LstmConfig& config);
// Potential synapses are counted as weights, each column as a neuron, plus
// the perceptron read-out over the SDR.
Inventory inventory(const htm::SpatialPoolerConfig& pooler, std::size_t input_width);

Estimate estimate(const Inventory& inv, const CostTable& table);

}  // namespace waferbench::hwcost
