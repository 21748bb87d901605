#pragma once

#include <cmath>
#include <string>
#include <string_view>

namespace waferbench {

enum class Activation { tanh, linear, sigmoid };

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::tanh: return std::tanh(z);
        case Activation::sigmoid: return sigmoid(z);
        case Activation::linear: break;
    }
    return z;
}

// Derivative expressed through the activation's output y = activate(a, z).
inline double activation_slope(Activation a, double y) {
    switch (a) {
        case Activation::tanh: return 1.0 - y * y;
        case Activation::sigmoid: return y * (1.0 - y);
        case Activation::linear: break;
    }
    return 1.0;
}

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

}  // namespace waferbench
