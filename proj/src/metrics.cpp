#include "waferbench/metrics.hpp"

#include "waferbench/activation.hpp"
#include "waferbench/errors.hpp"

namespace waferbench {

double Metrics::accuracy() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(true_positive + true_negative) / static_cast<double>(n);
}

double Metrics::recall_normal() const {
    const auto n = true_positive + false_negative;
    return n == 0 ? 0.0 : static_cast<double>(true_positive) / static_cast<double>(n);
}

double Metrics::recall_abnormal() const {
    const auto n = true_negative + false_positive;
    return n == 0 ? 0.0 : static_cast<double>(true_negative) / static_cast<double>(n);
}

double Metrics::balanced_accuracy() const {
    const bool has_normal = true_positive + false_negative > 0;
    const bool has_abnormal = true_negative + false_positive > 0;
    if (has_normal && has_abnormal) return 0.5 * (recall_normal() + recall_abnormal());
    if (has_normal) return recall_normal();
    if (has_abnormal) return recall_abnormal();
    return 0.0;
}

void Metrics::add(int label, int predicted) {
    if (label > 0) {
        (predicted > 0 ? true_positive : false_negative) += 1;
    } else {
        (predicted > 0 ? false_positive : true_negative) += 1;
    }
}

Metrics& Metrics::operator+=(const Metrics& o) {
    true_positive += o.true_positive;
    true_negative += o.true_negative;
    false_positive += o.false_positive;
    false_negative += o.false_negative;
    return *this;
}

Metrics score_predictions(std::span<const double> outputs, std::span<const int> labels) {
    if (outputs.size() != labels.size()) throw ShapeError("score_predictions: length mismatch");
    Metrics m;
    for (std::size_t i = 0; i < outputs.size(); ++i) m.add(labels[i], predicted_class(outputs[i]));
    return m;
}

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::linear: break;
    }
    return "linear";
}

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "linear") return Activation::linear;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

}  // namespace waferbench
