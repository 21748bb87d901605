#pragma once

#include <cstddef>
#include <span>

namespace waferbench {

// Confusion counts with +1 (normal) as the positive class.
struct Metrics {
    std::size_t true_positive = 0;   // label +1, predicted +1
    std::size_t true_negative = 0;   // label -1, predicted -1
    std::size_t false_positive = 0;  // label -1, predicted +1
    std::size_t false_negative = 0;  // label +1, predicted -1

    std::size_t total() const { return true_positive + true_negative + false_positive + false_negative; }
    double accuracy() const;
    // Recall of the +1 and -1 classes; 0 when the class is absent.
    double recall_normal() const;
    double recall_abnormal() const;
    // Mean of the per-class recalls over the classes present.
    double balanced_accuracy() const;

    void add(int label, int predicted);
    Metrics& operator+=(const Metrics& o);

    bool operator==(const Metrics&) const = default;
};

// Sign threshold with the tie sign(0) -> +1.
inline int predicted_class(double output) { return output >= 0.0 ? 1 : -1; }

Metrics score_predictions(std::span<const double> outputs, std::span<const int> labels);

}  // namespace waferbench
