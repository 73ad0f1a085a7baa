#pragma once

#include <span>
#include <vector>

#include "girnet/tensor.hpp"

namespace girnet {

struct Metrics {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

/// Macro-averaged metrics over all `num_classes` classes; zero denominators
/// count as 0 for the affected class.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> golds,
                        int num_classes);

} // namespace girnet
