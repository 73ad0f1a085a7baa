#include "girnet/metrics.hpp"

namespace girnet {

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> golds,
                        int num_classes) {
    if (predictions.size() != golds.size())
        throw ContractError("compute_metrics: prediction/gold count mismatch");
    if (num_classes < 2) throw ContractError("compute_metrics: need at least two classes");

    std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    long correct = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i];
        const int y = golds[i];
        if (p < 0 || p >= num_classes || y < 0 || y >= num_classes)
            throw DataError("compute_metrics: class index out of range");
        if (p == y) {
            ++tp[p];
            ++correct;
        } else {
            ++fp[p];
            ++fn[y];
        }
    }

    Metrics m;
    const double n = static_cast<double>(predictions.size());
    m.accuracy = predictions.empty() ? 0.0 : static_cast<double>(correct) / n;
    for (int c = 0; c < num_classes; ++c) {
        const double prec = tp[c] + fp[c] > 0 ? double(tp[c]) / double(tp[c] + fp[c]) : 0.0;
        const double rec = tp[c] + fn[c] > 0 ? double(tp[c]) / double(tp[c] + fn[c]) : 0.0;
        const double f1 = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        m.macro_precision += prec;
        m.macro_recall += rec;
        m.macro_f1 += f1;
    }
    m.macro_precision /= num_classes;
    m.macro_recall /= num_classes;
    m.macro_f1 /= num_classes;
    return m;
}

} // namespace girnet
