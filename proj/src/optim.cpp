#include "girnet/optim.hpp"

#include <cmath>

namespace girnet {

void OptimizerState::step(ParamStore& store) {
    if (config_.clip_norm > 0.0) {
        double sq = 0.0;
        for (auto& [path, node] : store) sq += node->grad.flat().square().sum();
        const double norm = std::sqrt(sq);
        if (norm > config_.clip_norm) {
            const double factor = config_.clip_norm / norm;
            for (auto& [path, node] : store) node->grad.flat() *= factor;
        }
    }

    ++step_count_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));

    for (auto& [path, node] : store) {
        auto it = moments_.find(path);
        if (it == moments_.end()) {
            it = moments_.emplace(path, Moments{Tensor(node->value.shape()),
                                                Tensor(node->value.shape())}).first;
        }
        Moments& mo = it->second;
        if (!mo.m.same_shape(node->value))
            throw ContractError("optimizer moments do not match parameter " + path);

        mo.m.flat() = config_.beta1 * mo.m.flat() + (1.0 - config_.beta1) * node->grad.flat();
        mo.v.flat() = config_.beta2 * mo.v.flat() +
                      (1.0 - config_.beta2) * node->grad.flat().square();
        node->value.flat() -= config_.lr * (mo.m.flat() / bc1) /
                              ((mo.v.flat() / bc2).sqrt() + config_.epsilon);
        node->zero_grad();
    }
}

} // namespace girnet
