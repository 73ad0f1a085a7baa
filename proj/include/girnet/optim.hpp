#pragma once

#include "girnet/params.hpp"

namespace girnet {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0; // global-norm clip; <= 0 disables
};

/// Adam with bias correction and global-norm gradient clipping. Moments are
/// keyed by parameter path and created lazily on first update.
class OptimizerState {
public:
    explicit OptimizerState(AdamConfig config = {}) : config_(config) {}

    const AdamConfig& config() const { return config_; }
    long step_count() const { return step_count_; }

    /// One update over every parameter in the store. Clips gradients by
    /// global norm first, zeroes them afterwards.
    void step(ParamStore& store);

private:
    struct Moments {
        Tensor m, v;
    };
    AdamConfig config_;
    std::map<std::string, Moments> moments_;
    long step_count_ = 0;
};

inline void adam_step(OptimizerState& state, ParamStore& store) { state.step(store); }

} // namespace girnet
