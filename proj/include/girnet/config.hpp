#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "girnet/model.hpp"

namespace girnet {

/// Parsed run configuration. JSON sections: model, optimizer, loss, data,
/// output. Command-line overrides use dotted paths into the JSON document
/// (e.g. --loss.lambda 0.01) and are applied before parsing.
struct RunConfig {
    // model
    std::string model_kind = "girnet"; // girnet | lstm | meanpool-bow
    Index m = 2;
    Index d = 64;
    Index d_prime = 32;
    Index d_emb = 32;
    std::string prim_head = "token-tag";
    std::vector<std::string> aux_heads; // defaulted per task when empty
    bool bidir_gating = false;
    Index classes = 0; // 0 = infer from the training corpus

    // optimizer
    AdamConfig adam;
    Index epochs = 15;
    Index batch_size = 16;
    std::uint64_t seed = 0;

    // loss
    std::vector<double> alpha; // defaulted to 1.0 per task when empty
    double lambda = 0.0;

    // data
    bool has_synthetic = false;
    std::string synthetic_task = "codeswitch-tag"; // codeswitch-tag | codeswitch-classify | targeted
    SyntheticTaskSpec synthetic;
    Index primary_train_count = 2000;
    Index primary_test_count = 500;
    Index aux_count = 4000;
    std::string data_dir = "data";
    std::string primary_train_path;
    std::string primary_test_path;
    std::string routing_path;
    std::vector<std::string> aux_paths;

    // output
    std::string checkpoint_path = "girnet.ckpt";
    std::string metrics_path = "metrics.jsonl";
    std::string trace_path = "trace.csv";

    /// Cross-field checks that need no data (alpha length, head kinds, ...).
    void validate() const;

    LossWeights loss_weights() const;
};

/// Loads the file, applies dotted overrides, then the GIRNET_SEED
/// environment variable if set.
RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

} // namespace girnet
