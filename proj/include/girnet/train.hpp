#pragma once

#include <memory>
#include <ostream>

#include "girnet/config.hpp"

namespace girnet {

struct EpochLog {
    Index epoch = 0;
    double loss_all = 0.0;
    double loss_prim = 0.0;
    double loss_reg = 0.0;
    std::vector<double> loss_aux;
    double dev_accuracy = 0.0;
};

/// One line-delimited JSON object per epoch.
std::string epoch_log_json(const EpochLog& log);

struct DataBundle {
    LabeledCorpus primary_train;
    LabeledCorpus primary_test;
    std::vector<LabeledCorpus> aux;

    Index vocab_size() const { return primary_train.vocab_size(); }
};

/// In-memory synthetic corpora per the config's data.synthetic section. The
/// test split draws from a seed stream disjoint from the training split's.
DataBundle generate_bundle(const RunConfig& config);

/// Corpora from the TSV paths in the config, with one token vocabulary shared
/// across the primary and auxiliary files (built in that order, first-seen).
/// Test tokens unseen in training map to the unknown id.
DataBundle load_bundle(const RunConfig& config);

std::unique_ptr<SequenceModel> build_model(const RunConfig& config, const DataBundle& data);

struct TrainOutcome {
    std::vector<EpochLog> epochs;
    long nan_step = -1; // >= 0: aborted at this global step with non-finite loss
};

/// Fixed small configuration exercising every pathway of the joint loss
/// (masked rows, both auxiliary tasks, activity regularization). Entries
/// with gradients near the finite-difference noise floor would corrupt the
/// relative-error report, so the fixture pins its seeds.
struct GradcheckFixture {
    ModelConfig model_config;
    SequenceBatch primary;
    std::vector<SequenceBatch> aux;
    LossWeights weights;
    std::uint64_t model_seed = 1;
};

GradcheckFixture gradcheck_fixture();

/// Joint training: each step consumes one primary batch plus one batch per
/// auxiliary task (round-robin over per-epoch shuffles). Logs one JSON line
/// per epoch to metrics_out when given.
TrainOutcome train_model(SequenceModel& model, const RunConfig& config, const DataBundle& data,
                         std::ostream* metrics_out);

} // namespace girnet
