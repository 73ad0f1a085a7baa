#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "girnet/girnet_cell.hpp"
#include "girnet/metrics.hpp"
#include "girnet/optim.hpp"
#include "girnet/tasks.hpp"

namespace girnet {

enum class HeadKind {
    SequenceClassifyLast,
    SequenceClassifyMeanpool,
    TokenTag,
    TargetSplitWeightedPool,
};

HeadKind head_kind_from_string(const std::string& name);
std::string to_string(HeadKind kind);

struct LossWeights {
    std::vector<double> alpha; // one non-negative weight per auxiliary task
    double lambda = 0.0;       // activity regularization strength
};

/// Rectangular view of a slice of a corpus, padded to the longest member.
struct SequenceBatch {
    std::vector<std::vector<int>> tokens;     // [B][n], kPadId padding
    std::vector<std::vector<double>> mask;    // [B][n] in {0, 1}
    std::vector<int> labels;                  // [B] (classification)
    std::vector<std::vector<int>> tag_labels; // [B][n] (tagging)
    std::vector<std::pair<int, int>> spans;   // 1-based inclusive, (-1,-1) if absent
    TaskKind kind = TaskKind::Classify;

    Index size() const { return static_cast<Index>(tokens.size()); }
    Index length() const { return tokens.empty() ? 0 : static_cast<Index>(tokens[0].size()); }
};

SequenceBatch make_batch(const LabeledCorpus& corpus, std::span<const int> indices);

/// lambda * sum_t sum_j min(g[t,j], 1 - g[t,j]) for one sequence's trace.
double activity_reg(const GateTrace& trace, double lambda);

struct TraceRow {
    int position; // 1-based
    std::string token;
    std::vector<double> g;
    double skip;
};

/// One row per position of the trace; token list must match its length.
std::vector<TraceRow> export_gate_trace(const GateTrace& trace,
                                        std::span<const std::string> tokens);

/// "pos, token, g1, ..., skip" with six decimal places.
std::string format_trace_row(const TraceRow& row);

struct LossReport {
    double total = 0.0;
    double primary = 0.0;
    double reg = 0.0;
    std::vector<double> aux;
};

struct EvalResult {
    Metrics metrics;
    double agreement = -1.0;  // argmax-gate vs routing truth; -1 when unavailable
    double mean_fence = -1.0; // mean of min(g, 1-g) over evaluated positions
};

struct ModelConfig {
    Index m = 2;
    Index d = 64;       // auxiliary/composite hidden size
    Index d_prime = 32; // gating hidden size
    Index d_emb = 32;
    Index vocab = 0;
    Index prim_classes = 0;
    std::vector<Index> aux_classes;
    HeadKind prim_head = HeadKind::TokenTag;
    std::vector<HeadKind> aux_heads;
    bool bidir_gating = false;

    bool target_split() const { return prim_head == HeadKind::TargetSplitWeightedPool; }
    void validate() const;
};

/// Training/evaluation surface shared by the full model and the reference
/// baselines used in comparisons.
class SequenceModel {
public:
    virtual ~SequenceModel() = default;

    virtual LossReport train_step(const SequenceBatch& primary,
                                  std::span<const SequenceBatch> aux, const LossWeights& weights,
                                  OptimizerState& opt) = 0;

    /// Forward-only loss decomposition (no parameter update).
    virtual LossReport compute_losses(const SequenceBatch& primary,
                                      std::span<const SequenceBatch> aux,
                                      const LossWeights& weights) = 0;

    virtual EvalResult evaluate(const LabeledCorpus& corpus, Index batch_size = 32) = 0;

    virtual ParamStore& store() = 0;
    virtual Index num_aux_tasks() const = 0;
};

class GirnetModel : public SequenceModel {
public:
    GirnetModel(ModelConfig config, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }
    ParamStore& store() override { return store_; }
    Index num_aux_tasks() const override { return config_.m; }

    struct PrimForward {
        Var loss;                          // mean cross-entropy
        Var reg;                           // lambda-weighted activity term
        std::vector<Var> logit_steps;      // tagging: one per position; else one entry
        std::vector<GateTrace> traces;     // per example, real positions only
        std::vector<GateTrace> traces_aux; // right-side traces (target split)
    };

    /// Auxiliary task j as a plain LSTM over its own batch; mean
    /// cross-entropy over unmasked targets.
    Var forward_aux(Graph& g, const SequenceBatch& batch, Index j);

    PrimForward forward_prim(Graph& g, const SequenceBatch& batch, double lambda);

    LossReport train_step(const SequenceBatch& primary, std::span<const SequenceBatch> aux,
                          const LossWeights& weights, OptimizerState& opt) override;
    LossReport compute_losses(const SequenceBatch& primary, std::span<const SequenceBatch> aux,
                              const LossWeights& weights) override;

    EvalResult evaluate(const LabeledCorpus& corpus, Index batch_size = 32) override;

    /// Gate traces for every example of a corpus (real positions only). For
    /// the target-split head the pair holds (left, right) traces.
    std::vector<std::pair<GateTrace, GateTrace>> trace_corpus(const LabeledCorpus& corpus,
                                                              Index batch_size = 32);

private:
    GirnetCellParams bind_cell(Graph& g, const std::string& prefix);
    Var head_logits(Graph& g, const std::string& path, Var features);
    Var forward_aux_target_split(Graph& g, const SequenceBatch& batch);
    PrimForward forward_prim_standard(Graph& g, const SequenceBatch& batch, double lambda);
    PrimForward forward_prim_target_split(Graph& g, const SequenceBatch& batch, double lambda);
    LossReport losses_into_graph(Graph& g, const SequenceBatch& primary,
                                 std::span<const SequenceBatch> aux, const LossWeights& weights,
                                 Var* loss_all);

    ModelConfig config_;
    ParamStore store_;
};

/// No-MTL reference: one LSTM over the primary data with a task head.
class PlainLstmModel : public SequenceModel {
public:
    PlainLstmModel(Index vocab, Index d_emb, Index d, Index classes, HeadKind head,
                   std::uint64_t seed);

    ParamStore& store() override { return store_; }
    Index num_aux_tasks() const override { return 0; }

    LossReport train_step(const SequenceBatch& primary, std::span<const SequenceBatch> aux,
                          const LossWeights& weights, OptimizerState& opt) override;
    LossReport compute_losses(const SequenceBatch& primary, std::span<const SequenceBatch> aux,
                              const LossWeights& weights) override;
    EvalResult evaluate(const LabeledCorpus& corpus, Index batch_size = 32) override;

private:
    Var forward_loss(Graph& g, const SequenceBatch& batch, std::vector<Var>* logit_steps);

    Index d_;
    HeadKind head_;
    ParamStore store_;
};

/// Order-blind reference: mean-pooled embeddings into a linear classifier.
class MeanpoolBowModel : public SequenceModel {
public:
    MeanpoolBowModel(Index vocab, Index d_emb, Index classes, std::uint64_t seed);

    ParamStore& store() override { return store_; }
    Index num_aux_tasks() const override { return 0; }

    LossReport train_step(const SequenceBatch& primary, std::span<const SequenceBatch> aux,
                          const LossWeights& weights, OptimizerState& opt) override;
    LossReport compute_losses(const SequenceBatch& primary, std::span<const SequenceBatch> aux,
                              const LossWeights& weights) override;
    EvalResult evaluate(const LabeledCorpus& corpus, Index batch_size = 32) override;

private:
    Var forward_loss(Graph& g, const SequenceBatch& batch, Var* logits);

    ParamStore store_;
};

} // namespace girnet
