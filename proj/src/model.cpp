#include "girnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace girnet {

HeadKind head_kind_from_string(const std::string& name) {
    if (name == "sequence-classify-last") return HeadKind::SequenceClassifyLast;
    if (name == "sequence-classify-meanpool") return HeadKind::SequenceClassifyMeanpool;
    if (name == "token-tag") return HeadKind::TokenTag;
    if (name == "target-split-weightedpool") return HeadKind::TargetSplitWeightedPool;
    throw ConfigError("unknown head kind: " + name);
}

std::string to_string(HeadKind kind) {
    switch (kind) {
        case HeadKind::SequenceClassifyLast: return "sequence-classify-last";
        case HeadKind::SequenceClassifyMeanpool: return "sequence-classify-meanpool";
        case HeadKind::TokenTag: return "token-tag";
        case HeadKind::TargetSplitWeightedPool: return "target-split-weightedpool";
    }
    return "?";
}

SequenceBatch make_batch(const LabeledCorpus& corpus, std::span<const int> indices) {
    if (indices.empty()) throw ContractError("make_batch: empty index list");
    SequenceBatch batch;
    batch.kind = corpus.kind;
    Index n = 0;
    for (int i : indices)
        n = std::max(n, static_cast<Index>(corpus.examples.at(i).tokens.size()));

    for (int i : indices) {
        const Example& ex = corpus.examples.at(i);
        const Index len = static_cast<Index>(ex.tokens.size());
        std::vector<int> toks(n, kPadId);
        std::vector<double> mask(n, 0.0);
        std::copy(ex.tokens.begin(), ex.tokens.end(), toks.begin());
        std::fill(mask.begin(), mask.begin() + len, 1.0);
        batch.tokens.push_back(std::move(toks));
        batch.mask.push_back(std::move(mask));

        if (corpus.kind == TaskKind::Tag) {
            std::vector<int> tags(n, 0);
            std::copy(ex.tags.begin(), ex.tags.end(), tags.begin());
            batch.tag_labels.push_back(std::move(tags));
            batch.labels.push_back(-1);
        } else {
            batch.labels.push_back(ex.label);
            batch.tag_labels.emplace_back();
        }
        batch.spans.emplace_back(ex.span_lo, ex.span_hi);
    }
    return batch;
}

double activity_reg(const GateTrace& trace, double lambda) {
    if (lambda < 0.0) throw ContractError("activity_reg: lambda must be non-negative");
    double total = 0.0;
    for (Index i = 0; i < trace.g.size(); ++i)
        total += std::min(trace.g[i], 1.0 - trace.g[i]);
    return lambda * total;
}

std::vector<TraceRow> export_gate_trace(const GateTrace& trace,
                                        std::span<const std::string> tokens) {
    if (static_cast<Index>(tokens.size()) != trace.g.rows())
        throw ContractError("export_gate_trace: " + std::to_string(tokens.size()) +
                            " tokens for a trace of length " + std::to_string(trace.g.rows()));
    std::vector<TraceRow> rows;
    for (Index t = 0; t < trace.g.rows(); ++t) {
        TraceRow row;
        row.position = static_cast<int>(t) + 1;
        row.token = tokens[t];
        for (Index j = 0; j < trace.g.cols(); ++j) row.g.push_back(trace.g.at(t, j));
        row.skip = trace.skip[t];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_trace_row(const TraceRow& row) {
    char buf[32];
    std::string out = std::to_string(row.position) + ", " + row.token;
    for (double v : row.g) {
        std::snprintf(buf, sizeof(buf), ", %.6f", v);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), ", %.6f", row.skip);
    out += buf;
    return out;
}

void ModelConfig::validate() const {
    if (m < 1) throw ConfigError("need at least one auxiliary task");
    if (d < 1 || d_prime < 1 || d_emb < 1) throw ConfigError("model widths must be positive");
    if (vocab < 2) throw ConfigError("vocabulary must include pad/unk plus real tokens");
    if (prim_classes < 2) throw ConfigError("primary task needs at least two classes");
    if (static_cast<Index>(aux_classes.size()) != m)
        throw ConfigError("expected " + std::to_string(m) + " auxiliary class counts");
    if (static_cast<Index>(aux_heads.size()) != m)
        throw ConfigError("expected " + std::to_string(m) + " auxiliary head kinds");
    for (Index c : aux_classes)
        if (c < 2) throw ConfigError("every auxiliary task needs at least two classes");
    if (target_split()) {
        if (m != 1) throw ConfigError("the target-split head uses a single auxiliary task");
        if (bidir_gating)
            throw ConfigError("bidirectional gating is not available for the target-split head");
    }
}

// ---- graph-building helpers ------------------------------------------------

namespace {

struct EmbeddedBatch {
    std::vector<Var> x;    // per position [d_emb x B]
    std::vector<Var> keep; // empty when nothing is padded
    std::vector<Var> drop;
    std::vector<double> lengths;
    double total_tokens = 0.0;
    Index batch = 0;
};

EmbeddedBatch embed_rows(Graph& g, Var emb, const std::vector<std::vector<int>>& tokens,
                         const std::vector<std::vector<double>>& mask) {
    EmbeddedBatch eb;
    eb.batch = static_cast<Index>(tokens.size());
    const Index n = tokens.empty() ? 0 : static_cast<Index>(tokens[0].size());

    bool any_padding = false;
    eb.lengths.assign(eb.batch, 0.0);
    for (Index b = 0; b < eb.batch; ++b) {
        for (Index t = 0; t < n; ++t) {
            eb.lengths[b] += mask[b][t];
            if (mask[b][t] == 0.0) any_padding = true;
        }
        eb.total_tokens += eb.lengths[b];
    }

    for (Index t = 0; t < n; ++t) {
        std::vector<int> ids(eb.batch);
        for (Index b = 0; b < eb.batch; ++b) ids[b] = tokens[b][t];
        eb.x.push_back(gather_rows(emb, ids));
        if (any_padding) {
            Tensor keep({eb.batch}), drop({eb.batch});
            for (Index b = 0; b < eb.batch; ++b) {
                keep[b] = mask[b][t];
                drop[b] = 1.0 - mask[b][t];
            }
            eb.keep.push_back(g.leaf(std::move(keep)));
            eb.drop.push_back(g.leaf(std::move(drop)));
        }
    }
    return eb;
}

EmbeddedBatch embed_batch(Graph& g, Var emb, const SequenceBatch& batch) {
    return embed_rows(g, emb, batch.tokens, batch.mask);
}

Var masked_mean(Graph& g, std::span<const Var> steps, const EmbeddedBatch& eb) {
    Var acc = eb.keep.empty() ? steps[0] : colwise_scale(steps[0], eb.keep[0]);
    for (size_t t = 1; t < steps.size(); ++t)
        acc = acc + (eb.keep.empty() ? steps[t] : colwise_scale(steps[t], eb.keep[t]));
    Tensor inv({eb.batch});
    for (Index b = 0; b < eb.batch; ++b) inv[b] = 1.0 / eb.lengths[b];
    return colwise_scale(acc, g.leaf(std::move(inv)));
}

std::vector<int> column_argmax(const Tensor& logits) {
    std::vector<int> out(logits.cols());
    for (Index c = 0; c < logits.cols(); ++c) {
        Index best;
        logits.mat().col(c).maxCoeff(&best);
        out[c] = static_cast<int>(best);
    }
    return out;
}

std::vector<double> ones_weights(Index n) { return std::vector<double>(n, 1.0); }

std::vector<GateTrace> extract_traces(std::span<const Var> gates,
                                      const std::vector<double>& lengths, Index m) {
    std::vector<GateTrace> traces;
    for (size_t b = 0; b < lengths.size(); ++b) {
        const Index len = static_cast<Index>(lengths[b]);
        if (len == 0) {
            traces.emplace_back(); // empty side: no positions, no trace rows
            continue;
        }
        Tensor g({len, m});
        for (Index t = 0; t < len; ++t)
            for (Index j = 0; j < m; ++j)
                g.at(t, j) = gates[t].value().rank() == 1 ? gates[t].value()[j]
                                                          : gates[t].value().at(j, b);
        traces.push_back(make_gate_trace(g));
    }
    return traces;
}

} // namespace

// ---- GirnetModel -----------------------------------------------------------

GirnetModel::GirnetModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)), store_(seed) {
    config_.validate();
    Rng& rng = store_.rng();

    store_.create("emb/E", init_param({config_.vocab, config_.d_emb}, InitScheme::ScaledUniform,
                                      rng));
    auto create_lstm = [&](const std::string& prefix, Index d_in, Index d_out) {
        LstmWeights w = init_lstm_weights(d_in, d_out, rng);
        store_.create(prefix + "/W", std::move(w.W));
        store_.create(prefix + "/b", std::move(w.b));
    };
    auto create_gate_head = [&](const std::string& prefix, Index feat) {
        GateHeadWeights w = init_gate_head_weights(feat, config_.target_split() ? 1 : config_.m, rng);
        store_.create(prefix + "/W", std::move(w.W));
        store_.create(prefix + "/b", std::move(w.b));
    };
    auto create_head = [&](const std::string& prefix, Index in, Index classes) {
        store_.create(prefix + "/W", init_param({classes, in}, InitScheme::ScaledUniform, rng));
        store_.create(prefix + "/b", Tensor({classes}));
    };

    if (config_.target_split()) {
        for (const char* side : {"left", "right"}) {
            const std::string s(side);
            create_lstm(s + "/gating", config_.d_emb, config_.d_prime);
            create_gate_head(s + "/gate_head", config_.d_emb + config_.d_prime);
            create_lstm(s + "/aux", config_.d_emb, config_.d);
        }
        create_head("aux_head", 2 * config_.d, config_.aux_classes[0]);
        create_head("prim_head", 2 * config_.d, config_.prim_classes);
    } else {
        create_lstm("gating", config_.d_emb, config_.d_prime);
        if (config_.bidir_gating) create_lstm("gating_bwd", config_.d_emb, config_.d_prime);
        create_gate_head("gate_head",
                         config_.d_emb + (config_.bidir_gating ? 2 : 1) * config_.d_prime);
        for (Index j = 0; j < config_.m; ++j)
            create_lstm("aux/" + std::to_string(j) + "/cell", config_.d_emb, config_.d);
        for (Index j = 0; j < config_.m; ++j)
            create_head("aux/" + std::to_string(j) + "/head", config_.d, config_.aux_classes[j]);
        // Tagging reads h_comp per position; classification reads the
        // concatenated gating and composite features.
        const Index prim_in =
            config_.prim_head == HeadKind::TokenTag
                ? config_.d
                : (config_.bidir_gating ? 2 : 1) * config_.d_prime + config_.d;
        create_head("prim_head", prim_in, config_.prim_classes);
    }
}

GirnetCellParams GirnetModel::bind_cell(Graph& g, const std::string& prefix) {
    GirnetCellParams params{{g.use(store_.at(prefix + "gating/W")),
                             g.use(store_.at(prefix + "gating/b"))},
                            std::nullopt,
                            {g.use(store_.at(prefix + "gate_head/W")),
                             g.use(store_.at(prefix + "gate_head/b"))},
                            {}};
    if (config_.target_split()) {
        params.aux_cells.push_back(
            {g.use(store_.at(prefix + "aux/W")), g.use(store_.at(prefix + "aux/b"))});
        return params;
    }
    if (config_.bidir_gating)
        params.gating_bwd =
            LstmParams{g.use(store_.at("gating_bwd/W")), g.use(store_.at("gating_bwd/b"))};
    for (Index j = 0; j < config_.m; ++j) {
        const std::string cell = "aux/" + std::to_string(j) + "/cell";
        params.aux_cells.push_back({g.use(store_.at(cell + "/W")), g.use(store_.at(cell + "/b"))});
    }
    return params;
}

Var GirnetModel::head_logits(Graph& g, const std::string& path, Var features) {
    return add_col_broadcast(matmul(g.use(store_.at(path + "/W")), features),
                             g.use(store_.at(path + "/b")));
}

Var GirnetModel::forward_aux(Graph& g, const SequenceBatch& batch, Index j) {
    if (j < 0 || j >= config_.m) throw ContractError("auxiliary task index out of range");
    if (config_.target_split()) return forward_aux_target_split(g, batch);

    const HeadKind head = config_.aux_heads[j];
    if ((head == HeadKind::TokenTag) != (batch.kind == TaskKind::Tag))
        throw ConfigError("auxiliary head " + to_string(head) + " does not match the batch labels");

    Var emb = g.use(store_.at("emb/E"));
    EmbeddedBatch eb = embed_batch(g, emb, batch);
    const std::string cell = "aux/" + std::to_string(j) + "/cell";
    LstmParams params{g.use(store_.at(cell + "/W")), g.use(store_.at(cell + "/b"))};
    std::vector<StreamState> states = run_lstm_steps(g, params, eb.x, eb.keep, eb.drop);

    const std::string head_path = "aux/" + std::to_string(j) + "/head";
    const Index n = static_cast<Index>(states.size());
    if (head == HeadKind::TokenTag) {
        Var ce_total;
        for (Index t = 0; t < n; ++t) {
            std::vector<int> labels(eb.batch);
            std::vector<double> weights(eb.batch);
            for (Index b = 0; b < eb.batch; ++b) {
                labels[b] = batch.tag_labels[b][t];
                weights[b] = batch.mask[b][t];
            }
            Var ce = masked_ce_sum(head_logits(g, head_path, states[t].h), labels, weights);
            ce_total = ce_total ? ce_total + ce : ce;
        }
        return scale(ce_total, 1.0 / eb.total_tokens);
    }

    Var features;
    if (head == HeadKind::SequenceClassifyLast) {
        features = states[n - 1].h; // masked steps pass the last real state through
    } else {
        std::vector<Var> hs;
        for (const auto& s : states) hs.push_back(s.h);
        features = masked_mean(g, hs, eb);
    }
    Var ce = masked_ce_sum(head_logits(g, head_path, features), batch.labels,
                           ones_weights(eb.batch));
    return scale(ce, 1.0 / static_cast<double>(eb.batch));
}

Var GirnetModel::forward_aux_target_split(Graph& g, const SequenceBatch& batch) {
    if (batch.kind != TaskKind::Classify)
        throw ConfigError("the target-split auxiliary task is whole-sequence classification");
    Var emb = g.use(store_.at("emb/E"));
    EmbeddedBatch eb = embed_batch(g, emb, batch);

    LstmParams left{g.use(store_.at("left/aux/W")), g.use(store_.at("left/aux/b"))};
    LstmParams right{g.use(store_.at("right/aux/W")), g.use(store_.at("right/aux/b"))};
    std::vector<StreamState> fwd = run_lstm_steps(g, left, eb.x, eb.keep, eb.drop, false);
    std::vector<StreamState> bwd = run_lstm_steps(g, right, eb.x, eb.keep, eb.drop, true);

    std::vector<Var> feats;
    for (size_t t = 0; t < fwd.size(); ++t) feats.push_back(concat_rows(fwd[t].h, bwd[t].h));
    Var pooled = masked_mean(g, feats, eb);
    Var ce = masked_ce_sum(head_logits(g, "aux_head", pooled), batch.labels,
                           ones_weights(eb.batch));
    return scale(ce, 1.0 / static_cast<double>(eb.batch));
}

GirnetModel::PrimForward GirnetModel::forward_prim(Graph& g, const SequenceBatch& batch,
                                                   double lambda) {
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    return config_.target_split() ? forward_prim_target_split(g, batch, lambda)
                                  : forward_prim_standard(g, batch, lambda);
}

GirnetModel::PrimForward GirnetModel::forward_prim_standard(Graph& g, const SequenceBatch& batch,
                                                            double lambda) {
    if ((config_.prim_head == HeadKind::TokenTag) != (batch.kind == TaskKind::Tag))
        throw ConfigError("primary head " + to_string(config_.prim_head) +
                          " does not match the batch labels");

    Var emb = g.use(store_.at("emb/E"));
    EmbeddedBatch eb = embed_batch(g, emb, batch);
    GirnetCellParams params = bind_cell(g, "");
    GirnetStepOutputs run = run_girnet_steps(g, params, eb.x, eb.keep, eb.drop);

    PrimForward out;
    const Index n = static_cast<Index>(run.h_comp.size());

    if (config_.prim_head == HeadKind::TokenTag) {
        // Tagging reads the composite state alone; the gating stream feeds
        // the head only through the gates it produced.
        Var ce_total;
        for (Index t = 0; t < n; ++t) {
            Var logits = head_logits(g, "prim_head", run.h_comp[t]);
            std::vector<int> labels(eb.batch);
            std::vector<double> weights(eb.batch);
            for (Index b = 0; b < eb.batch; ++b) {
                labels[b] = batch.tag_labels[b][t];
                weights[b] = batch.mask[b][t];
            }
            Var ce = masked_ce_sum(logits, labels, weights);
            ce_total = ce_total ? ce_total + ce : ce;
            out.logit_steps.push_back(logits);
        }
        out.loss = scale(ce_total, 1.0 / eb.total_tokens);
    } else {
        Var prim_feat;
        Var comp_feat;
        if (config_.prim_head == HeadKind::SequenceClassifyLast) {
            if (config_.bidir_gating) {
                // forward part of the final step, backward part of the first
                prim_feat = concat_rows(slice_rows(run.h_prim[n - 1], 0, config_.d_prime),
                                        slice_rows(run.h_prim[0], config_.d_prime, config_.d_prime));
            } else {
                prim_feat = run.h_prim[n - 1];
            }
            comp_feat = run.h_comp[n - 1];
        } else {
            prim_feat = masked_mean(g, run.h_prim, eb);
            comp_feat = masked_mean(g, run.h_comp, eb);
        }
        Var logits = head_logits(g, "prim_head", concat_rows(prim_feat, comp_feat));
        out.loss = scale(masked_ce_sum(logits, batch.labels, ones_weights(eb.batch)),
                         1.0 / static_cast<double>(eb.batch));
        out.logit_steps.push_back(logits);
    }

    if (lambda > 0.0) {
        Var fence;
        for (Index t = 0; t < n; ++t) {
            Var f = sum_all(min_fence(run.g[t]));
            fence = fence ? fence + f : f;
        }
        out.reg = scale(fence, lambda / static_cast<double>(eb.batch));
    } else {
        out.reg = g.leaf(Tensor::scalar(0.0));
    }

    out.traces = extract_traces(run.g, eb.lengths, config_.m);
    return out;
}

GirnetModel::PrimForward GirnetModel::forward_prim_target_split(Graph& g,
                                                                const SequenceBatch& batch,
                                                                double lambda) {
    if (batch.kind != TaskKind::Classify)
        throw ConfigError("the target-split head is a whole-sequence classifier");
    const Index batch_size = batch.size();

    std::vector<std::vector<int>> left_tokens(batch_size), right_tokens(batch_size);
    for (Index b = 0; b < batch_size; ++b) {
        const auto [lo, hi] = batch.spans[b];
        const int len = static_cast<int>(
            std::count(batch.mask[b].begin(), batch.mask[b].end(), 1.0));
        if (lo < 1 || hi < lo || hi > len)
            throw DataError("target span " + std::to_string(lo) + ":" + std::to_string(hi) +
                            " invalid for a sequence of length " + std::to_string(len));
        for (int t = 0; t < lo - 1; ++t) left_tokens[b].push_back(batch.tokens[b][t]);
        for (int t = len - 1; t >= hi; --t) right_tokens[b].push_back(batch.tokens[b][t]);
    }

    auto ragged_rows = [batch_size](const std::vector<std::vector<int>>& rows) {
        Index n = 0;
        for (const auto& r : rows) n = std::max(n, static_cast<Index>(r.size()));
        std::vector<std::vector<int>> tokens(batch_size, std::vector<int>(n, kPadId));
        std::vector<std::vector<double>> mask(batch_size, std::vector<double>(n, 0.0));
        for (Index b = 0; b < batch_size; ++b)
            for (size_t t = 0; t < rows[b].size(); ++t) {
                tokens[b][t] = rows[b][t];
                mask[b][t] = 1.0;
            }
        return std::make_pair(tokens, mask);
    };

    Var emb = g.use(store_.at("emb/E"));
    PrimForward out;
    Var fence;

    auto run_side = [&](const std::string& side, const std::vector<std::vector<int>>& rows,
                        std::vector<GateTrace>& traces) {
        auto [tokens, mask] = ragged_rows(rows);
        if (tokens[0].empty()) {
            // every row's context on this side is empty
            traces.assign(batch_size, GateTrace{});
            Tensor zeros({config_.d, batch_size});
            return g.leaf(std::move(zeros));
        }
        EmbeddedBatch eb = embed_rows(g, emb, tokens, mask);
        GirnetCellParams params = bind_cell(g, side + "/");
        GirnetStepOutputs run = run_girnet_steps(g, params, eb.x, eb.keep, eb.drop);

        Var pooled;
        for (size_t t = 0; t < run.h_comp.size(); ++t) {
            Var term = colwise_scale(run.h_comp[t], run.g[t]);
            pooled = pooled ? pooled + term : term;
            Var f = sum_all(min_fence(run.g[t]));
            fence = fence ? fence + f : f;
        }
        traces = extract_traces(run.g, eb.lengths, 1);
        return pooled;
    };

    Var pooled_left = run_side("left", left_tokens, out.traces);
    Var pooled_right = run_side("right", right_tokens, out.traces_aux);

    Var logits = head_logits(g, "prim_head", concat_rows(pooled_left, pooled_right));
    out.loss = scale(masked_ce_sum(logits, batch.labels, ones_weights(batch_size)),
                     1.0 / static_cast<double>(batch_size));
    out.logit_steps.push_back(logits);
    out.reg = (lambda > 0.0 && fence) ? scale(fence, lambda / static_cast<double>(batch_size))
                                      : g.leaf(Tensor::scalar(0.0));
    return out;
}

LossReport GirnetModel::losses_into_graph(Graph& g, const SequenceBatch& primary,
                                          std::span<const SequenceBatch> aux,
                                          const LossWeights& weights, Var* loss_all) {
    if (static_cast<Index>(aux.size()) != config_.m)
        throw ConfigError("expected " + std::to_string(config_.m) + " auxiliary batches, got " +
                          std::to_string(aux.size()));
    if (static_cast<Index>(weights.alpha.size()) != config_.m)
        throw ConfigError("expected " + std::to_string(config_.m) + " alpha weights");
    for (double a : weights.alpha)
        if (a < 0.0) throw ConfigError("alpha weights must be non-negative");

    PrimForward prim = forward_prim(g, primary, weights.lambda);

    LossReport report;
    Var total = prim.loss;
    for (Index j = 0; j < config_.m; ++j) {
        Var aux_loss = forward_aux(g, aux[j], j);
        report.aux.push_back(aux_loss.value()[0]);
        total = total + scale(aux_loss, weights.alpha[j]);
    }
    total = total + prim.reg;

    report.primary = prim.loss.value()[0];
    report.reg = prim.reg.value()[0];
    report.total = total.value()[0];
    if (loss_all) *loss_all = total;
    return report;
}

LossReport GirnetModel::train_step(const SequenceBatch& primary,
                                   std::span<const SequenceBatch> aux, const LossWeights& weights,
                                   OptimizerState& opt) {
    Graph g;
    Var loss_all;
    LossReport report = losses_into_graph(g, primary, aux, weights, &loss_all);
    if (!std::isfinite(report.total)) throw NumericalError("loss is not finite");
    backward(loss_all);
    opt.step(store_);
    return report;
}

LossReport GirnetModel::compute_losses(const SequenceBatch& primary,
                                       std::span<const SequenceBatch> aux,
                                       const LossWeights& weights) {
    Graph g;
    return losses_into_graph(g, primary, aux, weights, nullptr);
}

EvalResult GirnetModel::evaluate(const LabeledCorpus& corpus, Index batch_size) {
    if (corpus.examples.empty()) throw DataError("cannot evaluate an empty corpus");
    EvalResult result;
    std::vector<int> preds, golds;
    double agree = 0.0, agree_n = 0.0;
    double fence = 0.0, fence_n = 0.0;

    const Index total = static_cast<Index>(corpus.examples.size());
    for (Index start = 0; start < total; start += batch_size) {
        std::vector<int> indices;
        for (Index i = start; i < std::min(start + batch_size, total); ++i)
            indices.push_back(static_cast<int>(i));
        SequenceBatch batch = make_batch(corpus, indices);

        Graph g;
        PrimForward fwd = forward_prim(g, batch, 0.0);

        if (config_.prim_head == HeadKind::TokenTag) {
            for (size_t rel = 0; rel < indices.size(); ++rel) {
                const Example& ex = corpus.examples[indices[rel]];
                for (size_t t = 0; t < ex.tokens.size(); ++t) {
                    const Tensor& logits = fwd.logit_steps[t].value();
                    Index best;
                    logits.mat().col(static_cast<Index>(rel)).maxCoeff(&best);
                    preds.push_back(static_cast<int>(best));
                    golds.push_back(ex.tags[t]);
                }
            }
        } else {
            const std::vector<int> batch_preds = column_argmax(fwd.logit_steps[0].value());
            for (size_t rel = 0; rel < indices.size(); ++rel) {
                preds.push_back(batch_preds[rel]);
                golds.push_back(corpus.examples[indices[rel]].label);
            }
        }

        for (size_t rel = 0; rel < indices.size(); ++rel) {
            const Example& ex = corpus.examples[indices[rel]];
            auto tally = [&](const GateTrace& trace, const std::vector<int>* routing) {
                if (trace.g.size() == 0) return; // empty side
                for (Index t = 0; t < trace.g.rows(); ++t) {
                    for (Index j = 0; j < trace.g.cols(); ++j) {
                        const double v = trace.g.at(t, j);
                        fence += std::min(v, 1.0 - v);
                        fence_n += 1.0;
                    }
                    if (routing) {
                        Index best = trace.g.cols(); // index m = skip
                        double best_v = trace.skip[t];
                        for (Index j = 0; j < trace.g.cols(); ++j)
                            if (trace.g.at(t, j) > best_v) {
                                best_v = trace.g.at(t, j);
                                best = j;
                            }
                        agree += best == static_cast<Index>((*routing)[t]) ? 1.0 : 0.0;
                        agree_n += 1.0;
                    }
                }
            };
            if (config_.target_split()) {
                tally(fwd.traces[rel], nullptr);
                tally(fwd.traces_aux[rel], nullptr);
            } else {
                tally(fwd.traces[rel], ex.routing.empty() ? nullptr : &ex.routing);
            }
        }
    }

    result.metrics = compute_metrics(preds, golds, static_cast<int>(config_.prim_classes));
    if (agree_n > 0) result.agreement = agree / agree_n;
    if (fence_n > 0) result.mean_fence = fence / fence_n;
    return result;
}

std::vector<std::pair<GateTrace, GateTrace>> GirnetModel::trace_corpus(const LabeledCorpus& corpus,
                                                                       Index batch_size) {
    std::vector<std::pair<GateTrace, GateTrace>> out;
    const Index total = static_cast<Index>(corpus.examples.size());
    for (Index start = 0; start < total; start += batch_size) {
        std::vector<int> indices;
        for (Index i = start; i < std::min(start + batch_size, total); ++i)
            indices.push_back(static_cast<int>(i));
        SequenceBatch batch = make_batch(corpus, indices);
        Graph g;
        PrimForward fwd = forward_prim(g, batch, 0.0);
        for (size_t rel = 0; rel < indices.size(); ++rel)
            out.emplace_back(fwd.traces[rel], config_.target_split() ? fwd.traces_aux[rel]
                                                                     : GateTrace{});
    }
    return out;
}

// ---- PlainLstmModel ---------------------------------------------------------

PlainLstmModel::PlainLstmModel(Index vocab, Index d_emb, Index d, Index classes, HeadKind head,
                               std::uint64_t seed)
    : d_(d), head_(head), store_(seed) {
    if (head == HeadKind::TargetSplitWeightedPool)
        throw ConfigError("the plain LSTM baseline has no target-split head");
    Rng& rng = store_.rng();
    store_.create("emb/E", init_param({vocab, d_emb}, InitScheme::ScaledUniform, rng));
    LstmWeights cell = init_lstm_weights(d_emb, d, rng);
    store_.create("cell/W", std::move(cell.W));
    store_.create("cell/b", std::move(cell.b));
    store_.create("head/W", init_param({classes, d}, InitScheme::ScaledUniform, rng));
    store_.create("head/b", Tensor({classes}));
}

Var PlainLstmModel::forward_loss(Graph& g, const SequenceBatch& batch,
                                 std::vector<Var>* logit_steps) {
    if ((head_ == HeadKind::TokenTag) != (batch.kind == TaskKind::Tag))
        throw ConfigError("baseline head does not match the batch labels");
    Var emb = g.use(store_.at("emb/E"));
    EmbeddedBatch eb = embed_batch(g, emb, batch);
    LstmParams cell{g.use(store_.at("cell/W")), g.use(store_.at("cell/b"))};
    std::vector<StreamState> states = run_lstm_steps(g, cell, eb.x, eb.keep, eb.drop);

    auto logits_of = [&](Var f) {
        return add_col_broadcast(matmul(g.use(store_.at("head/W")), f),
                                 g.use(store_.at("head/b")));
    };

    if (head_ == HeadKind::TokenTag) {
        Var ce_total;
        for (size_t t = 0; t < states.size(); ++t) {
            Var logits = logits_of(states[t].h);
            if (logit_steps) logit_steps->push_back(logits);
            std::vector<int> labels(eb.batch);
            std::vector<double> weights(eb.batch);
            for (Index b = 0; b < eb.batch; ++b) {
                labels[b] = batch.tag_labels[b][t];
                weights[b] = batch.mask[b][t];
            }
            Var ce = masked_ce_sum(logits, labels, weights);
            ce_total = ce_total ? ce_total + ce : ce;
        }
        return scale(ce_total, 1.0 / eb.total_tokens);
    }

    Var features;
    if (head_ == HeadKind::SequenceClassifyLast) {
        features = states.back().h;
    } else {
        std::vector<Var> hs;
        for (const auto& s : states) hs.push_back(s.h);
        features = masked_mean(g, hs, eb);
    }
    Var logits = logits_of(features);
    if (logit_steps) logit_steps->push_back(logits);
    return scale(masked_ce_sum(logits, batch.labels, ones_weights(eb.batch)),
                 1.0 / static_cast<double>(eb.batch));
}

LossReport PlainLstmModel::train_step(const SequenceBatch& primary,
                                      std::span<const SequenceBatch> aux, const LossWeights&,
                                      OptimizerState& opt) {
    if (!aux.empty()) throw ContractError("the plain LSTM baseline takes no auxiliary batches");
    Graph g;
    Var loss = forward_loss(g, primary, nullptr);
    LossReport report;
    report.primary = report.total = loss.value()[0];
    if (!std::isfinite(report.total)) throw NumericalError("loss is not finite");
    backward(loss);
    opt.step(store_);
    return report;
}

LossReport PlainLstmModel::compute_losses(const SequenceBatch& primary,
                                          std::span<const SequenceBatch> aux, const LossWeights&) {
    if (!aux.empty()) throw ContractError("the plain LSTM baseline takes no auxiliary batches");
    Graph g;
    Var loss = forward_loss(g, primary, nullptr);
    LossReport report;
    report.primary = report.total = loss.value()[0];
    return report;
}

EvalResult PlainLstmModel::evaluate(const LabeledCorpus& corpus, Index batch_size) {
    EvalResult result;
    std::vector<int> preds, golds;
    const Index total = static_cast<Index>(corpus.examples.size());
    const Index classes = store_.at("head/W").value.rows();
    for (Index start = 0; start < total; start += batch_size) {
        std::vector<int> indices;
        for (Index i = start; i < std::min(start + batch_size, total); ++i)
            indices.push_back(static_cast<int>(i));
        SequenceBatch batch = make_batch(corpus, indices);
        Graph g;
        std::vector<Var> logit_steps;
        forward_loss(g, batch, &logit_steps);
        if (head_ == HeadKind::TokenTag) {
            for (size_t rel = 0; rel < indices.size(); ++rel) {
                const Example& ex = corpus.examples[indices[rel]];
                for (size_t t = 0; t < ex.tokens.size(); ++t) {
                    Index best;
                    logit_steps[t].value().mat().col(static_cast<Index>(rel)).maxCoeff(&best);
                    preds.push_back(static_cast<int>(best));
                    golds.push_back(ex.tags[t]);
                }
            }
        } else {
            const std::vector<int> batch_preds = column_argmax(logit_steps[0].value());
            for (size_t rel = 0; rel < indices.size(); ++rel) {
                preds.push_back(batch_preds[rel]);
                golds.push_back(corpus.examples[indices[rel]].label);
            }
        }
    }
    result.metrics = compute_metrics(preds, golds, static_cast<int>(classes));
    return result;
}

// ---- MeanpoolBowModel --------------------------------------------------------

MeanpoolBowModel::MeanpoolBowModel(Index vocab, Index d_emb, Index classes, std::uint64_t seed)
    : store_(seed) {
    Rng& rng = store_.rng();
    store_.create("emb/E", init_param({vocab, d_emb}, InitScheme::ScaledUniform, rng));
    store_.create("head/W", init_param({classes, d_emb}, InitScheme::ScaledUniform, rng));
    store_.create("head/b", Tensor({classes}));
}

Var MeanpoolBowModel::forward_loss(Graph& g, const SequenceBatch& batch, Var* logits_out) {
    if (batch.kind != TaskKind::Classify)
        throw ConfigError("the mean-pool baseline is a whole-sequence classifier");
    Var emb = g.use(store_.at("emb/E"));
    EmbeddedBatch eb = embed_batch(g, emb, batch);
    Var pooled = masked_mean(g, eb.x, eb);
    Var logits = add_col_broadcast(matmul(g.use(store_.at("head/W")), pooled),
                                   g.use(store_.at("head/b")));
    if (logits_out) *logits_out = logits;
    return scale(masked_ce_sum(logits, batch.labels, ones_weights(eb.batch)),
                 1.0 / static_cast<double>(eb.batch));
}

LossReport MeanpoolBowModel::train_step(const SequenceBatch& primary,
                                        std::span<const SequenceBatch> aux, const LossWeights&,
                                        OptimizerState& opt) {
    if (!aux.empty()) throw ContractError("the mean-pool baseline takes no auxiliary batches");
    Graph g;
    Var loss = forward_loss(g, primary, nullptr);
    LossReport report;
    report.primary = report.total = loss.value()[0];
    if (!std::isfinite(report.total)) throw NumericalError("loss is not finite");
    backward(loss);
    opt.step(store_);
    return report;
}

LossReport MeanpoolBowModel::compute_losses(const SequenceBatch& primary,
                                            std::span<const SequenceBatch> aux,
                                            const LossWeights&) {
    if (!aux.empty()) throw ContractError("the mean-pool baseline takes no auxiliary batches");
    Graph g;
    Var loss = forward_loss(g, primary, nullptr);
    LossReport report;
    report.primary = report.total = loss.value()[0];
    return report;
}

EvalResult MeanpoolBowModel::evaluate(const LabeledCorpus& corpus, Index batch_size) {
    EvalResult result;
    std::vector<int> preds, golds;
    const Index total = static_cast<Index>(corpus.examples.size());
    const Index classes = store_.at("head/W").value.rows();
    for (Index start = 0; start < total; start += batch_size) {
        std::vector<int> indices;
        for (Index i = start; i < std::min(start + batch_size, total); ++i)
            indices.push_back(static_cast<int>(i));
        SequenceBatch batch = make_batch(corpus, indices);
        Graph g;
        Var logits;
        forward_loss(g, batch, &logits);
        const std::vector<int> batch_preds = column_argmax(logits.value());
        for (size_t rel = 0; rel < indices.size(); ++rel) {
            preds.push_back(batch_preds[rel]);
            golds.push_back(corpus.examples[indices[rel]].label);
        }
    }
    result.metrics = compute_metrics(preds, golds, static_cast<int>(classes));
    return result;
}

} // namespace girnet
