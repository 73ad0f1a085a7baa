#include "girnet/train.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

namespace girnet {

namespace {

std::vector<int> shuffled_indices(Index n, Rng& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (Index i = n - 1; i > 0; --i) {
        const Index j = rng.uniform_int(0, static_cast<int>(i));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

std::vector<std::string> default_aux_heads(const RunConfig& config) {
    if (!config.aux_heads.empty()) return config.aux_heads;
    std::string kind = "sequence-classify-last";
    if (config.prim_head == "token-tag") kind = "token-tag";
    if (config.prim_head == "target-split-weightedpool") kind = "sequence-classify-meanpool";
    return std::vector<std::string>(config.m, kind);
}

} // namespace

std::string epoch_log_json(const EpochLog& log) {
    nlohmann::json j;
    j["epoch"] = log.epoch;
    j["loss_all"] = log.loss_all;
    j["loss_prim"] = log.loss_prim;
    j["loss_aux"] = log.loss_aux;
    j["loss_reg"] = log.loss_reg;
    j["dev_accuracy"] = log.dev_accuracy;
    return j.dump();
}

DataBundle generate_bundle(const RunConfig& config) {
    if (!config.has_synthetic) throw ConfigError("config has no data.synthetic section");
    DataBundle bundle;
    SyntheticTaskSpec train_spec = config.synthetic;
    train_spec.sample_stream = 0;
    SyntheticTaskSpec test_spec = train_spec;
    test_spec.sample_stream = 1; // disjoint draw, same labeling rule

    if (config.synthetic_task == "targeted") {
        bundle.primary_train = gen_targeted(train_spec, static_cast<int>(config.primary_train_count));
        bundle.primary_test = gen_targeted(test_spec, static_cast<int>(config.primary_test_count));
        bundle.aux.push_back(gen_polarity(train_spec, static_cast<int>(config.aux_count)));
        return bundle;
    }

    bundle.primary_train =
        gen_codeswitched(train_spec, static_cast<int>(config.primary_train_count));
    bundle.primary_test = gen_codeswitched(test_spec, static_cast<int>(config.primary_test_count));
    bundle.aux.push_back(gen_monolingual(train_spec, 0, static_cast<int>(config.aux_count)));
    bundle.aux.push_back(gen_monolingual(train_spec, 1, static_cast<int>(config.aux_count)));
    return bundle;
}

DataBundle load_bundle(const RunConfig& config) {
    if (config.primary_train_path.empty() || config.primary_test_path.empty())
        throw ConfigError("data.primary_train and data.primary_test are required");

    const TaskKind prim_kind =
        config.prim_head == "token-tag" ? TaskKind::Tag : TaskKind::Classify;
    const std::vector<std::string> aux_heads = default_aux_heads(config);

    DataBundle bundle;
    VocabBuilder vocab;
    LabelSpace prim_labels;
    bundle.primary_train =
        load_tsv(config.primary_train_path, prim_kind, vocab, true, prim_labels, true);

    std::vector<LabelSpace> aux_labels(config.aux_paths.size());
    for (size_t j = 0; j < config.aux_paths.size(); ++j) {
        const TaskKind kind =
            aux_heads[j] == "token-tag" ? TaskKind::Tag : TaskKind::Classify;
        bundle.aux.push_back(
            load_tsv(config.aux_paths[j], kind, vocab, true, aux_labels[j], true));
    }

    bundle.primary_test =
        load_tsv(config.primary_test_path, prim_kind, vocab, false, prim_labels, false);

    // The shared vocabulary is final only now; refresh every corpus's copy.
    for (LabeledCorpus* corpus : {&bundle.primary_train, &bundle.primary_test}) {
        corpus->id_to_token = vocab.id_to_token;
        corpus->token_language.assign(vocab.id_to_token.size(), -1);
    }
    for (auto& aux : bundle.aux) {
        aux.id_to_token = vocab.id_to_token;
        aux.token_language.assign(vocab.id_to_token.size(), -1);
    }

    if (!config.routing_path.empty()) {
        const auto routing = load_routing(config.routing_path);
        if (routing.size() != bundle.primary_test.examples.size())
            throw DataError("routing sidecar has " + std::to_string(routing.size()) +
                            " lines for " + std::to_string(bundle.primary_test.examples.size()) +
                            " test examples");
        for (size_t i = 0; i < routing.size(); ++i) {
            if (routing[i].size() != bundle.primary_test.examples[i].tokens.size())
                throw DataError("routing line " + std::to_string(i + 1) +
                                " does not match its sequence length");
            bundle.primary_test.examples[i].routing = routing[i];
        }
    }
    return bundle;
}

std::unique_ptr<SequenceModel> build_model(const RunConfig& config, const DataBundle& data) {
    const Index classes =
        config.classes > 0 ? config.classes : static_cast<Index>(data.primary_train.num_labels());

    if (config.model_kind == "lstm") {
        return std::make_unique<PlainLstmModel>(data.vocab_size(), config.d_emb, config.d, classes,
                                                head_kind_from_string(config.prim_head),
                                                config.seed);
    }
    if (config.model_kind == "meanpool-bow") {
        return std::make_unique<MeanpoolBowModel>(data.vocab_size(), config.d_emb, classes,
                                                  config.seed);
    }

    if (static_cast<Index>(data.aux.size()) != config.m)
        throw ConfigError("model.m = " + std::to_string(config.m) + " but " +
                          std::to_string(data.aux.size()) + " auxiliary corpora are configured");
    ModelConfig mc;
    mc.m = config.m;
    mc.d = config.d;
    mc.d_prime = config.d_prime;
    mc.d_emb = config.d_emb;
    mc.vocab = data.vocab_size();
    mc.prim_classes = classes;
    for (const auto& aux : data.aux) mc.aux_classes.push_back(aux.num_labels());
    mc.prim_head = head_kind_from_string(config.prim_head);
    for (const auto& name : default_aux_heads(config))
        mc.aux_heads.push_back(head_kind_from_string(name));
    mc.bidir_gating = config.bidir_gating;
    return std::make_unique<GirnetModel>(mc, config.seed);
}

GradcheckFixture gradcheck_fixture() {
    GradcheckFixture fx;
    fx.model_config.m = 2;
    fx.model_config.d = 4;
    fx.model_config.d_prime = 3;
    fx.model_config.d_emb = 4;
    fx.model_config.vocab = 20;
    fx.model_config.prim_classes = 2;
    fx.model_config.aux_classes = {2, 2};
    fx.model_config.prim_head = HeadKind::TokenTag;
    fx.model_config.aux_heads = {HeadKind::TokenTag, HeadKind::TokenTag};
    fx.weights.alpha = {1.0, 1.0};
    fx.weights.lambda = 0.01;

    Rng rng(412); // row 1 of the primary batch ends masked
    auto batch = [&](Index len0, Index len1) {
        SequenceBatch b;
        b.kind = TaskKind::Tag;
        for (Index row = 0; row < 2; ++row) {
            const Index len = row == 0 ? len0 : len1;
            std::vector<int> toks(len0, kPadId);
            std::vector<double> mask(len0, 0.0);
            std::vector<int> tags(len0, 0);
            for (Index t = 0; t < len; ++t) {
                toks[t] = rng.uniform_int(kFirstTokenId, 19);
                mask[t] = 1.0;
                tags[t] = rng.uniform_int(0, 1);
            }
            b.tokens.push_back(std::move(toks));
            b.mask.push_back(std::move(mask));
            b.tag_labels.push_back(std::move(tags));
            b.labels.push_back(-1);
            b.spans.emplace_back(-1, -1);
        }
        return b;
    };
    fx.primary = batch(5, 4);
    fx.aux.push_back(batch(5, 5));
    fx.aux.push_back(batch(4, 3));
    return fx;
}

TrainOutcome train_model(SequenceModel& model, const RunConfig& config, const DataBundle& data,
                         std::ostream* metrics_out) {
    const Index n_primary = static_cast<Index>(data.primary_train.examples.size());
    const Index batch = std::min<Index>(config.batch_size, n_primary);
    const Index steps_per_epoch = (n_primary + batch - 1) / batch;
    const Index n_aux_tasks = model.num_aux_tasks();
    const LossWeights weights = config.loss_weights();

    TrainOutcome outcome;
    OptimizerState opt(config.adam);
    long global_step = 0;

    for (Index epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(epoch)));
        const std::vector<int> prim_order = shuffled_indices(n_primary, shuffle_rng);
        std::vector<std::vector<int>> aux_order;
        for (Index j = 0; j < n_aux_tasks; ++j)
            aux_order.push_back(shuffled_indices(
                static_cast<Index>(data.aux[j].examples.size()), shuffle_rng));

        EpochLog log;
        log.epoch = epoch;
        log.loss_aux.assign(n_aux_tasks, 0.0);

        for (Index step = 0; step < steps_per_epoch; ++step) {
            std::vector<int> prim_idx;
            for (Index k = step * batch; k < std::min((step + 1) * batch, n_primary); ++k)
                prim_idx.push_back(prim_order[k]);
            SequenceBatch prim_batch = make_batch(data.primary_train, prim_idx);

            std::vector<SequenceBatch> aux_batches;
            for (Index j = 0; j < n_aux_tasks; ++j) {
                const auto& order = aux_order[j];
                std::vector<int> idx;
                for (Index k = 0; k < batch; ++k)
                    idx.push_back(order[(step * batch + k) % order.size()]);
                aux_batches.push_back(make_batch(data.aux[j], idx));
            }

            LossReport report;
            try {
                report = model.train_step(prim_batch, aux_batches, weights, opt);
            } catch (const NumericalError&) {
                outcome.nan_step = global_step;
                return outcome;
            }
            ++global_step;

            log.loss_all += report.total;
            log.loss_prim += report.primary;
            log.loss_reg += report.reg;
            for (Index j = 0; j < n_aux_tasks; ++j) log.loss_aux[j] += report.aux[j];
        }

        log.loss_all /= static_cast<double>(steps_per_epoch);
        log.loss_prim /= static_cast<double>(steps_per_epoch);
        log.loss_reg /= static_cast<double>(steps_per_epoch);
        for (auto& v : log.loss_aux) v /= static_cast<double>(steps_per_epoch);
        log.dev_accuracy = model.evaluate(data.primary_test).metrics.accuracy;

        if (metrics_out) *metrics_out << epoch_log_json(log) << '\n';
        outcome.epochs.push_back(std::move(log));
    }
    return outcome;
}

} // namespace girnet
