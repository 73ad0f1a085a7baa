#include "girnet/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace girnet {

namespace {

using nlohmann::json;

json parse_override_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded()) return json(text); // not a JSON literal: keep as string
    return v;
}

void apply_override(json& doc, const std::string& dotted, const std::string& value) {
    json* cursor = &doc;
    size_t start = 0;
    while (true) {
        const size_t dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ConfigError("bad override path: " + dotted);
        if (dot == std::string::npos) {
            (*cursor)[key] = parse_override_value(value);
            return;
        }
        cursor = &(*cursor)[key];
        start = dot + 1;
    }
}

} // namespace

void RunConfig::validate() const {
    if (model_kind != "girnet" && model_kind != "lstm" && model_kind != "meanpool-bow")
        throw ConfigError("unknown model kind: " + model_kind);
    if (m < 1) throw ConfigError("model.m must be at least 1");
    if (d < 1 || d_prime < 1 || d_emb < 1) throw ConfigError("model widths must be positive");
    if (batch_size < 1) throw ConfigError("optimizer.batch_size must be positive");
    if (epochs < 0) throw ConfigError("optimizer.epochs must be non-negative");
    if (adam.lr <= 0.0) throw ConfigError("optimizer.lr must be positive");
    if (lambda < 0.0) throw ConfigError("loss.lambda must be non-negative");
    head_kind_from_string(prim_head);
    for (const auto& h : aux_heads) head_kind_from_string(h);

    if (model_kind == "girnet") {
        if (!alpha.empty() && static_cast<Index>(alpha.size()) != m)
            throw ConfigError("loss.alpha has " + std::to_string(alpha.size()) +
                              " entries for m = " + std::to_string(m));
        for (double a : alpha)
            if (a < 0.0) throw ConfigError("loss.alpha entries must be non-negative");
        if (!aux_heads.empty() && static_cast<Index>(aux_heads.size()) != m)
            throw ConfigError("model.aux_heads has " + std::to_string(aux_heads.size()) +
                              " entries for m = " + std::to_string(m));
    }
    if (has_synthetic) {
        if (synthetic_task != "codeswitch-tag" && synthetic_task != "codeswitch-classify" &&
            synthetic_task != "targeted")
            throw ConfigError("unknown synthetic task: " + synthetic_task);
        if (primary_train_count < 1 || primary_test_count < 1 || aux_count < 1)
            throw DataError("synthetic corpus counts must be positive");
    }
}

LossWeights RunConfig::loss_weights() const {
    LossWeights w;
    w.alpha = alpha.empty() ? std::vector<double>(m, 1.0) : alpha;
    w.lambda = lambda;
    return w;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path);

    for (const auto& [dotted, value] : overrides) apply_override(doc, dotted, value);

    RunConfig cfg;
    try {
        const json model = doc.value("model", json::object());
        cfg.model_kind = model.value("kind", cfg.model_kind);
        cfg.m = model.value("m", cfg.m);
        cfg.d = model.value("d", cfg.d);
        cfg.d_prime = model.value("d_prime", cfg.d_prime);
        cfg.d_emb = model.value("d_emb", cfg.d_emb);
        cfg.prim_head = model.value("prim_head", cfg.prim_head);
        if (model.contains("aux_heads"))
            cfg.aux_heads = model.at("aux_heads").get<std::vector<std::string>>();
        cfg.bidir_gating = model.value("bidirectional_gating", cfg.bidir_gating);
        cfg.classes = model.value("classes", cfg.classes);

        const json opt = doc.value("optimizer", json::object());
        cfg.adam.lr = opt.value("lr", cfg.adam.lr);
        cfg.adam.beta1 = opt.value("beta1", cfg.adam.beta1);
        cfg.adam.beta2 = opt.value("beta2", cfg.adam.beta2);
        cfg.adam.epsilon = opt.value("epsilon", cfg.adam.epsilon);
        cfg.adam.clip_norm = opt.value("clip", cfg.adam.clip_norm);
        cfg.epochs = opt.value("epochs", cfg.epochs);
        cfg.batch_size = opt.value("batch_size", cfg.batch_size);
        cfg.seed = opt.value("seed", cfg.seed);

        const json loss = doc.value("loss", json::object());
        if (loss.contains("alpha")) cfg.alpha = loss.at("alpha").get<std::vector<double>>();
        cfg.lambda = loss.value("lambda", cfg.lambda);

        const json data = doc.value("data", json::object());
        cfg.data_dir = data.value("dir", cfg.data_dir);
        if (data.contains("synthetic")) {
            cfg.has_synthetic = true;
            const json syn = data.at("synthetic");
            cfg.synthetic_task = syn.value("task", cfg.synthetic_task);
            cfg.synthetic.vocab_a = syn.value("vocab_a", cfg.synthetic.vocab_a);
            cfg.synthetic.vocab_b = syn.value("vocab_b", cfg.synthetic.vocab_b);
            cfg.synthetic.len_min = syn.value("len_min", cfg.synthetic.len_min);
            cfg.synthetic.len_max = syn.value("len_max", cfg.synthetic.len_max);
            cfg.synthetic.p_switch = syn.value("p_switch", cfg.synthetic.p_switch);
            cfg.primary_train_count = syn.value("primary_train", cfg.primary_train_count);
            cfg.primary_test_count = syn.value("primary_test", cfg.primary_test_count);
            cfg.aux_count = syn.value("aux_count", cfg.aux_count);
        }
        cfg.primary_train_path = data.value("primary_train", cfg.primary_train_path);
        cfg.primary_test_path = data.value("primary_test", cfg.primary_test_path);
        cfg.routing_path = data.value("routing", cfg.routing_path);
        if (data.contains("aux")) cfg.aux_paths = data.at("aux").get<std::vector<std::string>>();

        const json output = doc.value("output", json::object());
        cfg.checkpoint_path = output.value("checkpoint", cfg.checkpoint_path);
        cfg.metrics_path = output.value("metrics", cfg.metrics_path);
        cfg.trace_path = output.value("trace", cfg.trace_path);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    if (const char* env_seed = std::getenv("GIRNET_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env_seed, &end, 10);
        if (end == env_seed || *end != '\0')
            throw ConfigError("GIRNET_SEED must be an unsigned integer");
        cfg.seed = static_cast<std::uint64_t>(v);
    }
    cfg.synthetic.seed = cfg.seed;
    cfg.synthetic.kind = cfg.synthetic_task == "codeswitch-tag" ? TaskKind::Tag : TaskKind::Classify;

    cfg.validate();
    return cfg;
}

} // namespace girnet
