// girnet: generate synthetic corpora, train, evaluate, trace gates and run
// the gradient oracle from the command line.
//
// Exit codes: 0 ok, 1 usage/config, 2 I/O, 3 numerical failure,
// 4 checkpoint mismatch, 5 gradient-check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "girnet/checkpoint.hpp"
#include "girnet/gradcheck.hpp"
#include "girnet/train.hpp"

namespace fs = std::filesystem;
using namespace girnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheckpoint = 4;
constexpr int kExitGradcheck = 5;

/// Leftover "--section.key value" tokens become config overrides.
std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& extras) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (size_t i = 0; i < extras.size(); ++i) {
        const std::string& flag = extras[i];
        if (flag.rfind("--", 0) != 0 || flag.find('.') == std::string::npos)
            throw ConfigError("unrecognized argument: " + flag);
        if (i + 1 >= extras.size()) throw ConfigError("missing value for " + flag);
        overrides.emplace_back(flag.substr(2), extras[++i]);
    }
    return overrides;
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) throw IoError("cannot create directory " + parent.string());
    }
}

int cmd_gen(const RunConfig& config) {
    if (!config.has_synthetic) throw ConfigError("gen needs a data.synthetic section");
    DataBundle bundle = generate_bundle(config);

    std::error_code ec;
    fs::create_directories(config.data_dir, ec);
    if (ec) throw IoError("cannot create data directory " + config.data_dir);
    const fs::path dir(config.data_dir);

    if (config.synthetic_task == "targeted") {
        save_tsv(bundle.aux[0], (dir / "aux_polarity.tsv").string());
    } else {
        save_tsv(bundle.aux[0], (dir / "aux_a.tsv").string());
        save_tsv(bundle.aux[1], (dir / "aux_b.tsv").string());
    }
    save_tsv(bundle.primary_train, (dir / "primary_train.tsv").string());
    save_tsv(bundle.primary_test, (dir / "primary_test.tsv").string());
    if (bundle.primary_test.has_routing())
        save_routing(bundle.primary_test, (dir / "primary_test.routing.tsv").string());

    std::cout << "wrote " << config.synthetic_task << " corpora to " << config.data_dir << "\n";
    return kExitOk;
}

DataBundle bundle_for(const RunConfig& config) {
    if (!config.primary_train_path.empty()) return load_bundle(config);
    if (config.has_synthetic) return generate_bundle(config);
    throw ConfigError("config names neither corpus paths nor a synthetic spec");
}

int cmd_train(const RunConfig& config) {
    DataBundle data = bundle_for(config);
    std::unique_ptr<SequenceModel> model = build_model(config, data);

    ensure_parent_dir(config.metrics_path);
    std::ofstream metrics(config.metrics_path, std::ios::trunc);
    if (!metrics) throw IoError("cannot write metrics log: " + config.metrics_path);

    TrainOutcome outcome = train_model(*model, config, data, &metrics);
    if (outcome.nan_step >= 0) {
        std::cerr << "loss became non-finite at step " << outcome.nan_step << "\n";
        return kExitNumerical;
    }

    ensure_parent_dir(config.checkpoint_path);
    save_checkpoint(model->store(), config.checkpoint_path);
    std::cout << "trained " << config.epochs << " epochs; checkpoint " << config.checkpoint_path
              << "\n";
    return kExitOk;
}

int cmd_eval(const RunConfig& config, const std::string& checkpoint) {
    DataBundle data = bundle_for(config);
    std::unique_ptr<SequenceModel> model = build_model(config, data);
    load_checkpoint(model->store(), checkpoint.empty() ? config.checkpoint_path : checkpoint);

    EvalResult result = model->evaluate(data.primary_test);
    nlohmann::json j;
    j["accuracy"] = result.metrics.accuracy;
    j["macro_precision"] = result.metrics.macro_precision;
    j["macro_recall"] = result.metrics.macro_recall;
    j["macro_f1"] = result.metrics.macro_f1;
    if (result.agreement >= 0.0) j["agreement"] = result.agreement;
    if (result.mean_fence >= 0.0) j["mean_fence"] = result.mean_fence;
    std::cout << j.dump() << "\n";
    return kExitOk;
}

int cmd_trace(const RunConfig& config, const std::string& checkpoint, const std::string& input,
              const std::string& output) {
    DataBundle data = bundle_for(config);
    std::unique_ptr<SequenceModel> model = build_model(config, data);
    load_checkpoint(model->store(), checkpoint.empty() ? config.checkpoint_path : checkpoint);

    auto* girnet_model = dynamic_cast<GirnetModel*>(model.get());
    if (!girnet_model) throw ConfigError("gate traces exist only for model.kind = girnet");

    // Re-tokenize the input with the training vocabulary.
    LabeledCorpus corpus;
    if (input.empty() && config.primary_test_path.empty()) {
        corpus = data.primary_test;
    } else {
        VocabBuilder vocab;
        vocab.id_to_token = data.primary_train.id_to_token;
        for (size_t id = 0; id < vocab.id_to_token.size(); ++id)
            vocab.index.emplace(vocab.id_to_token[id], static_cast<int>(id));
        LabelSpace labels;
        const TaskKind kind =
            config.prim_head == "token-tag" ? TaskKind::Tag : TaskKind::Classify;
        corpus = load_tsv(input.empty() ? config.primary_test_path : input, kind, vocab, false,
                          labels, true);
        corpus.id_to_token = vocab.id_to_token;
    }

    const std::string out_path = output.empty() ? config.trace_path : output;
    ensure_parent_dir(out_path);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoError("cannot write trace: " + out_path);

    const Index m = girnet_model->config().m;
    out << "seq,pos,token";
    for (Index j = 1; j <= m; ++j) out << ",g" << j;
    out << ",skip\n";

    const auto traces = girnet_model->trace_corpus(corpus);
    char buf[32];
    for (size_t i = 0; i < corpus.examples.size(); ++i) {
        const Example& ex = corpus.examples[i];
        auto emit = [&](const GateTrace& trace, std::span<const std::string> tokens) {
            if (trace.g.size() == 0) return;
            for (const TraceRow& row : export_gate_trace(trace, tokens)) {
                out << i + 1 << ',' << row.position << ',' << row.token;
                for (double v : row.g) {
                    std::snprintf(buf, sizeof(buf), ",%.6f", v);
                    out << buf;
                }
                std::snprintf(buf, sizeof(buf), ",%.6f", row.skip);
                out << buf << '\n';
            }
        };
        std::vector<std::string> tokens;
        for (int id : ex.tokens) tokens.push_back(corpus.id_to_token.at(id));
        if (girnet_model->config().target_split()) {
            // left context, then the reversed right context
            const auto [lo, hi] = std::pair(ex.span_lo, ex.span_hi);
            std::vector<std::string> left(tokens.begin(), tokens.begin() + (lo - 1));
            std::vector<std::string> right(tokens.rbegin(),
                                           tokens.rbegin() + (tokens.size() - hi));
            emit(traces[i].first, left);
            emit(traces[i].second, right);
        } else {
            emit(traces[i].first, tokens);
        }
    }
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_gradcheck(const RunConfig&, bool corrupt) {
    GradcheckFixture fx = gradcheck_fixture();
    GirnetModel model(fx.model_config, fx.model_seed);

    auto loss_fn = [&fx, &model](Graph& g, ParamStore&) {
        GirnetModel::PrimForward prim = model.forward_prim(g, fx.primary, fx.weights.lambda);
        Var total = prim.loss + prim.reg;
        for (Index j = 0; j < fx.model_config.m; ++j)
            total = total + scale(model.forward_aux(g, fx.aux[j], j), fx.weights.alpha[j]);
        return total;
    };

    GradCheckReport report = grad_check(loss_fn, model.store(), 1e-5);
    if (corrupt) {
        // fault injection hook: misreport one entry to exercise the failure path
        report.max_rel_error = std::max(report.max_rel_error, 1.0);
        report.worst_path = "injected/corrupt";
    }

    std::printf("max relative error %.6e", report.max_rel_error);
    if (!report.worst_path.empty())
        std::printf(" (worst at %s[%lld]: analytic %.9e, numeric %.9e)",
                    report.worst_path.c_str(), static_cast<long long>(report.worst_entry),
                    report.worst_analytic, report.worst_numeric);
    std::printf("\n");
    if (report.max_rel_error >= 1e-4) {
        std::cerr << "gradient check failed at parameter " << report.worst_path << "\n";
        return kExitGradcheck;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gated interleaved recurrent sequence multi-task toolkit"};
    app.require_subcommand(1);
    app.allow_extras();

    std::string config_path, checkpoint, input, output;
    bool corrupt_grad = false;

    CLI::App* gen = app.add_subcommand("gen", "write synthetic corpora");
    CLI::App* train = app.add_subcommand("train", "train a model");
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    CLI::App* trace = app.add_subcommand("trace", "export per-position gate values as CSV");
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "compare analytic gradients against finite differences");

    for (CLI::App* sub : {gen, train, eval, trace, gradcheck}) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->allow_extras();
    }
    eval->add_option("--checkpoint", checkpoint, "checkpoint path (defaults to output.checkpoint)");
    trace->add_option("--checkpoint", checkpoint, "checkpoint path (defaults to output.checkpoint)");
    trace->add_option("--input", input, "TSV file to trace (defaults to data.primary_test)");
    trace->add_option("--output", output, "CSV destination (defaults to output.trace)");
    gradcheck->add_flag("--corrupt-grad", corrupt_grad,
                        "inject a corrupted gradient report (test hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        RunConfig config = load_config(config_path, parse_overrides(sub->remaining()));

        if (sub == gen) return cmd_gen(config);
        if (sub == train) return cmd_train(config);
        if (sub == eval) return cmd_eval(config, checkpoint);
        if (sub == trace) return cmd_trace(config, checkpoint, input, output);
        return cmd_gradcheck(config, corrupt_grad);
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << "\n";
        return kExitCheckpoint;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
