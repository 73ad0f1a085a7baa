#include "girnet/tasks.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace girnet {

namespace {

// Targeted-vocabulary layout: neutrals, then 4 positive ids, 4 negative ids
// and one target id, after the two reserved slots.
constexpr Index kPolarityCount = 4;

Index targeted_pos_base(const SyntheticTaskSpec& spec) { return kFirstTokenId + spec.vocab_a; }
Index targeted_neg_base(const SyntheticTaskSpec& spec) {
    return targeted_pos_base(spec) + kPolarityCount;
}
Index targeted_target_id(const SyntheticTaskSpec& spec) {
    return targeted_neg_base(spec) + kPolarityCount;
}

std::vector<std::string> codeswitch_token_names(const SyntheticTaskSpec& spec) {
    std::vector<std::string> names{"<pad>", "<unk>"};
    for (Index k = 0; k < spec.vocab_a; ++k) names.push_back("a" + std::to_string(k));
    for (Index k = 0; k < spec.vocab_b; ++k) names.push_back("b" + std::to_string(k));
    return names;
}

std::vector<std::string> targeted_token_names(const SyntheticTaskSpec& spec) {
    std::vector<std::string> names{"<pad>", "<unk>"};
    for (Index k = 0; k < spec.vocab_a; ++k) names.push_back("w" + std::to_string(k));
    for (Index k = 0; k < kPolarityCount; ++k) names.push_back("p" + std::to_string(k));
    for (Index k = 0; k < kPolarityCount; ++k) names.push_back("q" + std::to_string(k));
    names.push_back("tgt");
    return names;
}

void check_spec(const SyntheticTaskSpec& spec) {
    if (spec.vocab_a < 2 || spec.vocab_b < 2) throw ConfigError("vocabularies need >= 2 tokens");
    if (spec.len_min < 1 || spec.len_max < spec.len_min)
        throw ConfigError("invalid sequence length range");
    if (spec.p_switch <= 0.0 || spec.p_switch >= 1.0)
        throw ConfigError("p_switch must lie strictly inside (0, 1)");
}

void check_count(int count) {
    if (count <= 0) throw DataError("corpus must contain at least one example");
}

std::uint64_t sample_rng_seed(const SyntheticTaskSpec& spec, std::uint64_t stream) {
    return mix_seed(mix_seed(spec.seed, 5000 + spec.sample_stream), stream);
}

int sample_token(const SyntheticTaskSpec& spec, int language, Rng& rng) {
    const Index base = language == 0 ? kFirstTokenId : kFirstTokenId + spec.vocab_a;
    const Index size = language == 0 ? spec.vocab_a : spec.vocab_b;
    return static_cast<int>(base + rng.uniform_int(0, static_cast<int>(size) - 1));
}

void fill_labels(const SyntheticTaskSpec& spec, Example& ex) {
    if (spec.kind == TaskKind::Tag) {
        ex.tags = codeswitch_tag_sequence(spec, ex.tokens);
    } else {
        ex.label = codeswitch_majority_label(spec, ex.tokens);
    }
}

LabeledCorpus codeswitch_corpus_shell(const SyntheticTaskSpec& spec) {
    LabeledCorpus corpus;
    corpus.kind = spec.kind;
    corpus.id_to_token = codeswitch_token_names(spec);
    corpus.id_to_label = {"even", "odd"};
    corpus.token_language.assign(corpus.id_to_token.size(), -1);
    for (int id = kFirstTokenId; id < corpus.vocab_size(); ++id)
        corpus.token_language[id] = codeswitch_language(spec, id);
    return corpus;
}

LabeledCorpus targeted_corpus_shell(const SyntheticTaskSpec& spec) {
    LabeledCorpus corpus;
    corpus.kind = TaskKind::Classify;
    corpus.id_to_token = targeted_token_names(spec);
    corpus.id_to_label = {"neg", "pos"};
    corpus.token_language.assign(corpus.id_to_token.size(), -1);
    return corpus;
}

} // namespace

int codeswitch_language(const SyntheticTaskSpec& spec, int token_id) {
    if (token_id < kFirstTokenId) return -1;
    if (token_id < kFirstTokenId + spec.vocab_a) return 0;
    if (token_id < kFirstTokenId + spec.vocab_a + spec.vocab_b) return 1;
    return -1;
}

// Tags combine the parities of the last few ids of one language, so a tag
// needs that language's recent history rather than the token alone. The
// window length differs between the two id ranges, so the languages demand
// different recurrences.
constexpr int kParityWindow[2] = {2, 4};

std::vector<int> codeswitch_tag_sequence(const SyntheticTaskSpec& spec,
                                         std::span<const int> tokens) {
    std::vector<int> tags;
    tags.reserve(tokens.size());
    std::vector<int> history[2];
    for (int id : tokens) {
        const int lang = codeswitch_language(spec, id);
        if (lang < 0) throw DataError("token id " + std::to_string(id) + " has no language");
        const Index base = lang == 0 ? kFirstTokenId : kFirstTokenId + spec.vocab_a;
        history[lang].push_back(static_cast<int>((id - base) % 2));
        const auto& h = history[lang];
        int tag = 0;
        for (int k = 0; k < kParityWindow[lang] && k < static_cast<int>(h.size()); ++k)
            tag ^= h[h.size() - 1 - k];
        tags.push_back(tag);
    }
    return tags;
}

int codeswitch_majority_label(const SyntheticTaskSpec& spec, std::span<const int> tokens) {
    const std::vector<int> tags = codeswitch_tag_sequence(spec, tokens);
    int odd = 0;
    for (int t : tags) odd += t;
    const int even = static_cast<int>(tags.size()) - odd;
    return odd > even ? 1 : 0; // ties resolve to class 0
}

int targeted_polarity(const SyntheticTaskSpec& spec, int token_id) {
    if (token_id >= targeted_pos_base(spec) && token_id < targeted_neg_base(spec)) return 1;
    if (token_id >= targeted_neg_base(spec) && token_id < targeted_target_id(spec)) return -1;
    return 0;
}

int targeted_nearest_label(const SyntheticTaskSpec& spec, std::span<const int> tokens, int span_lo,
                           int span_hi) {
    if (span_lo < 1 || span_hi < span_lo || span_hi > static_cast<int>(tokens.size()))
        throw DataError("invalid target span");
    int best_dist = -1, best_sign = 0;
    for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
        const int sign = targeted_polarity(spec, tokens[t]);
        if (sign == 0) continue;
        const int pos = t + 1;
        int dist = 0;
        if (pos < span_lo) dist = span_lo - pos;
        else if (pos > span_hi) dist = pos - span_hi;
        if (best_dist < 0 || dist < best_dist) {
            best_dist = dist;
            best_sign = sign;
        }
    }
    if (best_dist < 0) throw DataError("sequence has no polarity token");
    return best_sign > 0 ? 1 : 0;
}

LabeledCorpus gen_monolingual(const SyntheticTaskSpec& spec, int language, int count) {
    check_spec(spec);
    check_count(count);
    if (language != 0 && language != 1) throw ConfigError("language must be 0 (A) or 1 (B)");

    LabeledCorpus corpus = codeswitch_corpus_shell(spec);
    Rng rng(sample_rng_seed(spec, 101 + static_cast<std::uint64_t>(language)));
    for (int i = 0; i < count; ++i) {
        Example ex;
        const int n = rng.uniform_int(static_cast<int>(spec.len_min), static_cast<int>(spec.len_max));
        ex.tokens.reserve(n);
        for (int t = 0; t < n; ++t) ex.tokens.push_back(sample_token(spec, language, rng));
        fill_labels(spec, ex);
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

LabeledCorpus gen_codeswitched(const SyntheticTaskSpec& spec, int count) {
    check_spec(spec);
    check_count(count);

    LabeledCorpus corpus = codeswitch_corpus_shell(spec);
    Rng rng(sample_rng_seed(spec, 200));
    for (int i = 0; i < count; ++i) {
        Example ex;
        const int n = rng.uniform_int(static_cast<int>(spec.len_min), static_cast<int>(spec.len_max));
        int lang = rng.uniform_int(0, 1);
        for (int t = 0; t < n; ++t) {
            if (t > 0 && rng.bernoulli(spec.p_switch)) lang = 1 - lang;
            ex.tokens.push_back(sample_token(spec, lang, rng));
            ex.routing.push_back(lang);
        }
        fill_labels(spec, ex);
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

LabeledCorpus gen_targeted(const SyntheticTaskSpec& spec, int count) {
    check_spec(spec);
    check_count(count);
    if (spec.kind != TaskKind::Classify)
        throw ConfigError("the targeted task is a classification task");
    if (spec.len_min < 8) throw ConfigError("targeted sequences need len_min >= 8");

    LabeledCorpus corpus = targeted_corpus_shell(spec);
    corpus.has_spans = true;
    Rng rng(sample_rng_seed(spec, 300));
    for (int i = 0; i < count; ++i) {
        const int n = rng.uniform_int(static_cast<int>(spec.len_min), static_cast<int>(spec.len_max));
        Example ex;
        ex.tokens.assign(n, 0);
        for (int t = 0; t < n; ++t)
            ex.tokens[t] =
                static_cast<int>(kFirstTokenId + rng.uniform_int(0, static_cast<int>(spec.vocab_a) - 1));

        const int target = rng.uniform_int(0, n - 1);
        ex.tokens[target] = static_cast<int>(targeted_target_id(spec));
        ex.span_lo = target + 1;
        ex.span_hi = target + 1;

        // polarity token within distance 2 of the target
        std::vector<int> near;
        for (int off : {-2, -1, 1, 2}) {
            const int pos = target + off;
            if (pos >= 0 && pos < n) near.push_back(pos);
        }
        const int cue = near[rng.uniform_int(0, static_cast<int>(near.size()) - 1)];
        const int sign = rng.uniform_int(0, 1) == 1 ? 1 : -1;
        const Index cue_base = sign > 0 ? targeted_pos_base(spec) : targeted_neg_base(spec);
        ex.tokens[cue] =
            static_cast<int>(cue_base + rng.uniform_int(0, static_cast<int>(kPolarityCount) - 1));

        // opposite-sign distractor at distance >= 4
        std::vector<int> far;
        for (int pos = 0; pos < n; ++pos)
            if (std::abs(pos - target) >= 4) far.push_back(pos);
        if (!far.empty()) {
            const int spot = far[rng.uniform_int(0, static_cast<int>(far.size()) - 1)];
            const Index dis_base = sign > 0 ? targeted_neg_base(spec) : targeted_pos_base(spec);
            ex.tokens[spot] =
                static_cast<int>(dis_base + rng.uniform_int(0, static_cast<int>(kPolarityCount) - 1));
        }

        ex.label = targeted_nearest_label(spec, ex.tokens, ex.span_lo, ex.span_hi);
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

LabeledCorpus gen_polarity(const SyntheticTaskSpec& spec, int count) {
    check_spec(spec);
    check_count(count);

    LabeledCorpus corpus = targeted_corpus_shell(spec);
    Rng rng(sample_rng_seed(spec, 400));
    for (int i = 0; i < count; ++i) {
        const int n = rng.uniform_int(static_cast<int>(spec.len_min), static_cast<int>(spec.len_max));
        Example ex;
        ex.tokens.assign(n, 0);
        for (int t = 0; t < n; ++t)
            ex.tokens[t] =
                static_cast<int>(kFirstTokenId + rng.uniform_int(0, static_cast<int>(spec.vocab_a) - 1));
        const int sign = rng.uniform_int(0, 1);
        const Index base = sign == 1 ? targeted_pos_base(spec) : targeted_neg_base(spec);
        const int cues = rng.uniform_int(1, 3);
        for (int k = 0; k < cues; ++k)
            ex.tokens[rng.uniform_int(0, n - 1)] =
                static_cast<int>(base + rng.uniform_int(0, static_cast<int>(kPolarityCount) - 1));
        ex.label = sign;
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

// ---- corpus files ----------------------------------------------------------

int VocabBuilder::get_or_add(const std::string& token) {
    auto it = index.find(token);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(id_to_token.size());
    id_to_token.push_back(token);
    index.emplace(token, id);
    return id;
}

int VocabBuilder::lookup(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? kUnkId : it->second;
}

int LabelSpace::get_or_add(const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
}

int LabelSpace::lookup(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> parts;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) parts.push_back(tok);
    return parts;
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) return false;
    out = static_cast<int>(v);
    return true;
}

} // namespace

LabeledCorpus load_tsv(const std::string& path, std::optional<TaskKind> kind, VocabBuilder& vocab,
                       bool extend_vocab, LabelSpace& labels, bool extend_labels) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus: " + path);

    LabeledCorpus corpus;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto where = path + ":" + std::to_string(line_no);

        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            const size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() < 2 || fields.size() > 3)
            throw DataError(where + ": expected tokens<TAB>label[<TAB>span]");

        const std::vector<std::string> token_strs = split_ws(fields[0]);
        const std::vector<std::string> label_strs = split_ws(fields[1]);
        if (token_strs.empty()) throw DataError(where + ": empty token sequence");
        if (label_strs.empty()) throw DataError(where + ": empty label field");

        if (!kind) {
            int tmp;
            kind = (label_strs.size() > 1 || !parse_int(label_strs[0], tmp)) ? TaskKind::Tag
                                                                             : TaskKind::Classify;
        }

        Example ex;
        for (const auto& t : token_strs)
            ex.tokens.push_back(extend_vocab ? vocab.get_or_add(t) : vocab.lookup(t));

        if (*kind == TaskKind::Tag) {
            if (label_strs.size() != token_strs.size())
                throw DataError(where + ": " + std::to_string(token_strs.size()) + " tokens but " +
                                std::to_string(label_strs.size()) + " tags");
            for (const auto& tag : label_strs) {
                const int id = extend_labels ? labels.get_or_add(tag) : labels.lookup(tag);
                if (id < 0) throw DataError(where + ": unknown tag " + tag);
                ex.tags.push_back(id);
            }
        } else {
            if (label_strs.size() != 1) throw DataError(where + ": expected one class label");
            int value;
            if (!parse_int(label_strs[0], value) || value < 0)
                throw DataError(where + ": class label must be a non-negative integer");
            if (extend_labels) {
                while (static_cast<int>(labels.names.size()) <= value)
                    labels.get_or_add(std::to_string(labels.names.size()));
            } else if (value >= static_cast<int>(labels.names.size())) {
                throw DataError(where + ": class label " + label_strs[0] + " out of range");
            }
            ex.label = value;
        }

        if (fields.size() == 3) {
            const auto colon = fields[2].find(':');
            int lo, hi;
            if (colon == std::string::npos || !parse_int(fields[2].substr(0, colon), lo) ||
                !parse_int(fields[2].substr(colon + 1), hi))
                throw DataError(where + ": span must be lo:hi");
            if (lo < 1 || hi < lo || hi > static_cast<int>(ex.tokens.size()))
                throw DataError(where + ": span out of bounds");
            ex.span_lo = lo;
            ex.span_hi = hi;
            corpus.has_spans = true;
        } else if (corpus.has_spans) {
            throw DataError(where + ": missing span field");
        }

        corpus.examples.push_back(std::move(ex));
    }
    if (corpus.examples.empty()) throw DataError("empty corpus: " + path);

    corpus.kind = *kind;
    corpus.id_to_token = vocab.id_to_token;
    corpus.id_to_label = labels.names;
    corpus.token_language.assign(corpus.id_to_token.size(), -1);
    return corpus;
}

LabeledCorpus load_tsv(const std::string& path) {
    VocabBuilder vocab;
    LabelSpace labels;
    return load_tsv(path, std::nullopt, vocab, true, labels, true);
}

void save_tsv(const LabeledCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write corpus: " + path);
    for (const auto& ex : corpus.examples) {
        for (size_t t = 0; t < ex.tokens.size(); ++t) {
            if (t) out << ' ';
            out << corpus.id_to_token.at(ex.tokens[t]);
        }
        out << '\t';
        if (corpus.kind == TaskKind::Tag) {
            for (size_t t = 0; t < ex.tags.size(); ++t) {
                if (t) out << ' ';
                out << corpus.id_to_label.at(ex.tags[t]);
            }
        } else {
            out << ex.label;
        }
        if (ex.span_lo >= 1) out << '\t' << ex.span_lo << ':' << ex.span_hi;
        out << '\n';
    }
    if (!out) throw IoError("write failure on corpus: " + path);
}

void save_routing(const LabeledCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write routing sidecar: " + path);
    for (const auto& ex : corpus.examples) {
        for (size_t t = 0; t < ex.routing.size(); ++t) {
            if (t) out << ' ';
            out << ex.routing[t];
        }
        out << '\n';
    }
    if (!out) throw IoError("write failure on routing sidecar: " + path);
}

std::vector<std::vector<int>> load_routing(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open routing sidecar: " + path);
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        std::vector<int> row;
        for (const auto& part : split_ws(line)) {
            int v;
            if (!parse_int(part, v)) throw DataError(path + ": bad routing entry " + part);
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace girnet
