#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "girnet/params.hpp"

namespace girnet {

enum class TaskKind { Classify, Tag };

constexpr int kPadId = 0;
constexpr int kUnkId = 1;
constexpr int kFirstTokenId = 2;

/// Knobs of the synthetic two-language world. Language A owns token ids
/// [2, 2+vocab_a) and language B the next vocab_b ids, so the ranges are
/// disjoint by construction.
struct SyntheticTaskSpec {
    Index vocab_a = 50;
    Index vocab_b = 50;
    Index len_min = 8;
    Index len_max = 20;
    double p_switch = 0.3;
    TaskKind kind = TaskKind::Tag;
    std::uint64_t seed = 0;
    /// Sampling stream for disjoint splits of one task (0 = train, 1 = test).
    /// The labeling rule itself depends only on `seed`.
    std::uint64_t sample_stream = 0;
};

struct Example {
    std::vector<int> tokens;
    std::vector<int> tags;  // per-token labels (Tag)
    int label = -1;         // whole-sequence label (Classify)
    int span_lo = -1;       // 1-based inclusive target span
    int span_hi = -1;
    std::vector<int> routing; // generating expert per token; evaluation only
};

struct LabeledCorpus {
    TaskKind kind = TaskKind::Classify;
    std::vector<Example> examples;
    std::vector<std::string> id_to_token; // index = token id; [0]=<pad>, [1]=<unk>
    std::vector<std::string> id_to_label;
    std::vector<int> token_language; // per token id: 0 = A, 1 = B, -1 = n/a
    bool has_spans = false;

    int vocab_size() const { return static_cast<int>(id_to_token.size()); }
    int num_labels() const { return static_cast<int>(id_to_label.size()); }
    bool has_routing() const { return !examples.empty() && !examples[0].routing.empty(); }
};

// ---- labeling rules (exposed so tests can regenerate labels) --------------

/// 0 for language A ids, 1 for language B ids, -1 for reserved ids.
int codeswitch_language(const SyntheticTaskSpec& spec, int token_id);

/// Tag at position t: combined parity of the most recent ids within that
/// token's language (a window of 2 for language A, 4 for language B). Tags
/// depend on per-language recent history, so a per-language recurrent expert
/// learns them while a per-token lookup cannot.
std::vector<int> codeswitch_tag_sequence(const SyntheticTaskSpec& spec,
                                         std::span<const int> tokens);

/// Majority of the per-token parity tags; ties resolve to class 0.
int codeswitch_majority_label(const SyntheticTaskSpec& spec, std::span<const int> tokens);

/// +1 / -1 for polarity-bearing ids, 0 otherwise.
int targeted_polarity(const SyntheticTaskSpec& spec, int token_id);

/// Polarity of the token nearest to the (1-based, inclusive) target span.
/// Requires at least one polarity token in the sequence.
int targeted_nearest_label(const SyntheticTaskSpec& spec, std::span<const int> tokens, int span_lo,
                           int span_hi);

// ---- generators ------------------------------------------------------------

LabeledCorpus gen_monolingual(const SyntheticTaskSpec& spec, int language, int count);
LabeledCorpus gen_codeswitched(const SyntheticTaskSpec& spec, int count);

/// Target-dependent sequences: one target token, a polarity token within
/// distance 2 of it, and an opposite-sign distractor at distance >= 4. The
/// label is the polarity of the token nearest the target.
LabeledCorpus gen_targeted(const SyntheticTaskSpec& spec, int count);

/// Whole-sequence polarity classification over the targeted vocabulary
/// (auxiliary data for the target-split setup): every polarity token in a
/// sequence shares one sign, which is the label.
LabeledCorpus gen_polarity(const SyntheticTaskSpec& spec, int count);

// ---- corpus files ----------------------------------------------------------

/// Token vocabulary under construction; ids 0 and 1 are reserved.
struct VocabBuilder {
    std::vector<std::string> id_to_token{"<pad>", "<unk>"};
    std::map<std::string, int> index;

    int get_or_add(const std::string& token);
    int lookup(const std::string& token) const; // kUnkId when absent
};

struct LabelSpace {
    std::vector<std::string> names;
    std::map<std::string, int> index;

    int get_or_add(const std::string& name);
    int lookup(const std::string& name) const; // -1 when absent
};

/// One example per line: `tokens<TAB>label[<TAB>lo:hi]`; tokens are
/// space-separated; tag files carry one tag per token in the label field;
/// lines starting with '#' are skipped. With extend_* false, unknown tokens
/// map to id 1 and unknown labels raise a data error.
LabeledCorpus load_tsv(const std::string& path, std::optional<TaskKind> kind, VocabBuilder& vocab,
                       bool extend_vocab, LabelSpace& labels, bool extend_labels);

/// Fresh-vocabulary convenience form; the task kind is inferred from the
/// first data line.
LabeledCorpus load_tsv(const std::string& path);

void save_tsv(const LabeledCorpus& corpus, const std::string& path);

/// Sidecar with one line of space-separated expert indices per example.
void save_routing(const LabeledCorpus& corpus, const std::string& path);
std::vector<std::vector<int>> load_routing(const std::string& path);

} // namespace girnet
