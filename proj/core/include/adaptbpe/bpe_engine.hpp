#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace adaptbpe {

struct TokenizedWord {
    std::vector<SymbolId> tokens;
};

struct CorpusWord {
    std::string word;  // pre-token, in the table's symbol space
    std::vector<SymbolId> tokens;
    uint64_t count;
};

// Unique pre-tokens with weights; the working state of the adaptation loop.
// Words are sorted by pre-token so word ids are deterministic.
struct TokenizedCorpus {
    std::vector<CorpusWord> words;
    uint64_t token_total = 0;

    uint64_t recount() const;
};

// Encoder bound to one table. Snapshots rule kinds at construction; rebuild
// after set_kind. Phase 1 applies every rule (actual and virtual) in list
// order, each replacing its parent bigram leftmost non-overlapping; phase 2
// splits surviving virtual-result tokens back into their parents, walking
// ranks backwards so nested virtuals unwind fully.
class Tokenizer {
public:
    explicit Tokenizer(const MergeTable& table);

    TokenizedWord tokenize(std::string_view word) const;

    // Also reports which rule positions fired at least once in phase 1.
    TokenizedWord tokenize_recording(std::string_view word, std::vector<uint32_t>& fired) const;

    std::vector<SymbolId> to_base_ids(std::string_view word) const;

    const MergeTable& table() const { return table_; }

private:
    std::vector<SymbolId> phase1(std::vector<SymbolId> ids, std::vector<uint32_t>* fired) const;

    const MergeTable& table_;
    std::unordered_map<uint64_t, uint32_t> pair_to_rule_;
    std::vector<MergeKind> kinds_;
    // Per symbol: itself, or the parents it unwinds to when its producer is
    // virtual. Precomputed in id order (parents always have smaller ids), so
    // tokenize() is safe to call concurrently.
    std::vector<std::vector<SymbolId>> expansions_;
};

TokenizedWord tokenize_word(const MergeTable& table, std::string_view word);

TokenizedCorpus tokenize_corpus(const MergeTable& table, const WordHistogram& hist,
                                unsigned workers = 1);

// Replaces every leftmost non-overlapping adjacency of (rule.left, rule.right)
// with rule.result across the corpus. Returns count-weighted applications;
// token_total drops by the same amount.
uint64_t apply_one(const MergeRule& rule, TokenizedCorpus& corpus);

// Replaces every surviving occurrence of rule.result with its parents.
// Returns count-weighted splits; token_total grows by the same amount.
uint64_t unapply_one(const MergeRule& rule, TokenizedCorpus& corpus);

std::string detokenize(const std::vector<SymbolId>& tokens, const MergeTable& table,
                       const PretokenizerSpec& spec);

// Deliberately naive rescanning implementation of the same contract as
// tokenize_word. Verification oracle; not for production paths.
TokenizedWord reference_tokenize(const MergeTable& table, std::string_view word);

}  // namespace adaptbpe
