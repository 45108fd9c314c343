#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/merge_model.hpp"

namespace adaptbpe {

// Unigram and candidate-bigram frequencies over a TokenizedCorpus, with
// incremental updates driven by a token -> word inverted index and lazily
// invalidated count heaps. Single writer; the adaptation loop owns it.
//
// Rules are identified by their position in the source table (= origin rank
// for a pretrained list). Bigrams are tracked only for candidate rules; the
// argmax never inspects anything else. Counts are non-overlapping: the pair
// (x, x) on a run of k x's counts floor(k / 2).
class FrequencyIndex {
public:
    struct Pick {
        uint32_t rank;
        uint64_t count;
    };

    struct SwapDelta {
        uint64_t splits;
        uint64_t applications;
    };

    FrequencyIndex(const MergeTable& table, TokenizedCorpus& corpus,
                   const std::vector<uint32_t>& actual_ranks,
                   const std::vector<uint32_t>& candidate_ranks);

    // Minimum unigram count over demotable (actual) rules' result tokens;
    // ties break toward the highest rank. Throws EmptySet when none.
    Pick min_actual() const;

    // Maximum bigram count over candidate rules; ties break toward the
    // lowest rank. nullopt when the candidate set is empty.
    std::optional<Pick> max_candidate() const;

    // Demotes `demoted` (unapplying its result), promotes `promoted`
    // (applying its pair), and updates counts incrementally. Only words in
    // the occurrence index of the affected symbols are revisited.
    SwapDelta update_after_swap(uint32_t demoted, uint32_t promoted);

    uint64_t unigram_count(SymbolId id) const { return sym_count_[static_cast<size_t>(id)]; }
    uint64_t candidate_count(uint32_t rank) const { return cand_count_[rank]; }
    bool is_actual(uint32_t rank) const { return is_actual_[rank] != 0; }
    bool is_candidate(uint32_t rank) const { return is_candidate_[rank] != 0; }
    size_t candidate_size() const { return candidate_size_; }
    const std::unordered_set<uint32_t>& occurrences(SymbolId id) const {
        return occ_[static_cast<size_t>(id)];
    }

    std::vector<uint32_t> actual_ranks() const;
    std::vector<uint32_t> candidate_ranks() const;

private:
    struct MinEntry {
        uint64_t count;
        uint32_t rank;
        bool operator<(const MinEntry& o) const {
            if (count != o.count) return count > o.count;  // smaller count first
            return rank < o.rank;                          // then higher rank first
        }
    };
    struct MaxEntry {
        uint64_t count;
        uint32_t rank;
        bool operator<(const MaxEntry& o) const {
            if (count != o.count) return count < o.count;  // larger count first
            return rank > o.rank;                          // then lower rank first
        }
    };

    void add_word_counts(uint32_t word_id, int sign);
    void refresh_occurrences(uint32_t word_id, const std::vector<SymbolId>& old_tokens);
    void push_actual(uint32_t rank);

    const MergeTable& table_;
    TokenizedCorpus& corpus_;
    std::vector<uint64_t> sym_count_;
    std::vector<uint64_t> cand_count_;
    std::vector<std::unordered_set<uint32_t>> occ_;
    std::vector<uint8_t> is_actual_;
    std::vector<uint8_t> is_candidate_;
    size_t candidate_size_ = 0;
    std::unordered_map<uint64_t, uint32_t> pair_to_candidate_;
    std::unordered_set<SymbolId> changed_syms_;
    std::unordered_set<uint32_t> changed_cands_;
    mutable std::priority_queue<MinEntry> min_heap_;
    mutable std::priority_queue<MaxEntry> max_heap_;
};

}  // namespace adaptbpe
