#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/freq_index.hpp"
#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace adaptbpe {

enum class AdaptMode : uint8_t {
    // Follows the incremental unapply/apply accounting literally. The working
    // corpus can drift from canonical two-phase tokenization of the exported
    // table (an unapply may expose bigrams that canonical rule ordering would
    // block), so the canonical total is reported alongside.
    Fast,
    // Re-tokenizes canonically after every swap and selects on canonical
    // counts. Slower by a full corpus pass per swap. Canonical totals are not
    // structurally monotone; increases are reported on stderr.
    Strict,
};

struct AdaptConfig {
    uint64_t budget = 0;            // N: target number of actual merges, 1..M
    double margin = 0.0;            // stop-rule slack: swap while freq(p) + margin < freq(q)
    AdaptMode mode = AdaptMode::Fast;
    std::optional<uint64_t> max_swaps;
    unsigned workers = 1;
};

struct SwapRecord {
    uint64_t step;           // 1-based
    int64_t demoted_rank;
    uint64_t demoted_freq;   // unigram count of the demoted result at selection
    int64_t promoted_rank;
    uint64_t promoted_freq;  // bigram count of the promoted pair at selection
    uint64_t splits;
    uint64_t applications;
    uint64_t incremental_tokens;  // working total after the swap
};

enum class StopReason : uint8_t { Margin, Exhausted, SwapCap };

const char* stop_reason_name(StopReason r);

struct AdaptationResult {
    // Active rules only: the initial prefix in origin order (demoted rules
    // virtual, in place), then promotions in promotion order. Exactly N
    // actual rules; never-promoted tail rules are absent.
    MergeTable table;
    PretokenizerSpec pretokenizer;
    std::vector<SwapRecord> swap_trace;
    int64_t merge_depth;                // max origin rank among actual rules
    uint64_t incremental_token_total;   // final working total under loop accounting
    uint64_t canonical_token_total;     // two-phase re-tokenization of the result
    uint64_t first_k_token_total;       // plain prefix truncation, same corpus
    StopReason stop_reason;
};

// One greedy pass of the adaptation loop, steppable for inspection. Owns the
// working corpus and frequency index; strictly sequential.
class AdaptLoop {
public:
    AdaptLoop(MergeTable table, WordHistogram hist, const AdaptConfig& config,
              PretokenizerSpec pretokenizer = PretokenizerSpec::whitespace());

    AdaptLoop(const AdaptLoop&) = delete;
    AdaptLoop& operator=(const AdaptLoop&) = delete;
    AdaptLoop(AdaptLoop&&) = delete;

    // One iteration: nullopt when the stop condition holds (see stop_reason()).
    std::optional<SwapRecord> step();

    AdaptationResult finish();

    uint64_t incremental_total() const { return corpus_.token_total; }
    uint64_t swap_count() const { return static_cast<uint64_t>(trace_.size()); }
    StopReason stop_reason() const { return stop_reason_; }
    const TokenizedCorpus& corpus() const { return corpus_; }
    const FrequencyIndex& index() const { return *index_; }

    // Current active list (prefix + promotions so far) with kind flags.
    MergeTable active_table() const;

private:
    void rebuild_canonical();

    // Owned: the frequency index references these, so the loop is pinned.
    MergeTable source_;
    WordHistogram hist_;
    AdaptConfig config_;
    PretokenizerSpec pretokenizer_;
    TokenizedCorpus corpus_;
    std::unique_ptr<FrequencyIndex> index_;
    std::vector<uint32_t> active_order_;   // source ranks, prefix then promotions
    std::vector<MergeKind> kind_;          // per source rank
    std::vector<SwapRecord> trace_;
    StopReason stop_reason_ = StopReason::Margin;
    uint64_t first_k_total_ = 0;
    uint64_t strict_prev_total_ = 0;
};

// Algorithm: start from the first N merges, then repeatedly demote the
// lowest-frequency actual merge and promote the highest-yield remaining merge
// while the frequencies differ by more than the margin. The result keeps
// exactly N actual merges, all drawn from the pretrained list.
AdaptationResult adapt(const MergeTable& table, const WordHistogram& hist,
                       const AdaptConfig& config,
                       PretokenizerSpec pretokenizer = PretokenizerSpec::whitespace());

}  // namespace adaptbpe
