#include "adaptbpe/adaptation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>

#include "adaptbpe/baselines.hpp"

namespace adaptbpe {

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::Margin: return "margin";
        case StopReason::Exhausted: return "exhausted";
        case StopReason::SwapCap: return "swap_cap";
    }
    return "unknown";
}

AdaptLoop::AdaptLoop(MergeTable table, WordHistogram hist, const AdaptConfig& config,
                     PretokenizerSpec pretokenizer)
    : source_(std::move(table)),
      hist_(std::move(hist)),
      config_(config),
      pretokenizer_(std::move(pretokenizer)) {
    const uint64_t M = source_.merge_count();
    if (config.budget > M)
        fail(ErrorCode::BudgetTooLarge,
             "budget " + std::to_string(config.budget) + " exceeds merge count " +
                 std::to_string(M));
    if (config.budget == 0) fail(ErrorCode::InvalidBudget, "budget must be at least 1");
    if (config.margin < 0.0) fail(ErrorCode::InvalidBudget, "margin must be non-negative");
    if (hist_.empty()) fail(ErrorCode::EmptyCorpus, "adaptation corpus is empty");

    const auto n = static_cast<uint32_t>(config.budget);
    MergeTable prefix = first_k(source_, n);
    corpus_ = tokenize_corpus(prefix, hist_, config.workers);
    first_k_total_ = corpus_.token_total;
    strict_prev_total_ = corpus_.token_total;

    kind_.assign(M, MergeKind::Actual);
    active_order_.reserve(config.budget);
    std::vector<uint32_t> actual_ranks, candidate_ranks;
    actual_ranks.reserve(n);
    candidate_ranks.reserve(M - n);
    for (uint32_t r = 0; r < n; ++r) {
        active_order_.push_back(r);
        actual_ranks.push_back(r);
    }
    for (uint32_t r = n; r < M; ++r) candidate_ranks.push_back(r);
    index_ = std::make_unique<FrequencyIndex>(source_, corpus_, actual_ranks, candidate_ranks);
}

MergeTable AdaptLoop::active_table() const {
    std::vector<std::string> alphabet;
    alphabet.reserve(source_.alphabet_size());
    for (size_t i = 0; i < source_.alphabet_size(); ++i)
        alphabet.push_back(source_.symbol(static_cast<SymbolId>(i)).bytes);
    std::vector<RawMerge> merges;
    merges.reserve(active_order_.size());
    for (uint32_t r : active_order_) {
        const MergeRule& m = source_.rule(r);
        merges.push_back({source_.symbol(m.left).bytes, source_.symbol(m.right).bytes, kind_[r],
                          m.origin_rank});
    }
    return MergeTable::build_rules(alphabet, merges);
}

void AdaptLoop::rebuild_canonical() {
    MergeTable active = active_table();
    TokenizedCorpus canonical = tokenize_corpus(active, hist_, config_.workers);
    // Canonical tokens live in the active table's id space; remap through
    // byte strings back into the source table's ids.
    std::vector<SymbolId> remap(active.symbol_count());
    for (size_t id = 0; id < active.symbol_count(); ++id) {
        auto src = source_.find_symbol(active.symbol(static_cast<SymbolId>(id)).bytes);
        if (!src) throw std::logic_error("active symbol missing from the source table");
        remap[id] = *src;
    }
    for (auto& w : canonical.words)
        for (auto& t : w.tokens) t = remap[static_cast<size_t>(t)];
    corpus_ = std::move(canonical);

    std::vector<uint32_t> actual_ranks, candidate_ranks;
    for (uint32_t r = 0; r < source_.merge_count(); ++r) {
        if (index_->is_actual(r)) actual_ranks.push_back(r);
        if (index_->is_candidate(r)) candidate_ranks.push_back(r);
    }
    index_ = std::make_unique<FrequencyIndex>(source_, corpus_, actual_ranks, candidate_ranks);
}

std::optional<SwapRecord> AdaptLoop::step() {
    if (config_.max_swaps && trace_.size() >= *config_.max_swaps) {
        stop_reason_ = StopReason::SwapCap;
        return std::nullopt;
    }
    auto candidate = index_->max_candidate();
    if (!candidate) {
        stop_reason_ = StopReason::Exhausted;
        return std::nullopt;
    }
    FrequencyIndex::Pick demotable = index_->min_actual();
    const auto fp = static_cast<long double>(demotable.count);
    const auto fq = static_cast<long double>(candidate->count);
    if (!(fp + static_cast<long double>(config_.margin) < fq)) {
        stop_reason_ = StopReason::Margin;
        return std::nullopt;
    }

    kind_[demotable.rank] = MergeKind::Virtual;
    auto delta = index_->update_after_swap(demotable.rank, candidate->rank);
    active_order_.push_back(candidate->rank);

    // Unapplying splits exactly the selected count; applying merges at least
    // the selected count (an unapply can expose additional parent bigrams),
    // so each swap strictly shrinks the working corpus.
    assert(delta.splits == demotable.count);
    assert(delta.applications >= candidate->count);

    SwapRecord rec{trace_.size() + 1,
                   static_cast<int64_t>(demotable.rank),
                   demotable.count,
                   static_cast<int64_t>(candidate->rank),
                   candidate->count,
                   delta.splits,
                   delta.applications,
                   corpus_.token_total};

    if (config_.mode == AdaptMode::Strict) {
        rebuild_canonical();
        // Canonical totals usually shrink but are not guaranteed to: an
        // earlier virtual rule can consume material the promoted rule needed
        // and then unwind in phase 2. Reported, never fatal; the loop still
        // terminates because every swap retires one candidate for good.
        if (corpus_.token_total > strict_prev_total_)
            std::cerr << "note: strict-mode canonical total rose from " << strict_prev_total_
                      << " to " << corpus_.token_total << " at swap " << trace_.size() + 1
                      << "\n";
        strict_prev_total_ = corpus_.token_total;
        rec.incremental_tokens = corpus_.token_total;
    }

#ifndef NDEBUG
    assert(!active_table().validate_properness());
#endif

    trace_.push_back(rec);
    return rec;
}

AdaptationResult AdaptLoop::finish() {
    MergeTable table = active_table();
    if (auto bad = table.validate_properness())
        fail(ErrorCode::ImproperMerge,
             "adapted table violates properness at position " + std::to_string(*bad));

    int64_t depth = -1;
    for (const MergeRule& m : table.rules())
        if (m.kind == MergeKind::Actual) depth = std::max(depth, m.origin_rank);

    AdaptationResult result{std::move(table),
                            pretokenizer_,
                            trace_,
                            depth,
                            corpus_.token_total,
                            0,
                            first_k_total_,
                            stop_reason_};
    result.canonical_token_total =
        tokenize_corpus(result.table, hist_, config_.workers).token_total;
    return result;
}

AdaptationResult adapt(const MergeTable& table, const WordHistogram& hist,
                       const AdaptConfig& config, PretokenizerSpec pretokenizer) {
    AdaptLoop loop(table, hist, config, std::move(pretokenizer));
    while (loop.step()) {
    }
    return loop.finish();
}

}  // namespace adaptbpe
