#include "adaptbpe/baselines.hpp"

#include <algorithm>

#include "adaptbpe/parallel.hpp"

namespace adaptbpe {

namespace {

void check_budget(const MergeTable& table, uint64_t n) {
    if (n > table.merge_count())
        fail(ErrorCode::BudgetTooLarge,
             "budget " + std::to_string(n) + " exceeds merge count " +
                 std::to_string(table.merge_count()));
}

std::vector<std::string> alphabet_of(const MergeTable& table) {
    std::vector<std::string> alphabet;
    alphabet.reserve(table.alphabet_size());
    for (size_t i = 0; i < table.alphabet_size(); ++i)
        alphabet.push_back(table.symbol(static_cast<SymbolId>(i)).bytes);
    return alphabet;
}

RawMerge raw_of(const MergeTable& table, size_t position, MergeKind kind) {
    const MergeRule& m = table.rule(position);
    return {table.symbol(m.left).bytes, table.symbol(m.right).bytes, kind, m.origin_rank};
}

}  // namespace

MergeTable first_k(const MergeTable& table, uint64_t n) {
    check_budget(table, n);
    std::vector<RawMerge> merges;
    merges.reserve(n);
    for (size_t i = 0; i < n; ++i) merges.push_back(raw_of(table, i, MergeKind::Actual));
    return MergeTable::build_rules(alphabet_of(table), merges);
}

MergeTable first_k_positive(const MergeTable& table, const WordHistogram& hist, uint64_t n,
                            unsigned workers) {
    check_budget(table, n);
    // Whether a merge fires during sequential application is decided entirely
    // by the rules before it, so one full-table pass per unique word recovers
    // the fired set of the whole scan.
    const Tokenizer tok(table);
    std::vector<CorpusWord> words;
    words.reserve(hist.entries.size());
    for (const auto& [word, count] : hist.entries) words.push_back({word, {}, count});
    std::sort(words.begin(), words.end(),
              [](const CorpusWord& a, const CorpusWord& b) { return a.word < b.word; });

    std::vector<std::vector<uint32_t>> fired_per_word(words.size());
    parallel_for(words.size(), workers, [&](size_t i) {
        tok.tokenize_recording(words[i].word, fired_per_word[i]);
    });
    std::vector<uint8_t> fired(table.merge_count(), 0);
    for (const auto& f : fired_per_word)
        for (uint32_t r : f) fired[r] = 1;

    std::vector<RawMerge> merges;
    uint64_t live = 0;
    for (size_t r = 0; r < table.merge_count() && live < n; ++r) {
        bool f = fired[r] != 0;
        merges.push_back(raw_of(table, r, f ? MergeKind::Actual : MergeKind::Virtual));
        if (f) ++live;
    }
    if (live < n)
        fail(ErrorCode::InsufficientLiveMerges,
             "only " + std::to_string(live) + " merges fire on this corpus, budget " +
                 std::to_string(n));
    return MergeTable::build_rules(alphabet_of(table), merges);
}

MergeTable top_k(const MergeTable& table, const WordHistogram& hist, uint64_t n,
                 unsigned workers) {
    check_budget(table, n);
    TokenizedCorpus full = tokenize_corpus(table, hist, workers);

    std::vector<uint64_t> surface(table.symbol_count(), 0);
    for (const auto& w : full.words)
        for (SymbolId t : w.tokens) surface[static_cast<size_t>(t)] += w.count;

    // Rank every merge by its result's surface frequency, zero included, so
    // budgets beyond the surfaced vocabulary fall back to rank order.
    std::vector<size_t> order(table.merge_count());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        uint64_t fa = surface[static_cast<size_t>(table.rule(a).result)];
        uint64_t fb = surface[static_cast<size_t>(table.rule(b).result)];
        if (fa != fb) return fa > fb;
        return table.rule(a).origin_rank < table.rule(b).origin_rank;
    });

    std::vector<MergeKind> kinds(table.merge_count(), MergeKind::Virtual);
    for (size_t i = 0; i < n; ++i) kinds[order[i]] = MergeKind::Actual;

    std::vector<RawMerge> merges;
    merges.reserve(table.merge_count());
    for (size_t r = 0; r < table.merge_count(); ++r)
        merges.push_back(raw_of(table, r, kinds[r]));
    return MergeTable::build_rules(alphabet_of(table), merges);
}

}  // namespace adaptbpe
