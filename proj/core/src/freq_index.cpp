#include "adaptbpe/freq_index.hpp"

#include <algorithm>
#include <cassert>

namespace adaptbpe {

namespace {

inline uint64_t pack_pair(SymbolId a, SymbolId b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

std::vector<SymbolId> distinct_sorted(const std::vector<SymbolId>& tokens) {
    std::vector<SymbolId> out = tokens;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

FrequencyIndex::FrequencyIndex(const MergeTable& table, TokenizedCorpus& corpus,
                               const std::vector<uint32_t>& actual_ranks,
                               const std::vector<uint32_t>& candidate_ranks)
    : table_(table), corpus_(corpus) {
    sym_count_.assign(table.symbol_count(), 0);
    cand_count_.assign(table.merge_count(), 0);
    occ_.resize(table.symbol_count());
    is_actual_.assign(table.merge_count(), 0);
    is_candidate_.assign(table.merge_count(), 0);

    for (uint32_t r : actual_ranks) is_actual_[r] = 1;
    for (uint32_t r : candidate_ranks) {
        is_candidate_[r] = 1;
        ++candidate_size_;
        const MergeRule& m = table.rule(r);
        pair_to_candidate_.emplace(pack_pair(m.left, m.right), r);
    }

    for (uint32_t w = 0; w < corpus_.words.size(); ++w) {
        add_word_counts(w, +1);
        for (SymbolId s : distinct_sorted(corpus_.words[w].tokens))
            occ_[static_cast<size_t>(s)].insert(w);
    }
    changed_syms_.clear();
    changed_cands_.clear();

    for (uint32_t r : actual_ranks) push_actual(r);
    for (uint32_t r : candidate_ranks) max_heap_.push({cand_count_[r], r});
}

void FrequencyIndex::add_word_counts(uint32_t word_id, int sign) {
    const CorpusWord& w = corpus_.words[word_id];
    const auto& t = w.tokens;
    auto update = [&](uint64_t& slot) {
        if (sign > 0)
            slot += w.count;
        else
            slot -= w.count;
    };
    size_t run_start = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i > 0 && t[i] != t[i - 1]) run_start = i;
        update(sym_count_[static_cast<size_t>(t[i])]);
        changed_syms_.insert(t[i]);
        if (i + 1 >= t.size()) continue;
        // For repeated symbols only even offsets within a run start a
        // non-overlapping occurrence: (x,x) on x^k counts floor(k/2).
        if (t[i] == t[i + 1] && (i - run_start) % 2 != 0) continue;
        auto it = pair_to_candidate_.find(pack_pair(t[i], t[i + 1]));
        if (it != pair_to_candidate_.end()) {
            update(cand_count_[it->second]);
            changed_cands_.insert(it->second);
        }
    }
}

void FrequencyIndex::refresh_occurrences(uint32_t word_id,
                                         const std::vector<SymbolId>& old_tokens) {
    std::vector<SymbolId> olds = distinct_sorted(old_tokens);
    std::vector<SymbolId> news = distinct_sorted(corpus_.words[word_id].tokens);
    for (SymbolId s : olds)
        if (!std::binary_search(news.begin(), news.end(), s))
            occ_[static_cast<size_t>(s)].erase(word_id);
    for (SymbolId s : news)
        if (!std::binary_search(olds.begin(), olds.end(), s))
            occ_[static_cast<size_t>(s)].insert(word_id);
}

void FrequencyIndex::push_actual(uint32_t rank) {
    min_heap_.push({sym_count_[static_cast<size_t>(table_.rule(rank).result)], rank});
}

FrequencyIndex::Pick FrequencyIndex::min_actual() const {
    while (!min_heap_.empty()) {
        MinEntry top = min_heap_.top();
        if (is_actual_[top.rank] &&
            sym_count_[static_cast<size_t>(table_.rule(top.rank).result)] == top.count)
            return {top.rank, top.count};
        min_heap_.pop();
    }
    fail(ErrorCode::EmptySet, "no demotable merge");
}

std::optional<FrequencyIndex::Pick> FrequencyIndex::max_candidate() const {
    while (!max_heap_.empty()) {
        MaxEntry top = max_heap_.top();
        if (is_candidate_[top.rank] && cand_count_[top.rank] == top.count)
            return Pick{top.rank, top.count};
        max_heap_.pop();
    }
    return std::nullopt;
}

FrequencyIndex::SwapDelta FrequencyIndex::update_after_swap(uint32_t demoted, uint32_t promoted) {
    assert(is_actual_[demoted]);
    assert(is_candidate_[promoted]);

    // Demote: unapply the rule's result everywhere it survives.
    is_actual_[demoted] = 0;
    const MergeRule& dm = table_.rule(demoted);
    uint64_t splits = 0;
    {
        const auto& holders = occ_[static_cast<size_t>(dm.result)];
        std::vector<uint32_t> affected(holders.begin(), holders.end());
        std::vector<SymbolId> old_tokens;
        for (uint32_t w : affected) {
            CorpusWord& word = corpus_.words[w];
            old_tokens = word.tokens;
            add_word_counts(w, -1);
            std::vector<SymbolId> rebuilt;
            rebuilt.reserve(word.tokens.size() + 4);
            size_t occurrences = 0;
            for (SymbolId id : word.tokens) {
                if (id == dm.result) {
                    rebuilt.push_back(dm.left);
                    rebuilt.push_back(dm.right);
                    ++occurrences;
                } else {
                    rebuilt.push_back(id);
                }
            }
            word.tokens = std::move(rebuilt);
            add_word_counts(w, +1);
            refresh_occurrences(w, old_tokens);
            splits += occurrences * word.count;
        }
        corpus_.token_total += splits;
    }

    // Promote: stop tracking the pair as a candidate, then apply it.
    const MergeRule& pm = table_.rule(promoted);
    is_candidate_[promoted] = 0;
    --candidate_size_;
    pair_to_candidate_.erase(pack_pair(pm.left, pm.right));
    uint64_t expected = cand_count_[promoted];
    cand_count_[promoted] = 0;
    is_actual_[promoted] = 1;

    uint64_t applications = 0;
    {
        const auto& occ_l = occ_[static_cast<size_t>(pm.left)];
        const auto& occ_r = occ_[static_cast<size_t>(pm.right)];
        const bool same = pm.left == pm.right;
        const auto& smaller = (same || occ_l.size() <= occ_r.size()) ? occ_l : occ_r;
        const auto& other = (&smaller == &occ_l) ? occ_r : occ_l;
        std::vector<uint32_t> affected(smaller.begin(), smaller.end());
        std::vector<SymbolId> old_tokens;
        for (uint32_t w : affected) {
            if (!same && !other.count(w)) continue;
            CorpusWord& word = corpus_.words[w];
            auto& t = word.tokens;
            size_t occurrences = 0;
            for (size_t i = 0; i + 1 < t.size(); ++i) {
                if (t[i] == pm.left && t[i + 1] == pm.right) {
                    ++occurrences;
                    ++i;
                }
            }
            if (occurrences == 0) continue;
            old_tokens = t;
            add_word_counts(w, -1);
            size_t out = 0;
            for (size_t i = 0; i < t.size();) {
                if (i + 1 < t.size() && t[i] == pm.left && t[i + 1] == pm.right) {
                    t[out++] = pm.result;
                    i += 2;
                } else {
                    t[out++] = t[i++];
                }
            }
            t.resize(out);
            add_word_counts(w, +1);
            refresh_occurrences(w, old_tokens);
            applications += occurrences * word.count;
        }
        corpus_.token_total -= applications;
    }
    assert(applications == expected);
    (void)expected;

    for (SymbolId s : changed_syms_) {
        auto producer = table_.producer_of(s);
        if (producer && is_actual_[*producer]) push_actual(static_cast<uint32_t>(*producer));
    }
    for (uint32_t c : changed_cands_)
        if (is_candidate_[c]) max_heap_.push({cand_count_[c], c});
    changed_syms_.clear();
    changed_cands_.clear();
    push_actual(promoted);

    return {splits, applications};
}

std::vector<uint32_t> FrequencyIndex::actual_ranks() const {
    std::vector<uint32_t> out;
    for (uint32_t r = 0; r < is_actual_.size(); ++r)
        if (is_actual_[r]) out.push_back(r);
    return out;
}

std::vector<uint32_t> FrequencyIndex::candidate_ranks() const {
    std::vector<uint32_t> out;
    for (uint32_t r = 0; r < is_candidate_.size(); ++r)
        if (is_candidate_[r]) out.push_back(r);
    return out;
}

}  // namespace adaptbpe
