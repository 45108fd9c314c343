#include "adaptbpe/bpe_engine.hpp"

#include <algorithm>
#include <limits>

#include "adaptbpe/parallel.hpp"

namespace adaptbpe {

namespace {

inline uint64_t pack_pair(SymbolId a, SymbolId b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

std::vector<SymbolId> match_base_symbols(const MergeTable& table, std::string_view word) {
    std::vector<SymbolId> ids;
    ids.reserve(word.size());
    const size_t max_len = table.max_base_symbol_length();
    size_t pos = 0;
    while (pos < word.size()) {
        size_t take = std::min(max_len, word.size() - pos);
        for (;; --take) {
            if (take == 0)
                fail(ErrorCode::UnknownByte,
                     "byte at offset " + std::to_string(pos) + " not covered by the base alphabet");
            auto id = table.find_symbol(word.substr(pos, take));
            if (id && table.symbol(*id).is_base) {
                ids.push_back(*id);
                pos += take;
                break;
            }
        }
    }
    return ids;
}

}  // namespace

uint64_t TokenizedCorpus::recount() const {
    uint64_t total = 0;
    for (const auto& w : words) total += w.count * w.tokens.size();
    return total;
}

Tokenizer::Tokenizer(const MergeTable& table) : table_(table) {
    pair_to_rule_.reserve(table.merge_count() * 2);
    kinds_.reserve(table.merge_count());
    for (size_t i = 0; i < table.merge_count(); ++i) {
        const MergeRule& m = table.rule(i);
        pair_to_rule_.emplace(pack_pair(m.left, m.right), static_cast<uint32_t>(i));
        kinds_.push_back(m.kind);
    }
    expansions_.resize(table.symbol_count());
    for (size_t id = 0; id < table.symbol_count(); ++id) {
        auto producer = table.producer_of(static_cast<SymbolId>(id));
        if (producer && kinds_[*producer] == MergeKind::Virtual) {
            const MergeRule& m = table.rule(*producer);
            auto& out = expansions_[id];
            out.insert(out.end(), expansions_[m.left].begin(), expansions_[m.left].end());
            out.insert(out.end(), expansions_[m.right].begin(), expansions_[m.right].end());
        } else {
            expansions_[id].push_back(static_cast<SymbolId>(id));
        }
    }
}

std::vector<SymbolId> Tokenizer::to_base_ids(std::string_view word) const {
    return match_base_symbols(table_, word);
}

std::vector<SymbolId> Tokenizer::phase1(std::vector<SymbolId> ids,
                                        std::vector<uint32_t>* fired) const {
    // Repeatedly merging the leftmost lowest-position pair is equivalent to
    // applying rules in list order: a merge only ever creates pairs whose
    // rules sit later in a proper list with unique results.
    constexpr uint32_t kNoRule = std::numeric_limits<uint32_t>::max();
    size_t n = ids.size();
    if (n < 2) return ids;
    std::vector<uint32_t> rule_at(n, kNoRule);
    auto lookup = [&](size_t i) -> uint32_t {
        auto it = pair_to_rule_.find(pack_pair(ids[i], ids[i + 1]));
        return it == pair_to_rule_.end() ? kNoRule : it->second;
    };
    for (size_t i = 0; i + 1 < n; ++i) rule_at[i] = lookup(i);

    while (n > 1) {
        uint32_t best = kNoRule;
        size_t best_idx = 0;
        for (size_t i = 0; i + 1 < n; ++i) {
            if (rule_at[i] < best) {
                best = rule_at[i];
                best_idx = i;
            }
        }
        if (best == kNoRule) break;
        const MergeRule& m = table_.rule(best);
        ids[best_idx] = m.result;
        if (fired) fired->push_back(best);
        size_t tail = n - best_idx - 2;
        if (tail > 0) {
            std::move(ids.begin() + best_idx + 2, ids.begin() + n, ids.begin() + best_idx + 1);
            std::move(rule_at.begin() + best_idx + 2, rule_at.begin() + n,
                      rule_at.begin() + best_idx + 1);
        }
        --n;
        rule_at[best_idx] = best_idx + 1 < n ? lookup(best_idx) : kNoRule;
        if (best_idx > 0) rule_at[best_idx - 1] = lookup(best_idx - 1);
    }
    ids.resize(n);
    return ids;
}

TokenizedWord Tokenizer::tokenize(std::string_view word) const {
    std::vector<SymbolId> merged = phase1(to_base_ids(word), nullptr);
    TokenizedWord out;
    out.tokens.reserve(merged.size());
    for (SymbolId id : merged) {
        const auto& exp = expansions_[static_cast<size_t>(id)];
        out.tokens.insert(out.tokens.end(), exp.begin(), exp.end());
    }
    return out;
}

TokenizedWord Tokenizer::tokenize_recording(std::string_view word,
                                            std::vector<uint32_t>& fired) const {
    std::vector<SymbolId> merged = phase1(to_base_ids(word), &fired);
    std::sort(fired.begin(), fired.end());
    fired.erase(std::unique(fired.begin(), fired.end()), fired.end());
    TokenizedWord out;
    for (SymbolId id : merged) {
        const auto& exp = expansions_[static_cast<size_t>(id)];
        out.tokens.insert(out.tokens.end(), exp.begin(), exp.end());
    }
    return out;
}

TokenizedWord tokenize_word(const MergeTable& table, std::string_view word) {
    return Tokenizer(table).tokenize(word);
}

TokenizedCorpus tokenize_corpus(const MergeTable& table, const WordHistogram& hist,
                                unsigned workers) {
    TokenizedCorpus corpus;
    corpus.words.reserve(hist.entries.size());
    for (const auto& [word, count] : hist.entries) corpus.words.push_back({word, {}, count});
    std::sort(corpus.words.begin(), corpus.words.end(),
              [](const CorpusWord& a, const CorpusWord& b) { return a.word < b.word; });

    const Tokenizer tok(table);
    parallel_for(corpus.words.size(), workers,
                 [&](size_t i) { corpus.words[i].tokens = tok.tokenize(corpus.words[i].word).tokens; });

    corpus.token_total = corpus.recount();
    return corpus;
}

uint64_t apply_one(const MergeRule& rule, TokenizedCorpus& corpus) {
    uint64_t applications = 0;
    for (auto& w : corpus.words) {
        auto& t = w.tokens;
        size_t occurrences = 0;
        size_t out = 0;
        for (size_t i = 0; i < t.size();) {
            if (i + 1 < t.size() && t[i] == rule.left && t[i + 1] == rule.right) {
                t[out++] = rule.result;
                i += 2;
                ++occurrences;
            } else {
                t[out++] = t[i++];
            }
        }
        if (occurrences > 0) {
            t.resize(out);
            applications += occurrences * w.count;
        }
    }
    corpus.token_total -= applications;
    return applications;
}

uint64_t unapply_one(const MergeRule& rule, TokenizedCorpus& corpus) {
    uint64_t splits = 0;
    std::vector<SymbolId> rebuilt;
    for (auto& w : corpus.words) {
        size_t occurrences = 0;
        for (SymbolId id : w.tokens)
            if (id == rule.result) ++occurrences;
        if (occurrences == 0) continue;
        rebuilt.clear();
        rebuilt.reserve(w.tokens.size() + occurrences);
        for (SymbolId id : w.tokens) {
            if (id == rule.result) {
                rebuilt.push_back(rule.left);
                rebuilt.push_back(rule.right);
            } else {
                rebuilt.push_back(id);
            }
        }
        w.tokens = rebuilt;
        splits += occurrences * w.count;
    }
    corpus.token_total += splits;
    return splits;
}

std::string detokenize(const std::vector<SymbolId>& tokens, const MergeTable& table,
                       const PretokenizerSpec& spec) {
    std::string bytes;
    for (SymbolId id : tokens) bytes += table.symbol(id).bytes;
    if (spec.scheme == Scheme::ByteLevel) return unremap_units(bytes);
    return bytes;
}

TokenizedWord reference_tokenize(const MergeTable& table, std::string_view word) {
    std::vector<SymbolId> t = match_base_symbols(table, word);

    for (size_t r = 0; r < table.merge_count(); ++r) {
        const MergeRule& m = table.rule(r);
        std::vector<SymbolId> next;
        size_t i = 0;
        while (i < t.size()) {
            if (i + 1 < t.size() && t[i] == m.left && t[i + 1] == m.right) {
                next.push_back(m.result);
                i += 2;
            } else {
                next.push_back(t[i]);
                i += 1;
            }
        }
        t = next;
    }

    for (size_t r = table.merge_count(); r-- > 0;) {
        const MergeRule& m = table.rule(r);
        if (m.kind != MergeKind::Virtual) continue;
        std::vector<SymbolId> next;
        for (SymbolId id : t) {
            if (id == m.result) {
                next.push_back(m.left);
                next.push_back(m.right);
            } else {
                next.push_back(id);
            }
        }
        t = next;
    }

    return {t};
}

}  // namespace adaptbpe
