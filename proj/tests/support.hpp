#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace testsupport {

using namespace adaptbpe;

// Shared toy fixture: alphabet {a,b,c,d} with merges
//   0:(a,b)->ab  1:(ab,c)->abc  2:(c,d)->cd  3:(ab,ab)->abab  4:(abc,d)->abcd
inline MergeTable fixture_table() {
    return MergeTable::build({"a", "b", "c", "d"},
                             {{"a", "b"}, {"ab", "c"}, {"c", "d"}, {"ab", "ab"}, {"abc", "d"}});
}

// {abab:3, abcd:2, cd:5}; 30 base symbols over 10 words.
inline WordHistogram fixture_histogram() {
    return build_histogram({"abab abab abcd", "abab abcd cd cd cd cd cd"},
                           PretokenizerSpec::whitespace());
}

inline std::vector<std::string> token_strings(const MergeTable& table,
                                              const std::vector<SymbolId>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (SymbolId id : ids) out.push_back(table.symbol(id).bytes);
    return out;
}

// Proper by construction: each merge combines two already-available symbols.
inline MergeTable random_proper_table(std::mt19937_64& rng, size_t max_alphabet = 6,
                                      size_t max_merges = 20, bool random_kinds = false) {
    size_t alpha_n = 1 + rng() % max_alphabet;
    std::vector<std::string> alphabet;
    for (size_t i = 0; i < alpha_n; ++i) alphabet.push_back(std::string(1, char('a' + i)));

    std::vector<RawMerge> merges;
    std::vector<std::string> pool = alphabet;
    std::vector<std::string> seen = alphabet;
    size_t target = rng() % (max_merges + 1);
    size_t attempts = 0;
    while (merges.size() < target && attempts < max_merges * 8) {
        ++attempts;
        const std::string& l = pool[rng() % pool.size()];
        const std::string& r = pool[rng() % pool.size()];
        std::string result = l + r;
        if (result.size() > 16) continue;
        if (std::find(seen.begin(), seen.end(), result) != seen.end()) continue;
        MergeKind kind =
            random_kinds && rng() % 3 == 0 ? MergeKind::Virtual : MergeKind::Actual;
        merges.push_back({l, r, kind, -1});
        seen.push_back(result);
        pool.push_back(result);
    }
    return MergeTable::build_rules(alphabet, merges);
}

inline std::string random_word(std::mt19937_64& rng, const MergeTable& table,
                               size_t max_len = 30) {
    size_t len = rng() % (max_len + 1);
    std::string out;
    for (size_t i = 0; i < len; ++i)
        out += table.symbol(static_cast<SymbolId>(rng() % table.alphabet_size())).bytes;
    return out;
}

inline WordHistogram random_histogram(std::mt19937_64& rng, const MergeTable& table,
                                      size_t max_unique = 8, size_t max_len = 12,
                                      uint64_t max_count = 5) {
    WordHistogram h;
    size_t unique = 1 + rng() % max_unique;
    for (size_t i = 0; i < unique; ++i) {
        std::string word = random_word(rng, table, max_len);
        if (word.empty()) word = table.symbol(0).bytes;
        uint64_t count = 1 + rng() % max_count;
        h.entries[word] += count;
        h.total_base_symbols += word.size() * count;
        h.total_words += count;
        h.total_chars += word.size() * count;
    }
    return h;
}

inline std::string random_bytes(std::mt19937_64& rng, size_t max_len = 40) {
    size_t len = rng() % (max_len + 1);
    std::string out;
    for (size_t i = 0; i < len; ++i) out.push_back(static_cast<char>(rng() & 0xFF));
    return out;
}

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("adaptbpe_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
