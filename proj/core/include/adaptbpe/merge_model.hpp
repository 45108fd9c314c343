#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adaptbpe/error.hpp"

namespace adaptbpe {

using SymbolId = int32_t;

enum class MergeKind : uint8_t { Actual, Virtual };

// A token: either a base alphabet entry or the result of exactly one merge.
struct Symbol {
    SymbolId id;
    std::string bytes;
    bool is_base;
};

struct MergeRule {
    SymbolId left;
    SymbolId right;
    SymbolId result;
    int64_t origin_rank;  // position in the pretrained list; stable identity
    MergeKind kind;
};

// Input form of a merge before symbol resolution.
struct RawMerge {
    std::string left;
    std::string right;
    MergeKind kind = MergeKind::Actual;
    int64_t origin_rank = -1;  // -1: use list position
};

// Ordered merge list over a base alphabet. Symbol ids are dense: base symbols
// take 0..alphabet_size-1, then one id per merge in list order. Immutable
// after construction except for set_kind; concurrent reads are safe, mutation
// must be serialized by the caller.
class MergeTable {
public:
    // Validates properness and one-rule-per-result while building.
    static MergeTable build(const std::vector<std::string>& alphabet,
                            const std::vector<std::pair<std::string, std::string>>& merges);
    static MergeTable build_rules(const std::vector<std::string>& alphabet,
                                  const std::vector<RawMerge>& merges);

    // Resolves symbols across the whole list without checking rule order.
    // For constructing deliberately broken tables in validation tests.
    static MergeTable build_unchecked(const std::vector<std::string>& alphabet,
                                      const std::vector<RawMerge>& merges);

    // nullopt when proper; otherwise the first rule whose parent is neither a
    // base symbol nor the result of an earlier rule.
    std::optional<size_t> validate_properness() const;

    void set_kind(size_t position, MergeKind kind);

    size_t alphabet_size() const { return alphabet_size_; }
    size_t merge_count() const { return merges_.size(); }
    size_t symbol_count() const { return symbols_.size(); }
    size_t actual_count() const { return actual_count_; }

    const Symbol& symbol(SymbolId id) const;
    const MergeRule& rule(size_t position) const;
    const std::vector<MergeRule>& rules() const { return merges_; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    std::optional<SymbolId> find_symbol(std::string_view bytes) const;

    // Position of the rule producing `id`, or nullopt for base symbols.
    std::optional<size_t> producer_of(SymbolId id) const;

    // Recursively expands a symbol to base symbol ids.
    std::vector<SymbolId> expand_to_base(SymbolId id) const;

    // Longest byte length over base symbols; used by the word-to-symbol matcher.
    size_t max_base_symbol_length() const { return max_base_len_; }

private:
    MergeTable() = default;
    static MergeTable build_impl(const std::vector<std::string>& alphabet,
                                 const std::vector<RawMerge>& merges, bool check_order);

    std::vector<Symbol> symbols_;
    std::vector<MergeRule> merges_;
    std::unordered_map<std::string, SymbolId> bytes_to_id_;
    std::vector<int32_t> producer_;  // symbol id -> rule position, -1 for base
    size_t alphabet_size_ = 0;
    size_t actual_count_ = 0;
    size_t max_base_len_ = 0;
};

}  // namespace adaptbpe
