#include "adaptbpe/merge_model.hpp"

#include <algorithm>

namespace adaptbpe {

MergeTable MergeTable::build(const std::vector<std::string>& alphabet,
                             const std::vector<std::pair<std::string, std::string>>& merges) {
    std::vector<RawMerge> raw;
    raw.reserve(merges.size());
    for (const auto& [l, r] : merges) raw.push_back({l, r, MergeKind::Actual, -1});
    return build_impl(alphabet, raw, /*check_order=*/true);
}

MergeTable MergeTable::build_rules(const std::vector<std::string>& alphabet,
                                   const std::vector<RawMerge>& merges) {
    return build_impl(alphabet, merges, /*check_order=*/true);
}

MergeTable MergeTable::build_unchecked(const std::vector<std::string>& alphabet,
                                       const std::vector<RawMerge>& merges) {
    return build_impl(alphabet, merges, /*check_order=*/false);
}

MergeTable MergeTable::build_impl(const std::vector<std::string>& alphabet,
                                  const std::vector<RawMerge>& merges, bool check_order) {
    MergeTable t;
    t.alphabet_size_ = alphabet.size();
    t.symbols_.reserve(alphabet.size() + merges.size());
    for (const auto& bytes : alphabet) {
        if (bytes.empty()) fail(ErrorCode::SchemaError, "empty alphabet entry");
        SymbolId id = static_cast<SymbolId>(t.symbols_.size());
        if (!t.bytes_to_id_.emplace(bytes, id).second)
            fail(ErrorCode::DuplicateSymbol, "alphabet entry repeated: \"" + bytes + "\"");
        t.symbols_.push_back({id, bytes, true});
        t.producer_.push_back(-1);
        t.max_base_len_ = std::max(t.max_base_len_, bytes.size());
    }

    // Two passes when order is unchecked: create every result symbol first so
    // out-of-order parents still resolve, then validate_properness can report
    // the violating position instead of construction failing.
    if (!check_order) {
        for (size_t i = 0; i < merges.size(); ++i) {
            const std::string result_bytes = merges[i].left + merges[i].right;
            SymbolId id = static_cast<SymbolId>(t.symbols_.size());
            if (!t.bytes_to_id_.emplace(result_bytes, id).second)
                fail(ErrorCode::DuplicateSymbol,
                     "merge " + std::to_string(i) + " re-produces \"" + result_bytes + "\"");
            t.symbols_.push_back({id, result_bytes, false});
            t.producer_.push_back(static_cast<int32_t>(i));
        }
        for (size_t i = 0; i < merges.size(); ++i) {
            auto l = t.find_symbol(merges[i].left);
            auto r = t.find_symbol(merges[i].right);
            if (!l || !r)
                fail(ErrorCode::ImproperMerge,
                     "merge " + std::to_string(i) + " has an unresolvable parent");
            int64_t rank = merges[i].origin_rank >= 0 ? merges[i].origin_rank
                                                      : static_cast<int64_t>(i);
            SymbolId result = static_cast<SymbolId>(t.alphabet_size_ + i);
            t.merges_.push_back({*l, *r, result, rank, merges[i].kind});
            if (merges[i].kind == MergeKind::Actual) ++t.actual_count_;
        }
        return t;
    }

    for (size_t i = 0; i < merges.size(); ++i) {
        auto l = t.find_symbol(merges[i].left);
        auto r = t.find_symbol(merges[i].right);
        if (!l || !r)
            fail(ErrorCode::ImproperMerge,
                 "merge " + std::to_string(i) + " (" + merges[i].left + ", " + merges[i].right +
                     ") has a parent not created at that position");
        const std::string result_bytes = merges[i].left + merges[i].right;
        SymbolId id = static_cast<SymbolId>(t.symbols_.size());
        if (!t.bytes_to_id_.emplace(result_bytes, id).second)
            fail(ErrorCode::DuplicateSymbol,
                 "merge " + std::to_string(i) + " re-produces \"" + result_bytes + "\"");
        t.symbols_.push_back({id, result_bytes, false});
        t.producer_.push_back(static_cast<int32_t>(i));
        int64_t rank = merges[i].origin_rank >= 0 ? merges[i].origin_rank
                                                  : static_cast<int64_t>(i);
        t.merges_.push_back({*l, *r, id, rank, merges[i].kind});
        if (merges[i].kind == MergeKind::Actual) ++t.actual_count_;
    }
    return t;
}

std::optional<size_t> MergeTable::validate_properness() const {
    for (size_t i = 0; i < merges_.size(); ++i) {
        const MergeRule& m = merges_[i];
        for (SymbolId parent : {m.left, m.right}) {
            const Symbol& s = symbol(parent);
            if (s.is_base) continue;
            int32_t producer = producer_[parent];
            if (producer < 0 || static_cast<size_t>(producer) >= i) return i;
        }
        if (symbol(m.result).bytes != symbol(m.left).bytes + symbol(m.right).bytes) return i;
    }
    return std::nullopt;
}

void MergeTable::set_kind(size_t position, MergeKind kind) {
    if (position >= merges_.size())
        fail(ErrorCode::OutOfRange,
             "merge position " + std::to_string(position) + " out of range (" +
                 std::to_string(merges_.size()) + " merges)");
    MergeRule& m = merges_[position];
    if (m.kind == kind) return;
    if (m.kind == MergeKind::Actual) --actual_count_;
    if (kind == MergeKind::Actual) ++actual_count_;
    m.kind = kind;
}

const Symbol& MergeTable::symbol(SymbolId id) const {
    if (id < 0 || static_cast<size_t>(id) >= symbols_.size())
        fail(ErrorCode::UnknownId, "symbol id " + std::to_string(id));
    return symbols_[static_cast<size_t>(id)];
}

const MergeRule& MergeTable::rule(size_t position) const {
    if (position >= merges_.size())
        fail(ErrorCode::OutOfRange, "merge position " + std::to_string(position));
    return merges_[position];
}

std::optional<SymbolId> MergeTable::find_symbol(std::string_view bytes) const {
    auto it = bytes_to_id_.find(std::string(bytes));
    if (it == bytes_to_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<size_t> MergeTable::producer_of(SymbolId id) const {
    const Symbol& s = symbol(id);
    if (s.is_base) return std::nullopt;
    return static_cast<size_t>(producer_[id]);
}

std::vector<SymbolId> MergeTable::expand_to_base(SymbolId id) const {
    std::vector<SymbolId> out;
    std::vector<SymbolId> stack{id};
    while (!stack.empty()) {
        SymbolId cur = stack.back();
        stack.pop_back();
        const Symbol& s = symbol(cur);
        if (s.is_base) {
            out.push_back(cur);
        } else {
            const MergeRule& m = merges_[static_cast<size_t>(producer_[cur])];
            stack.push_back(m.right);
            stack.push_back(m.left);
        }
    }
    return out;
}

}  // namespace adaptbpe
