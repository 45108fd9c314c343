#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "adaptbpe/merge_model.hpp"
#include "support.hpp"

using namespace adaptbpe;
using testsupport::fixture_table;
using testsupport::random_proper_table;

TEST_CASE("fixture table builds with five actual merges") {
    MergeTable t = fixture_table();
    CHECK(t.merge_count() == 5);
    CHECK(t.actual_count() == 5);
    CHECK(t.alphabet_size() == 4);
    CHECK(!t.validate_properness().has_value());
    CHECK(t.symbol(*t.find_symbol("abcd")).bytes == "abcd");
}

TEST_CASE("empty merge list is proper") {
    MergeTable t = MergeTable::build({"a"}, std::vector<std::pair<std::string, std::string>>{});
    CHECK(t.merge_count() == 0);
    CHECK(t.symbol_count() == 1);
    CHECK(!t.validate_properness().has_value());
}

TEST_CASE("unresolvable parent is rejected at its position") {
    try {
        MergeTable::build({"a", "b"}, {{std::string("ab"), std::string("a")}});
        FAIL("expected ImproperMerge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImproperMerge);
        CHECK(std::string(e.what()).find("merge 0") != std::string::npos);
    }
}

TEST_CASE("two rules producing the same bytes are rejected") {
    try {
        MergeTable::build({"a", "b"}, {{"a", "b"}, {"a", "b"}});
        FAIL("expected DuplicateSymbol");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateSymbol);
    }
}

TEST_CASE("validate_properness flags the first out-of-order rule") {
    // (ab,c) listed before (a,b): the parent's producer comes later.
    MergeTable t = MergeTable::build_unchecked(
        {"a", "b", "c"}, {{"ab", "c", MergeKind::Actual, -1}, {"a", "b", MergeKind::Actual, -1}});
    auto bad = t.validate_properness();
    REQUIRE(bad.has_value());
    CHECK(*bad == 0);
}

TEST_CASE("every prefix of a proper table is proper") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        MergeTable t = random_proper_table(rng);
        std::vector<RawMerge> raw;
        for (const MergeRule& m : t.rules())
            raw.push_back({t.symbol(m.left).bytes, t.symbol(m.right).bytes, m.kind, -1});
        std::vector<std::string> alphabet;
        for (size_t i = 0; i < t.alphabet_size(); ++i)
            alphabet.push_back(t.symbol(static_cast<SymbolId>(i)).bytes);
        for (size_t k = 0; k <= raw.size(); ++k) {
            std::vector<RawMerge> prefix(raw.begin(), raw.begin() + k);
            MergeTable p = MergeTable::build_unchecked(alphabet, prefix);
            CHECK(!p.validate_properness().has_value());
        }
    }
}

TEST_CASE("swapping a producer after its consumer is caught at the consumer") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int iter = 0; iter < 300 && checked < 60; ++iter) {
        MergeTable t = random_proper_table(rng, 4, 12);
        if (t.merge_count() < 2) continue;
        // Find a (producer i, consumer j) pair.
        for (size_t j = 0; j < t.merge_count(); ++j) {
            const MergeRule& m = t.rule(j);
            std::optional<size_t> pi;
            for (SymbolId parent : {m.left, m.right}) {
                auto producer = t.producer_of(parent);
                if (producer) pi = *producer;
            }
            if (!pi) continue;
            std::vector<RawMerge> raw;
            for (const MergeRule& r : t.rules())
                raw.push_back({t.symbol(r.left).bytes, t.symbol(r.right).bytes, r.kind, -1});
            std::swap(raw[*pi], raw[j]);
            std::vector<std::string> alphabet;
            for (size_t a = 0; a < t.alphabet_size(); ++a)
                alphabet.push_back(t.symbol(static_cast<SymbolId>(a)).bytes);
            MergeTable corrupted = MergeTable::build_unchecked(alphabet, raw);
            auto bad = corrupted.validate_properness();
            REQUIRE(bad.has_value());
            CHECK(*bad == *pi);  // the consumer now sits at the producer's old position
            ++checked;
            break;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("set_kind adjusts actual_count and never reorders") {
    MergeTable t = fixture_table();
    t.set_kind(1, MergeKind::Virtual);
    CHECK(t.actual_count() == 4);
    CHECK(t.rule(1).kind == MergeKind::Virtual);
    t.set_kind(1, MergeKind::Virtual);  // no-op
    CHECK(t.actual_count() == 4);
    CHECK_THROWS_AS(t.set_kind(7, MergeKind::Virtual), Error);
    CHECK(!t.validate_properness().has_value());

    std::mt19937_64 rng(3);
    size_t expected = 4;
    for (int i = 0; i < 200; ++i) {
        size_t pos = rng() % t.merge_count();
        MergeKind kind = rng() % 2 == 0 ? MergeKind::Actual : MergeKind::Virtual;
        bool was_actual = t.rule(pos).kind == MergeKind::Actual;
        t.set_kind(pos, kind);
        if (was_actual && kind == MergeKind::Virtual) --expected;
        if (!was_actual && kind == MergeKind::Actual) ++expected;
        CHECK(t.actual_count() == expected);
    }
}

TEST_CASE("symbols decompose to their exact bytes") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 100; ++iter) {
        MergeTable t = random_proper_table(rng);
        for (size_t id = 0; id < t.symbol_count(); ++id) {
            std::string rebuilt;
            for (SymbolId base : t.expand_to_base(static_cast<SymbolId>(id)))
                rebuilt += t.symbol(base).bytes;
            CHECK(rebuilt == t.symbol(static_cast<SymbolId>(id)).bytes);
        }
    }
}
