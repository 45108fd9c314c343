#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/baselines.hpp"
#include "support.hpp"

using namespace adaptbpe;
using testsupport::fixture_histogram;
using testsupport::fixture_table;
using testsupport::token_strings;

namespace {

MergeTable mixed_kind_table() {
    // (a,b) actual, (ab,c) virtual, (c,d) actual
    return MergeTable::build_rules({"a", "b", "c", "d"},
                                   std::vector<RawMerge>{{"a", "b", MergeKind::Actual, -1},
                                                   {"ab", "c", MergeKind::Virtual, -1},
                                                   {"c", "d", MergeKind::Actual, -1}});
}

}  // namespace

TEST_CASE("full fixture table collapses abcd") {
    MergeTable t = fixture_table();
    CHECK(token_strings(t, tokenize_word(t, "abcd").tokens) == std::vector<std::string>{"abcd"});
}

TEST_CASE("virtual merge fires and then unwinds") {
    // Apply gives abc,d; (c,d) is blocked by the earlier merge; the backwards
    // pass splits the virtual abc while ab stays merged.
    MergeTable t = mixed_kind_table();
    CHECK(token_strings(t, tokenize_word(t, "abcd").tokens) ==
          std::vector<std::string>{"ab", "c", "d"});
}

TEST_CASE("no bigram matches") {
    MergeTable t = fixture_table();
    CHECK(token_strings(t, tokenize_word(t, "dcba").tokens) ==
          std::vector<std::string>{"d", "c", "b", "a"});
}

TEST_CASE("empty word") {
    CHECK(tokenize_word(fixture_table(), "").tokens.empty());
}

TEST_CASE("unknown byte is rejected") {
    try {
        tokenize_word(fixture_table(), "abx");
        FAIL("expected UnknownByte");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownByte);
    }
}

TEST_CASE("corpus tokenization with the first two merges") {
    MergeTable prefix = first_k(fixture_table(), 2);
    TokenizedCorpus corpus = tokenize_corpus(prefix, fixture_histogram());
    CHECK(corpus.token_total == 20);
    CHECK(corpus.recount() == 20);

    WordHistogram empty;
    CHECK(tokenize_corpus(prefix, empty).token_total == 0);

    MergeTable base_only = first_k(fixture_table(), 0);
    CHECK(tokenize_corpus(base_only, fixture_histogram()).token_total == 30);
}

TEST_CASE("corpus tokenization is independent of worker count") {
    MergeTable t = fixture_table();
    WordHistogram h = fixture_histogram();
    TokenizedCorpus one = tokenize_corpus(t, h, 1);
    TokenizedCorpus four = tokenize_corpus(t, h, 4);
    REQUIRE(one.words.size() == four.words.size());
    for (size_t i = 0; i < one.words.size(); ++i) {
        CHECK(one.words[i].word == four.words[i].word);
        CHECK(one.words[i].tokens == four.words[i].tokens);
    }
}

TEST_CASE("apply_one merges across the weighted corpus") {
    MergeTable t = fixture_table();
    // State after unapplying (ab,c): abcd -> [ab,c,d] x2, cd -> [c,d] x5.
    TokenizedCorpus corpus;
    SymbolId a = *t.find_symbol("a"), b = *t.find_symbol("b");
    SymbolId c = *t.find_symbol("c"), d = *t.find_symbol("d");
    SymbolId ab = *t.find_symbol("ab");
    corpus.words.push_back({"abcd", {ab, c, d}, 2});
    corpus.words.push_back({"cd", {c, d}, 5});
    corpus.token_total = corpus.recount();
    CHECK(corpus.token_total == 16);

    uint64_t applications = apply_one(t.rule(2), corpus);  // (c,d)
    CHECK(applications == 7);
    CHECK(corpus.token_total == 9);
    CHECK(corpus.token_total == corpus.recount());
    CHECK(token_strings(t, corpus.words[0].tokens) == std::vector<std::string>{"ab", "cd"});
    CHECK(token_strings(t, corpus.words[1].tokens) == std::vector<std::string>{"cd"});

    // A rule whose pair is absent changes nothing.
    uint64_t none = apply_one(t.rule(4), corpus);  // (abc,d)
    CHECK(none == 0);
    CHECK(corpus.token_total == 9);

    (void)a;
    (void)b;
}

TEST_CASE("repeated-symbol merges are leftmost non-overlapping") {
    MergeTable t = MergeTable::build({"a"}, {{std::string("a"), std::string("a")}});
    TokenizedCorpus corpus;
    SymbolId a = *t.find_symbol("a");
    corpus.words.push_back({"aaa", {a, a, a}, 1});
    corpus.token_total = 3;
    uint64_t applications = apply_one(t.rule(0), corpus);
    CHECK(applications == 1);
    CHECK(token_strings(t, corpus.words[0].tokens) == std::vector<std::string>{"aa", "a"});
}

TEST_CASE("unapply_one splits surviving results") {
    MergeTable t = fixture_table();
    TokenizedCorpus corpus;
    SymbolId abc = *t.find_symbol("abc"), d = *t.find_symbol("d");
    corpus.words.push_back({"abcd", {abc, d}, 2});
    corpus.token_total = 4;

    uint64_t splits = unapply_one(t.rule(1), corpus);  // (ab,c)
    CHECK(splits == 2);
    CHECK(corpus.token_total == 6);
    CHECK(token_strings(t, corpus.words[0].tokens) == std::vector<std::string>{"ab", "c", "d"});

    uint64_t none = unapply_one(t.rule(3), corpus);  // abab absent
    CHECK(none == 0);
    CHECK(corpus.token_total == 6);
}

TEST_CASE("unapply then apply restores a prefix-tokenized corpus") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 200; ++iter) {
        MergeTable t = testsupport::random_proper_table(rng, 4, 12);
        if (t.merge_count() == 0) continue;
        WordHistogram h = testsupport::random_histogram(rng, t);
        size_t pos = rng() % t.merge_count();
        TokenizedCorpus corpus = tokenize_corpus(first_k(t, pos + 1), h);
        TokenizedCorpus snapshot = corpus;

        uint64_t splits = unapply_one(t.rule(pos), corpus);
        uint64_t applications = apply_one(t.rule(pos), corpus);
        CHECK(applications == splits);
        REQUIRE(corpus.words.size() == snapshot.words.size());
        for (size_t i = 0; i < corpus.words.size(); ++i)
            CHECK(corpus.words[i].tokens == snapshot.words[i].tokens);
        CHECK(corpus.token_total == snapshot.token_total);
    }
}

TEST_CASE("detokenize inverts tokenization") {
    MergeTable t = fixture_table();
    auto spec = PretokenizerSpec::whitespace();
    CHECK(detokenize(tokenize_word(t, "abcd").tokens, t, spec) == "abcd");
    CHECK(detokenize({}, t, spec).empty());
    CHECK_THROWS_AS(detokenize({SymbolId{99}}, t, spec), Error);
}

TEST_CASE("byte-level detokenize round trips arbitrary bytes") {
    std::mt19937_64 rng(29);
    std::vector<std::pair<std::string, std::string>> merges;
    const auto units = byte_level_alphabet();
    // A few real merges so tokens are non-trivial.
    merges.emplace_back(units['h'], units['e']);
    merges.emplace_back(units['h'] + units['e'], units['l']);
    merges.emplace_back(units['l'], units['l']);
    MergeTable t = MergeTable::build(units, merges);
    auto spec = PretokenizerSpec::byte_level();

    for (int iter = 0; iter < 2000; ++iter) {
        std::string raw = testsupport::random_bytes(rng, 50);
        std::string rebuilt;
        for (const auto& word : pretokenize(raw, spec))
            rebuilt += detokenize(tokenize_word(t, word).tokens, t, spec);
        CHECK(rebuilt == raw);
    }
}

TEST_CASE("token bytes always concatenate to the word") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 300; ++iter) {
        MergeTable t = testsupport::random_proper_table(rng, 6, 20, /*random_kinds=*/true);
        std::string word = testsupport::random_word(rng, t, 30);
        std::string rebuilt;
        for (SymbolId id : tokenize_word(t, word).tokens) rebuilt += t.symbol(id).bytes;
        CHECK(rebuilt == word);
    }
}

TEST_CASE("canonical tokenizer matches the naive reference") {
    MergeTable fixture = fixture_table();
    for (const char* word : {"abcd", "abab", "cd", "dcba", "", "aabbccdd", "abcabcd"}) {
        CHECK(tokenize_word(fixture, word).tokens == reference_tokenize(fixture, word).tokens);
    }
    MergeTable mixed = mixed_kind_table();
    CHECK(tokenize_word(mixed, "abcd").tokens == reference_tokenize(mixed, "abcd").tokens);

    std::mt19937_64 rng(37);
    for (int iter = 0; iter < 1000; ++iter) {
        MergeTable t = testsupport::random_proper_table(rng, 6, 20, /*random_kinds=*/true);
        std::string word = testsupport::random_word(rng, t, 30);
        CHECK(tokenize_word(t, word).tokens == reference_tokenize(t, word).tokens);
    }
}

TEST_CASE("token_total stays consistent under random apply and unapply") {
    std::mt19937_64 rng(43);
    for (int iter = 0; iter < 100; ++iter) {
        MergeTable t = testsupport::random_proper_table(rng, 5, 15);
        if (t.merge_count() == 0) continue;
        WordHistogram h = testsupport::random_histogram(rng, t);
        TokenizedCorpus corpus = tokenize_corpus(t, h);
        for (int step = 0; step < 20; ++step) {
            const MergeRule& rule = t.rule(rng() % t.merge_count());
            if (rng() % 2 == 0)
                apply_one(rule, corpus);
            else
                unapply_one(rule, corpus);
            CHECK(corpus.token_total == corpus.recount());
        }
    }
}
