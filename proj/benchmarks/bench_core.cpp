#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "adaptbpe/adaptation.hpp"
#include "adaptbpe/baselines.hpp"
#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace {

using namespace adaptbpe;

const std::vector<std::string>& bench_words() {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> out;
        std::mt19937_64 rng(99);
        const char* onsets[] = {"b", "ch", "d", "fr", "g", "k", "l", "m", "n", "pr",
                                "r", "s", "st", "t", "th", "v", "w"};
        const char* vowels[] = {"a", "e", "i", "o", "u", "ea", "ou"};
        const char* codas[] = {"", "d", "l", "n", "nd", "nt", "r", "s", "st", "t"};
        for (int i = 0; i < 4000; ++i) {
            std::string w;
            int syll = 1 + static_cast<int>(rng() % 3);
            for (int s = 0; s < syll; ++s)
                w += std::string(onsets[rng() % 17]) + vowels[rng() % 7] + codas[rng() % 10];
            out.push_back(w);
        }
        return out;
    }();
    return words;
}

MergeTable bench_table(size_t max_merges) {
    const auto units = byte_level_alphabet();
    std::vector<std::pair<std::string, std::string>> merges;
    std::set<std::string> produced(units.begin(), units.end());
    auto chain = [&](const std::string& surface) {
        std::string left;
        for (unsigned char b : surface) {
            const std::string& unit = units[b];
            if (left.empty()) {
                left = unit;
                continue;
            }
            if (merges.size() >= max_merges) return;
            std::string result = left + unit;
            if (produced.insert(result).second) merges.emplace_back(left, unit);
            left = result;
        }
    };
    for (const auto& w : bench_words()) {
        chain(remap_bytes(w));
        chain(remap_bytes(" " + w));
        if (merges.size() >= max_merges) break;
    }
    return MergeTable::build(units, merges);
}

std::vector<std::string> bench_texts(size_t target_bytes) {
    std::mt19937_64 rng(7);
    const auto& words = bench_words();
    std::vector<std::string> lines;
    size_t total = 0;
    while (total < target_bytes) {
        std::string line;
        for (int i = 0; i < 12; ++i) {
            if (!line.empty()) line += ' ';
            line += words[(rng() % words.size()) * (rng() % words.size()) % words.size()];
        }
        line += ".\n";
        total += line.size();
        lines.push_back(std::move(line));
    }
    return lines;
}

void BM_Pretokenize(benchmark::State& state) {
    auto texts = bench_texts(1 << 18);
    auto spec = PretokenizerSpec::byte_level();
    for (auto _ : state) {
        size_t chunks = 0;
        for (const auto& t : texts) chunks += pretokenize(t, spec).size();
        benchmark::DoNotOptimize(chunks);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * (1 << 18));
}
BENCHMARK(BM_Pretokenize);

void BM_BuildHistogram(benchmark::State& state) {
    auto texts = bench_texts(1 << 18);
    auto spec = PretokenizerSpec::byte_level();
    for (auto _ : state) {
        WordHistogram h = build_histogram(texts, spec);
        benchmark::DoNotOptimize(h.total_base_symbols);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * (1 << 18));
}
BENCHMARK(BM_BuildHistogram);

void BM_TokenizeCorpus(benchmark::State& state) {
    MergeTable table = bench_table(static_cast<size_t>(state.range(0)));
    WordHistogram hist = build_histogram(bench_texts(1 << 19), PretokenizerSpec::byte_level());
    for (auto _ : state) {
        TokenizedCorpus corpus = tokenize_corpus(table, hist);
        benchmark::DoNotOptimize(corpus.token_total);
    }
    state.counters["unique_words"] = static_cast<double>(hist.entries.size());
}
BENCHMARK(BM_TokenizeCorpus)->Arg(2000)->Arg(10000);

void BM_Adapt(benchmark::State& state) {
    MergeTable table = bench_table(10000);
    WordHistogram hist = build_histogram(bench_texts(1 << 19), PretokenizerSpec::byte_level());
    const auto budget = static_cast<uint64_t>(state.range(0));
    for (auto _ : state) {
        AdaptConfig config{budget, 0.0, AdaptMode::Fast, std::nullopt, 1};
        AdaptationResult r = adapt(table, hist, config, PretokenizerSpec::byte_level());
        benchmark::DoNotOptimize(r.incremental_token_total);
    }
    state.counters["merges"] = static_cast<double>(table.merge_count());
}
BENCHMARK(BM_Adapt)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
