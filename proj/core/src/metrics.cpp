#include "adaptbpe/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "adaptbpe/baselines.hpp"
#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/parallel.hpp"

namespace adaptbpe {

const std::vector<std::string> kSweepMethods = {"adaptbpe", "first_k", "first_k_pos", "top_k"};

std::string format_double(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

EvalReport compression_utility(const MergeTable& table, const WordHistogram& hist,
                               bool count_chars, unsigned workers) {
    if (hist.empty()) fail(ErrorCode::EmptyCorpus, "cannot evaluate an empty corpus");
    TokenizedCorpus corpus = tokenize_corpus(table, hist, workers);
    const uint64_t base = count_chars ? hist.total_chars : hist.total_base_symbols;
    EvalReport report;
    report.base_symbols = base;
    report.token_total = corpus.token_total;
    report.word_count = hist.total_words;
    report.cu = base == 0 ? 0.0
                          : (static_cast<double>(base) - static_cast<double>(corpus.token_total)) /
                                static_cast<double>(base);
    report.fertility = hist.total_words == 0
                           ? 0.0
                           : static_cast<double>(corpus.token_total) /
                                 static_cast<double>(hist.total_words);
    report.merge_depth = merge_depth(table);
    report.actual_count = table.actual_count();
    return report;
}

int64_t merge_depth(const MergeTable& table) {
    int64_t depth = -1;
    for (const MergeRule& m : table.rules())
        if (m.kind == MergeKind::Actual) depth = std::max(depth, m.origin_rank);
    return depth;
}

namespace {

SweepRecord run_one(const MergeTable& table, const WordHistogram& dev, const WordHistogram* test,
                    const std::string& method, uint64_t budget, const SweepOptions& options,
                    const PretokenizerSpec& pretokenizer, unsigned inner_workers) {
    auto started = std::chrono::steady_clock::now();

    SweepRecord rec;
    rec.method = method;
    rec.budget = budget;

    std::optional<MergeTable> adapted;
    if (method == "adaptbpe") {
        AdaptConfig config{budget, options.margin, options.mode, std::nullopt, inner_workers};
        AdaptationResult result = adapt(table, dev, config, pretokenizer);
        rec.dev_tokens = result.incremental_token_total;
        adapted = std::move(result.table);
    } else {
        if (method == "first_k")
            adapted = first_k(table, budget);
        else if (method == "first_k_pos")
            adapted = first_k_positive(table, dev, budget, inner_workers);
        else if (method == "top_k")
            adapted = top_k(table, dev, budget, inner_workers);
        else
            fail(ErrorCode::SchemaError, "unknown sweep method \"" + method + "\"");
        rec.dev_tokens = tokenize_corpus(*adapted, dev, inner_workers).token_total;
    }
    const WordHistogram& eval_hist = test ? *test : dev;
    EvalReport report =
        compression_utility(*adapted, eval_hist, options.count_chars, inner_workers);
    rec.test_tokens = report.token_total;
    rec.cu = report.cu;
    rec.fertility = report.fertility;
    rec.merge_depth = report.merge_depth;
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

}  // namespace

std::vector<SweepRecord> sweep(const MergeTable& table, const WordHistogram& dev,
                               const WordHistogram* test, const std::vector<uint64_t>& budgets,
                               const std::vector<std::string>& methods,
                               const SweepOptions& options,
                               const PretokenizerSpec& pretokenizer) {
    if (!std::is_sorted(budgets.begin(), budgets.end()))
        fail(ErrorCode::InvalidBudget, "budgets must be ascending");
    for (const auto& m : methods)
        if (std::find(kSweepMethods.begin(), kSweepMethods.end(), m) == kSweepMethods.end())
            fail(ErrorCode::SchemaError, "unknown sweep method \"" + m + "\"");

    struct Job {
        std::string method;
        uint64_t budget;
    };
    std::vector<Job> jobs;
    for (const auto& method : methods)
        for (uint64_t budget : budgets) jobs.push_back({method, budget});

    std::vector<SweepRecord> records(jobs.size());
    std::exception_ptr first_error;
    std::mutex error_mutex;
    unsigned outer = options.workers;
    unsigned inner = outer > 1 ? 1 : options.workers;
    parallel_for(jobs.size(), outer, [&](size_t i) {
        try {
            records[i] = run_one(table, dev, test, jobs[i].method, jobs[i].budget, options,
                                 pretokenizer, inner);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);

    // Prefix truncation provably never lengthens any word as the budget grows.
    const SweepRecord* prev = nullptr;
    for (const auto& rec : records) {
        if (rec.method != "first_k") continue;
        if (prev && rec.dev_tokens > prev->dev_tokens)
            throw std::logic_error("first_k dev totals increased with budget");
        prev = &rec;
    }
    prev = nullptr;
    for (const auto& rec : records) {
        if (rec.method != "adaptbpe") continue;
        if (prev && (rec.dev_tokens > prev->dev_tokens || rec.test_tokens > prev->test_tokens))
            std::cerr << "note: adaptbpe corpus size increased between budgets "
                      << prev->budget << " and " << rec.budget << "\n";
        prev = &rec;
    }
    return records;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << "method,budget,dev_tokens,test_tokens,cu,fertility,merge_depth,seconds\n";
    for (const auto& r : records) {
        out << r.method << ',' << r.budget << ',' << r.dev_tokens << ',' << r.test_tokens << ','
            << format_double(r.cu, 6) << ',' << format_double(r.fertility, 6) << ','
            << r.merge_depth << ',' << format_double(r.seconds, 3) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const std::vector<SwapRecord>& trace) {
    out << "step,demoted_rank,demoted_freq,promoted_rank,promoted_freq,incremental_tokens\n";
    for (const auto& r : trace) {
        out << r.step << ',' << r.demoted_rank << ',' << r.demoted_freq << ',' << r.promoted_rank
            << ',' << r.promoted_freq << ',' << r.incremental_tokens << '\n';
    }
}

}  // namespace adaptbpe
