#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adaptbpe/adaptation.hpp"
#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace adaptbpe {

struct EvalReport {
    double cu;             // (base_symbols - token_total) / base_symbols
    double fertility;      // token_total / word_count
    uint64_t base_symbols;
    uint64_t token_total;
    uint64_t word_count;
    int64_t merge_depth;
    uint64_t actual_count;
};

// Canonical two-phase evaluation of a table on a corpus. With count_chars the
// denominator is Unicode scalars of the source text instead of base units.
EvalReport compression_utility(const MergeTable& table, const WordHistogram& hist,
                               bool count_chars = false, unsigned workers = 1);

// Max origin rank among actual rules; -1 when there are none.
int64_t merge_depth(const MergeTable& table);

struct SweepRecord {
    std::string method;
    uint64_t budget;
    uint64_t dev_tokens;   // incremental loop total for adaptbpe, canonical otherwise
    uint64_t test_tokens;  // canonical on the test corpus (dev corpus when absent)
    double cu;
    double fertility;
    int64_t merge_depth;
    double seconds;
};

struct SweepOptions {
    double margin = 0.0;
    AdaptMode mode = AdaptMode::Fast;
    bool count_chars = false;
    unsigned workers = 1;
};

extern const std::vector<std::string> kSweepMethods;  // adaptbpe, first_k, first_k_pos, top_k

// One record per (method, budget), budgets ascending. Records are computed in
// parallel and assembled in order; cu/fertility/merge_depth are evaluated on
// the test corpus when given, the dev corpus otherwise. First_k dev totals
// are checked monotone non-increasing; adaptbpe violations of the expected
// monotone shape are reported on stderr, never asserted.
std::vector<SweepRecord> sweep(const MergeTable& table, const WordHistogram& dev,
                               const WordHistogram* test, const std::vector<uint64_t>& budgets,
                               const std::vector<std::string>& methods,
                               const SweepOptions& options,
                               const PretokenizerSpec& pretokenizer);

// Header: method,budget,dev_tokens,test_tokens,cu,fertility,merge_depth,seconds
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

void write_trace_csv(std::ostream& out, const std::vector<SwapRecord>& trace);

std::string format_double(double value, int digits);

}  // namespace adaptbpe
