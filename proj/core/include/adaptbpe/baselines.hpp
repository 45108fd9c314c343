#pragma once

#include <cstdint>

#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace adaptbpe {

// Comparison tokenizers under the same merge budget. All pure functions; the
// returned tables pass properness validation and keep origin ranks.

// Plain truncation: the first n merges, all actual; the rest dropped.
MergeTable first_k(const MergeTable& table, uint64_t n);

// Truncation with data-aware filtering: scan merges in rank order over an
// incrementally tokenized corpus; a merge that fires at least once becomes
// actual (consuming budget), one that never fires becomes virtual for free.
// Stops after n actual merges. Throws InsufficientLiveMerges when fewer than
// n merges ever fire.
MergeTable first_k_positive(const MergeTable& table, const WordHistogram& hist, uint64_t n,
                            unsigned workers = 1);

// Full tokenization, then selective unmerging: rank merge-result tokens by
// surface frequency on the corpus (ties toward lower origin rank); the top-n
// tokens' producing rules stay actual and every other rule turns virtual, so
// two-phase tokenization recursively unwinds the rest. Output vocabulary is a
// subset of top-n tokens plus the base alphabet.
MergeTable top_k(const MergeTable& table, const WordHistogram& hist, uint64_t n,
                 unsigned workers = 1);

}  // namespace adaptbpe
