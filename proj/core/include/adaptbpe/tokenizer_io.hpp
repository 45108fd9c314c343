#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/pretokenize.hpp"

namespace adaptbpe {

// A standard BPE tokenizer description: vocab map plus ordered merges, with
// the original ids retained for mask export.
struct LoadedTokenizer {
    MergeTable table;
    PretokenizerSpec pretokenizer;
    std::unordered_map<std::string, int64_t> vocab;  // token string -> original id
    std::vector<int64_t> special_ids;                // added tokens marked special
    std::string digest;                              // sha256 of the source file
    int64_t vocab_id_bound = 0;                      // max id + 1
};

// Reads a BPE-model tokenizer file (vocab map + ordered merges, merge entries
// either "left right" strings or two-element arrays). The pre-tokenizer is
// taken from the file when recognized; anything else falls back to byte-level
// with the gpt2 pattern and a warning on stderr. `override` skips detection.
LoadedTokenizer load_pretrained(const std::string& path,
                                std::optional<PretokenizerSpec> override = std::nullopt);

struct AdaptedProvenance {
    std::string source_digest;
    uint64_t budget = 0;
    std::string margin = "0";  // serialized as a string: the format carries no floats
    std::string mode = "fast";
    uint64_t swap_count = 0;
    std::string tool_version;
};

// The .adaptbpe.json interchange format. Standard merge lists cannot express
// the unapply phase, so this is its own schema: the base alphabet descriptor,
// the active merge records in application order with kind and origin rank,
// the pre-tokenizer, and provenance. Serialization is canonical; writing what
// load_adapted read reproduces the file byte for byte.
void save_adapted(const std::string& path, const MergeTable& table, const PretokenizerSpec& spec,
                  const AdaptedProvenance& provenance);

struct LoadedAdapted {
    MergeTable table;
    PretokenizerSpec pretokenizer;
    AdaptedProvenance provenance;
};

LoadedAdapted load_adapted(const std::string& path);

bool is_adapted_file(const std::string& path);

// Allowed-token-id mask over the source vocabulary: base symbol ids plus
// actual result ids plus pass-through special ids, sorted.
// {"source_digest": hex, "allowed_ids": [...], "count": n}
void export_mask(const std::string& path, const MergeTable& adapted,
                 const LoadedTokenizer& source);

std::vector<int64_t> mask_ids(const MergeTable& adapted, const LoadedTokenizer& source);

struct CompatReport {
    bool lossless;
    uint64_t checked_words;
    std::vector<std::string> diverging_words;  // sorted
};

// Best-effort plain ordered-merges export. Actual rules whose parents cannot
// be formed without a virtual rule are dropped (they could never fire in
// plain application). The report lists every word of `hist` whose plain
// tokenization differs from the canonical two-phase output.
CompatReport export_compat(const std::string& tokenizer_path, const std::string& report_path,
                           const MergeTable& adapted, const LoadedTokenizer& source,
                           const WordHistogram& hist);

}  // namespace adaptbpe
