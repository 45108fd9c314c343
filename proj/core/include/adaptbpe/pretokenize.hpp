#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adaptbpe/error.hpp"

namespace adaptbpe {

enum class Scheme : uint8_t { ByteLevel, Whitespace, Identity };

// Merges never cross pre-token boundaries; this describes how boundaries are
// drawn. ByteLevel splits with the named pattern, then remaps every byte of a
// chunk to one unit of the 256-symbol printable alphabet (so pre-tokens are
// strings over that alphabet, e.g. "Ġworld"). Whitespace drops separators and
// is lossy; Identity keeps the text whole. Only the "gpt2" pattern is built in.
struct PretokenizerSpec {
    Scheme scheme = Scheme::ByteLevel;
    std::string pattern = "gpt2";
    bool add_prefix_space = false;

    static PretokenizerSpec byte_level(bool add_prefix_space = false) {
        return {Scheme::ByteLevel, "gpt2", add_prefix_space};
    }
    static PretokenizerSpec whitespace() { return {Scheme::Whitespace, "", false}; }
    static PretokenizerSpec identity() { return {Scheme::Identity, "", false}; }

    bool operator==(const PretokenizerSpec&) const = default;
};

// Byte -> printable unit (UTF-8 encoded codepoint), bijective over all 256 bytes.
const std::array<std::string, 256>& byte_unit_table();

// The 256 unit strings in byte order; the base alphabet of byte-level tables.
std::vector<std::string> byte_level_alphabet();

std::string remap_bytes(std::string_view raw);

// Inverse of remap_bytes. Throws UnknownToken on a codepoint outside the unit set.
std::string unremap_units(std::string_view mapped);

// Unicode scalar count under lenient UTF-8 decoding (each invalid byte counts as one).
uint64_t count_scalars(std::string_view text);

// Splits arbitrary bytes into pre-tokens. For ByteLevel the concatenated
// pre-tokens, after unremap_units, reproduce the input exactly (when
// add_prefix_space is off).
std::vector<std::string> pretokenize(std::string_view text, const PretokenizerSpec& spec);

// Canonical weighted corpus representation: unique pre-token -> count.
struct WordHistogram {
    std::unordered_map<std::string, uint64_t> entries;
    uint64_t total_base_symbols = 0;  // pre-token length in base units, weighted
    uint64_t total_words = 0;         // weighted pre-token count
    uint64_t total_chars = 0;         // Unicode scalars of the source text, weighted

    bool empty() const { return entries.empty(); }
};

WordHistogram build_histogram(const std::vector<std::string>& texts,
                              const PretokenizerSpec& spec);

// Reads files (or directories, recursively) as bytes. Each line, including its
// trailing newline, is one pre-tokenization context. Shards across `workers`
// threads and reduces with merge_histograms.
WordHistogram build_histogram_from_files(const std::vector<std::string>& paths,
                                         const PretokenizerSpec& spec, unsigned workers = 1);

// Pointwise count addition; associative and commutative.
WordHistogram merge_histograms(const WordHistogram& a, const WordHistogram& b);

// Length of one pre-token in base units under the given scheme.
uint64_t base_unit_length(std::string_view word, const PretokenizerSpec& spec);

}  // namespace adaptbpe
