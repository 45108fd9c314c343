#include "adaptbpe/pretokenize.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "adaptbpe/parallel.hpp"

namespace adaptbpe {

namespace {

#include "unicode_ranges.inc"

bool in_ranges(uint32_t cp, const uint32_t ranges[][2], size_t count) {
    size_t lo = 0, hi = count;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cp > ranges[mid][1])
            lo = mid + 1;
        else if (cp < ranges[mid][0])
            hi = mid;
        else
            return true;
    }
    return false;
}

// Sentinel codepoints >= 0x110000 stand for invalid UTF-8 bytes; they classify
// as "other" and never as space/letter/number.
bool is_letter(uint32_t cp) { return cp < 0x110000 && in_ranges(cp, kLetterRanges, kLetterRanges_count); }
bool is_number(uint32_t cp) { return cp < 0x110000 && in_ranges(cp, kNumberRanges, kNumberRanges_count); }
bool is_space(uint32_t cp) { return cp < 0x110000 && in_ranges(cp, kSpaceRanges, kSpaceRanges_count); }

std::string encode_utf8(uint32_t cp) {
    std::string out;
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return out;
}

struct Decoded {
    uint32_t cp;
    size_t len;
};

// Lenient: every invalid byte decodes to a one-byte sentinel, so arbitrary
// byte strings round-trip (classification of the sentinel is "other").
Decoded decode_utf8(std::string_view s, size_t pos) {
    const auto b = [&](size_t i) { return static_cast<uint8_t>(s[i]); };
    uint8_t c0 = b(pos);
    auto sentinel = [&] { return Decoded{0x110000u + c0, 1}; };
    if (c0 < 0x80) return {c0, 1};
    auto cont = [&](size_t i) { return i < s.size() && (b(i) & 0xC0) == 0x80; };
    if ((c0 >> 5) == 0x6) {
        if (!cont(pos + 1)) return sentinel();
        uint32_t cp = (uint32_t(c0 & 0x1F) << 6) | (b(pos + 1) & 0x3F);
        if (cp < 0x80) return sentinel();
        return {cp, 2};
    }
    if ((c0 >> 4) == 0xE) {
        if (!cont(pos + 1) || !cont(pos + 2)) return sentinel();
        uint32_t cp = (uint32_t(c0 & 0x0F) << 12) | (uint32_t(b(pos + 1) & 0x3F) << 6) |
                      (b(pos + 2) & 0x3F);
        if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return sentinel();
        return {cp, 3};
    }
    if ((c0 >> 3) == 0x1E) {
        if (!cont(pos + 1) || !cont(pos + 2) || !cont(pos + 3)) return sentinel();
        uint32_t cp = (uint32_t(c0 & 0x07) << 18) | (uint32_t(b(pos + 1) & 0x3F) << 12) |
                      (uint32_t(b(pos + 2) & 0x3F) << 6) | (b(pos + 3) & 0x3F);
        if (cp < 0x10000 || cp > 0x10FFFF) return sentinel();
        return {cp, 4};
    }
    return sentinel();
}

// The byte-level split pattern:
//   '(?:[sdmt]|ll|ve|re) |  ?\p{L}+ |  ?\p{N}+ |  ?[^\s\p{L}\p{N}]+ | \s+(?!\S) | \s+
// Alternatives are tried in order at each position, as a backtracking regex would.
size_t next_chunk_end(std::string_view text, size_t pos) {
    const size_t len = text.size();
    Decoded first = decode_utf8(text, pos);

    if (text[pos] == '\'' && pos + 1 < len) {
        char c1 = text[pos + 1];
        if (c1 == 's' || c1 == 'd' || c1 == 'm' || c1 == 't') return pos + 2;
        if (pos + 2 < len) {
            char c2 = text[pos + 2];
            if ((c1 == 'l' && c2 == 'l') || (c1 == 'v' && c2 == 'e') || (c1 == 'r' && c2 == 'e'))
                return pos + 3;
        }
    }

    auto run_of = [&](size_t start, bool (*pred)(uint32_t)) {
        size_t p = start;
        while (p < len) {
            Decoded d = decode_utf8(text, p);
            if (!pred(d.cp)) break;
            p += d.len;
        }
        return p;
    };
    auto is_other = [](uint32_t cp) { return !is_space(cp) && !is_letter(cp) && !is_number(cp); };

    size_t after_space = pos + (text[pos] == ' ' ? 1 : 0);
    if (after_space < len) {
        Decoded d = decode_utf8(text, after_space);
        if (is_letter(d.cp)) return run_of(after_space, is_letter);
        if (is_number(d.cp)) return run_of(after_space, is_number);
        if (is_other(d.cp)) return run_of(after_space, is_other);
    }

    if (is_space(first.cp)) {
        size_t ws_end = pos;
        size_t last_start = pos;
        while (ws_end < len) {
            Decoded d = decode_utf8(text, ws_end);
            if (!is_space(d.cp)) break;
            last_start = ws_end;
            ws_end += d.len;
        }
        if (ws_end >= len) return ws_end;          // \s+(?!\S) to end of text
        if (last_start > pos) return last_start;   // leave the final space for the next chunk
        return ws_end;                             // single space char before \S
    }

    return pos + first.len;  // unreachable for total classifications; keep progress
}

std::vector<std::string> split_gpt2(std::string_view text) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = next_chunk_end(text, pos);
        out.emplace_back(remap_bytes(text.substr(pos, end - pos)));
        pos = end;
    }
    return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        size_t start = i;
        while (i < text.size() && !is_ws(text[i])) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

const std::unordered_map<uint32_t, uint8_t>& unit_to_byte_map() {
    static const std::unordered_map<uint32_t, uint8_t> map = [] {
        std::unordered_map<uint32_t, uint8_t> m;
        int extra = 0;
        for (int b = 0; b < 256; ++b) {
            bool visible = (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || (b >= 174 && b <= 255);
            uint32_t cp = visible ? static_cast<uint32_t>(b) : static_cast<uint32_t>(256 + extra++);
            m.emplace(cp, static_cast<uint8_t>(b));
        }
        return m;
    }();
    return map;
}

void add_word(WordHistogram& h, const std::string& word, const PretokenizerSpec& spec) {
    h.entries[word] += 1;
    h.total_base_symbols += base_unit_length(word, spec);
    h.total_words += 1;
    if (spec.scheme == Scheme::ByteLevel)
        h.total_chars += count_scalars(unremap_units(word));
    else
        h.total_chars += count_scalars(word);
}

void accumulate_text(WordHistogram& h, std::string_view text, const PretokenizerSpec& spec) {
    for (const std::string& w : pretokenize(text, spec)) add_word(h, w, spec);
}

void list_files(const std::string& path, std::vector<std::string>& out) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        for (const auto& entry : fs::recursive_directory_iterator(path, ec)) {
            if (entry.is_regular_file()) out.push_back(entry.path().string());
        }
        if (ec) fail(ErrorCode::IoError, "cannot walk directory " + path + ": " + ec.message());
    } else if (fs::is_regular_file(path, ec)) {
        out.push_back(path);
    } else {
        fail(ErrorCode::IoError, "no such file or directory: " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::IoError, "read failure on " + path);
    return data;
}

}  // namespace

const std::array<std::string, 256>& byte_unit_table() {
    static const std::array<std::string, 256> table = [] {
        std::array<std::string, 256> t;
        int extra = 0;
        for (int b = 0; b < 256; ++b) {
            bool visible = (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || (b >= 174 && b <= 255);
            uint32_t cp = visible ? static_cast<uint32_t>(b) : static_cast<uint32_t>(256 + extra++);
            t[static_cast<size_t>(b)] = encode_utf8(cp);
        }
        return t;
    }();
    return table;
}

std::vector<std::string> byte_level_alphabet() {
    const auto& t = byte_unit_table();
    return {t.begin(), t.end()};
}

std::string remap_bytes(std::string_view raw) {
    const auto& table = byte_unit_table();
    std::string out;
    out.reserve(raw.size() * 2);
    for (unsigned char b : raw) out += table[b];
    return out;
}

std::string unremap_units(std::string_view mapped) {
    const auto& inv = unit_to_byte_map();
    std::string out;
    out.reserve(mapped.size());
    size_t pos = 0;
    while (pos < mapped.size()) {
        Decoded d = decode_utf8(mapped, pos);
        auto it = inv.find(d.cp);
        if (it == inv.end())
            fail(ErrorCode::UnknownToken, "codepoint outside the byte-level unit alphabet");
        out.push_back(static_cast<char>(it->second));
        pos += d.len;
    }
    return out;
}

uint64_t count_scalars(std::string_view text) {
    uint64_t n = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        pos += decode_utf8(text, pos).len;
        ++n;
    }
    return n;
}

std::vector<std::string> pretokenize(std::string_view text, const PretokenizerSpec& spec) {
    switch (spec.scheme) {
        case Scheme::Identity:
            if (text.empty()) return {};
            return {std::string(text)};
        case Scheme::Whitespace:
            return split_whitespace(text);
        case Scheme::ByteLevel: {
            if (spec.pattern != "gpt2")
                fail(ErrorCode::UnsupportedPattern,
                     "unknown byte-level split pattern \"" + spec.pattern + "\"");
            if (text.empty()) return {};
            if (spec.add_prefix_space && text[0] != ' ') {
                std::string prefixed;
                prefixed.reserve(text.size() + 1);
                prefixed.push_back(' ');
                prefixed.append(text);
                return split_gpt2(prefixed);
            }
            return split_gpt2(text);
        }
    }
    return {};
}

WordHistogram build_histogram(const std::vector<std::string>& texts,
                              const PretokenizerSpec& spec) {
    WordHistogram h;
    for (const auto& text : texts) accumulate_text(h, text, spec);
    return h;
}

WordHistogram build_histogram_from_files(const std::vector<std::string>& paths,
                                         const PretokenizerSpec& spec, unsigned workers) {
    std::vector<std::string> files;
    for (const auto& p : paths) list_files(p, files);
    std::sort(files.begin(), files.end());

    std::vector<WordHistogram> shards(files.size());
    parallel_for(files.size(), workers, [&](size_t i) {
        WordHistogram local;
        std::string data = read_file(files[i]);
        size_t pos = 0;
        while (pos < data.size()) {
            size_t nl = data.find('\n', pos);
            size_t end = nl == std::string::npos ? data.size() : nl + 1;
            accumulate_text(local, std::string_view(data).substr(pos, end - pos), spec);
            pos = end;
        }
        shards[i] = std::move(local);
    });

    WordHistogram total;
    for (auto& shard : shards) total = merge_histograms(total, shard);
    return total;
}

WordHistogram merge_histograms(const WordHistogram& a, const WordHistogram& b) {
    WordHistogram out = a;
    for (const auto& [word, count] : b.entries) out.entries[word] += count;
    out.total_base_symbols += b.total_base_symbols;
    out.total_words += b.total_words;
    out.total_chars += b.total_chars;
    return out;
}

uint64_t base_unit_length(std::string_view word, const PretokenizerSpec& spec) {
    if (spec.scheme == Scheme::ByteLevel) return count_scalars(word);
    return word.size();
}

}  // namespace adaptbpe
