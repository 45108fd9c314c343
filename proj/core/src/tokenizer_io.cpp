#include "adaptbpe/tokenizer_io.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include "json.hpp"

#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/sha256.hpp"
#include "adaptbpe/version.hpp"

namespace adaptbpe {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::IoError, "read failure on " + path);
    return data;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::IoError, "write failure on " + path);
}

std::string dump_canonical(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json parse_json(const std::string& text, const std::string& path) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::SchemaError, "invalid JSON in " + path);
    return j;
}

PretokenizerSpec detect_pretokenizer(const ordered_json& root) {
    if (!root.contains("pre_tokenizer") || root["pre_tokenizer"].is_null()) {
        std::cerr << "warning: no pre_tokenizer in file, defaulting to byte-level (gpt2 pattern)\n";
        return PretokenizerSpec::byte_level();
    }
    const auto& pt = root["pre_tokenizer"];
    auto from_node = [](const ordered_json& node) -> std::optional<PretokenizerSpec> {
        if (!node.is_object() || !node.contains("type") || !node["type"].is_string())
            return std::nullopt;
        std::string type = node["type"].get<std::string>();
        if (type == "ByteLevel") {
            bool prefix = node.value("add_prefix_space", false);
            return PretokenizerSpec::byte_level(prefix);
        }
        if (type == "Whitespace" || type == "WhitespaceSplit") return PretokenizerSpec::whitespace();
        if (type == "Identity") return PretokenizerSpec::identity();
        return std::nullopt;
    };
    if (auto spec = from_node(pt)) return *spec;
    if (pt.is_object() && pt.value("type", "") == "Sequence" && pt.contains("pretokenizers")) {
        for (const auto& sub : pt["pretokenizers"])
            if (auto spec = from_node(sub)) return *spec;
    }
    std::cerr << "warning: unrecognized pre_tokenizer, defaulting to byte-level (gpt2 pattern)\n";
    return PretokenizerSpec::byte_level();
}

ordered_json pretokenizer_to_json(const PretokenizerSpec& spec) {
    ordered_json j;
    switch (spec.scheme) {
        case Scheme::ByteLevel:
            j["scheme"] = "bytelevel";
            j["pattern"] = spec.pattern;
            j["add_prefix_space"] = spec.add_prefix_space;
            break;
        case Scheme::Whitespace:
            j["scheme"] = "whitespace";
            break;
        case Scheme::Identity:
            j["scheme"] = "identity";
            break;
    }
    return j;
}

PretokenizerSpec pretokenizer_from_json(const ordered_json& j) {
    std::string scheme = j.value("scheme", "");
    if (scheme == "bytelevel") {
        PretokenizerSpec spec = PretokenizerSpec::byte_level(j.value("add_prefix_space", false));
        spec.pattern = j.value("pattern", "gpt2");
        return spec;
    }
    if (scheme == "whitespace") return PretokenizerSpec::whitespace();
    if (scheme == "identity") return PretokenizerSpec::identity();
    fail(ErrorCode::SchemaError, "unknown pretokenizer scheme \"" + scheme + "\"");
}

}  // namespace

LoadedTokenizer load_pretrained(const std::string& path,
                                std::optional<PretokenizerSpec> override) {
    std::string raw = read_file(path);
    ordered_json root = parse_json(raw, path);
    const ordered_json& model =
        root.contains("model") && root["model"].is_object() ? root["model"] : root;

    if (model.contains("type") && model["type"].is_string() &&
        model["type"].get<std::string>() != "BPE")
        fail(ErrorCode::UnsupportedModelType,
             "model type \"" + model["type"].get<std::string>() + "\" (only BPE is supported)");
    if (!model.contains("vocab") || !model["vocab"].is_object())
        fail(ErrorCode::SchemaError, "missing model.vocab in " + path);
    if (!model.contains("merges") || !model["merges"].is_array())
        fail(ErrorCode::SchemaError, "missing model.merges in " + path);

    std::unordered_map<std::string, int64_t> vocab;
    int64_t id_bound = 0;
    for (auto it = model["vocab"].begin(); it != model["vocab"].end(); ++it) {
        if (!it.value().is_number_integer())
            fail(ErrorCode::SchemaError, "non-integer vocab id for \"" + it.key() + "\"");
        int64_t id = it.value().get<int64_t>();
        vocab[it.key()] = id;
        id_bound = std::max(id_bound, id + 1);
    }

    std::vector<std::pair<std::string, std::string>> merges;
    merges.reserve(model["merges"].size());
    size_t line = 0;
    for (const auto& entry : model["merges"]) {
        std::string left, right;
        if (entry.is_string()) {
            const std::string s = entry.get<std::string>();
            size_t space = s.find(' ');
            if (space == std::string::npos || space == 0 || space + 1 == s.size())
                fail(ErrorCode::MalformedMerge, "merge " + std::to_string(line) + ": \"" + s + "\"");
            left = s.substr(0, space);
            right = s.substr(space + 1);
        } else if (entry.is_array() && entry.size() == 2 && entry[0].is_string() &&
                   entry[1].is_string()) {
            left = entry[0].get<std::string>();
            right = entry[1].get<std::string>();
        } else {
            fail(ErrorCode::MalformedMerge, "merge " + std::to_string(line));
        }
        if (!vocab.count(left) || !vocab.count(right) || !vocab.count(left + right))
            fail(ErrorCode::VocabMergeMismatch,
                 "merge " + std::to_string(line) + " (" + left + ", " + right +
                     ") not closed under the vocab");
        merges.emplace_back(std::move(left), std::move(right));
        ++line;
    }

    std::vector<int64_t> special_ids;
    std::set<std::string> added;
    if (root.contains("added_tokens") && root["added_tokens"].is_array()) {
        for (const auto& t : root["added_tokens"]) {
            if (!t.is_object() || !t.contains("content") || !t.contains("id")) continue;
            std::string content = t["content"].get<std::string>();
            int64_t id = t["id"].get<int64_t>();
            added.insert(content);
            vocab.emplace(content, id);
            id_bound = std::max(id_bound, id + 1);
            if (t.value("special", false)) special_ids.push_back(id);
        }
        std::sort(special_ids.begin(), special_ids.end());
    }

    PretokenizerSpec spec = override ? *override : detect_pretokenizer(root);

    std::vector<std::string> alphabet;
    if (spec.scheme == Scheme::ByteLevel) {
        alphabet = byte_level_alphabet();
    } else {
        // Base symbols: vocab entries that no merge produces, minus added tokens.
        std::set<std::string> results;
        for (const auto& [l, r] : merges) results.insert(l + r);
        std::vector<std::pair<int64_t, std::string>> by_id;
        for (const auto& [token, id] : vocab)
            if (!results.count(token) && !added.count(token)) by_id.emplace_back(id, token);
        std::sort(by_id.begin(), by_id.end());
        alphabet.reserve(by_id.size());
        for (auto& [id, token] : by_id) alphabet.push_back(std::move(token));
    }

    LoadedTokenizer loaded{MergeTable::build(alphabet, merges), spec,      std::move(vocab),
                           std::move(special_ids),              sha256_hex(raw), id_bound};
    return loaded;
}

void save_adapted(const std::string& path, const MergeTable& table, const PretokenizerSpec& spec,
                  const AdaptedProvenance& provenance) {
    ordered_json j;
    j["format"] = "adaptbpe";
    j["version"] = 1;

    bool bytelevel_alphabet = false;
    if (spec.scheme == Scheme::ByteLevel && table.alphabet_size() == 256) {
        bytelevel_alphabet = true;
        const auto units = byte_level_alphabet();
        for (size_t i = 0; i < 256; ++i)
            if (table.symbol(static_cast<SymbolId>(i)).bytes != units[i]) {
                bytelevel_alphabet = false;
                break;
            }
    }
    if (bytelevel_alphabet) {
        j["base_alphabet"] = {{"type", "bytelevel"}};
    } else {
        ordered_json symbols = ordered_json::array();
        for (size_t i = 0; i < table.alphabet_size(); ++i)
            symbols.push_back(table.symbol(static_cast<SymbolId>(i)).bytes);
        j["base_alphabet"] = {{"type", "explicit"}, {"symbols", std::move(symbols)}};
    }

    j["pretokenizer"] = pretokenizer_to_json(spec);

    ordered_json merges = ordered_json::array();
    for (const MergeRule& m : table.rules()) {
        ordered_json rec;
        rec["left"] = table.symbol(m.left).bytes;
        rec["right"] = table.symbol(m.right).bytes;
        rec["result"] = table.symbol(m.result).bytes;
        rec["kind"] = m.kind == MergeKind::Actual ? "actual" : "virtual";
        rec["origin_rank"] = m.origin_rank;
        merges.push_back(std::move(rec));
    }
    j["merges"] = std::move(merges);

    ordered_json prov;
    prov["source_digest"] = provenance.source_digest;
    prov["budget"] = provenance.budget;
    prov["margin"] = provenance.margin;
    prov["mode"] = provenance.mode;
    prov["swap_count"] = provenance.swap_count;
    prov["tool_version"] =
        provenance.tool_version.empty() ? kToolVersion : provenance.tool_version;
    j["provenance"] = std::move(prov);

    write_file(path, dump_canonical(j));
}

LoadedAdapted load_adapted(const std::string& path) {
    ordered_json j = parse_json(read_file(path), path);
    if (j.value("format", "") != "adaptbpe")
        fail(ErrorCode::SchemaError, path + " is not an adaptbpe file");
    if (j.value("version", 0) != 1)
        fail(ErrorCode::SchemaError, "unsupported adaptbpe version in " + path);
    if (!j.contains("base_alphabet") || !j.contains("merges") || !j.contains("pretokenizer") ||
        !j.contains("provenance"))
        fail(ErrorCode::SchemaError, "missing sections in " + path);

    std::vector<std::string> alphabet;
    const auto& base = j["base_alphabet"];
    std::string base_type = base.value("type", "");
    if (base_type == "bytelevel") {
        alphabet = byte_level_alphabet();
    } else if (base_type == "explicit") {
        for (const auto& s : base.at("symbols")) alphabet.push_back(s.get<std::string>());
    } else {
        fail(ErrorCode::SchemaError, "unknown base_alphabet type \"" + base_type + "\"");
    }

    std::vector<RawMerge> merges;
    for (const auto& rec : j["merges"]) {
        RawMerge m;
        m.left = rec.at("left").get<std::string>();
        m.right = rec.at("right").get<std::string>();
        std::string kind = rec.at("kind").get<std::string>();
        if (kind == "actual")
            m.kind = MergeKind::Actual;
        else if (kind == "virtual")
            m.kind = MergeKind::Virtual;
        else
            fail(ErrorCode::SchemaError, "unknown merge kind \"" + kind + "\"");
        m.origin_rank = rec.at("origin_rank").get<int64_t>();
        if (rec.at("result").get<std::string>() != m.left + m.right)
            fail(ErrorCode::SchemaError, "merge result does not equal left + right");
        merges.push_back(std::move(m));
    }

    const auto& prov = j["provenance"];
    AdaptedProvenance provenance;
    provenance.source_digest = prov.value("source_digest", "");
    provenance.budget = prov.value("budget", uint64_t{0});
    provenance.margin = prov.value("margin", "0");
    provenance.mode = prov.value("mode", "fast");
    provenance.swap_count = prov.value("swap_count", uint64_t{0});
    provenance.tool_version = prov.value("tool_version", "");

    return {MergeTable::build_rules(alphabet, merges), pretokenizer_from_json(j["pretokenizer"]),
            std::move(provenance)};
}

bool is_adapted_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string head(512, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<size_t>(in.gcount()));
    return head.find("\"format\": \"adaptbpe\"") != std::string::npos;
}

std::vector<int64_t> mask_ids(const MergeTable& adapted, const LoadedTokenizer& source) {
    std::vector<int64_t> ids;
    auto lookup = [&](const std::string& token) {
        auto it = source.vocab.find(token);
        if (it == source.vocab.end())
            fail(ErrorCode::UnknownToken, "\"" + token + "\" missing from the source vocab");
        return it->second;
    };
    for (size_t i = 0; i < adapted.alphabet_size(); ++i)
        ids.push_back(lookup(adapted.symbol(static_cast<SymbolId>(i)).bytes));
    for (const MergeRule& m : adapted.rules())
        if (m.kind == MergeKind::Actual) ids.push_back(lookup(adapted.symbol(m.result).bytes));
    for (int64_t id : source.special_ids) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (int64_t id : ids)
        if (id < 0 || id >= source.vocab_id_bound)
            fail(ErrorCode::UnknownToken, "mask id " + std::to_string(id) + " out of vocab range");
    return ids;
}

void export_mask(const std::string& path, const MergeTable& adapted,
                 const LoadedTokenizer& source) {
    std::vector<int64_t> ids = mask_ids(adapted, source);
    ordered_json j;
    j["source_digest"] = source.digest;
    j["allowed_ids"] = ids;
    j["count"] = ids.size();
    write_file(path, dump_canonical(j));
}

CompatReport export_compat(const std::string& tokenizer_path, const std::string& report_path,
                           const MergeTable& adapted, const LoadedTokenizer& source,
                           const WordHistogram& hist) {
    // Keep actual rules whose parents are formable without any virtual rule;
    // the rest could never fire under plain application.
    std::vector<std::string> alphabet;
    for (size_t i = 0; i < adapted.alphabet_size(); ++i)
        alphabet.push_back(adapted.symbol(static_cast<SymbolId>(i)).bytes);

    std::set<std::string> formable(alphabet.begin(), alphabet.end());
    std::vector<std::pair<std::string, std::string>> kept;
    for (const MergeRule& m : adapted.rules()) {
        if (m.kind != MergeKind::Actual) continue;
        const std::string& l = adapted.symbol(m.left).bytes;
        const std::string& r = adapted.symbol(m.right).bytes;
        if (!formable.count(l) || !formable.count(r)) continue;
        formable.insert(l + r);
        kept.emplace_back(l, r);
    }
    MergeTable plain = MergeTable::build(alphabet, kept);

    ordered_json j;
    ordered_json model;
    model["type"] = "BPE";
    std::vector<std::pair<int64_t, std::string>> vocab_by_id;
    for (const std::string& token : formable) {
        auto it = source.vocab.find(token);
        if (it == source.vocab.end())
            fail(ErrorCode::UnknownToken, "\"" + token + "\" missing from the source vocab");
        vocab_by_id.emplace_back(it->second, token);
    }
    for (int64_t id : source.special_ids)
        for (const auto& [token, tid] : source.vocab)
            if (tid == id) vocab_by_id.emplace_back(id, token);
    std::sort(vocab_by_id.begin(), vocab_by_id.end());
    vocab_by_id.erase(std::unique(vocab_by_id.begin(), vocab_by_id.end()), vocab_by_id.end());
    ordered_json vocab_json = ordered_json::object();
    for (const auto& [id, token] : vocab_by_id) vocab_json[token] = id;
    model["vocab"] = std::move(vocab_json);
    ordered_json merges_json = ordered_json::array();
    for (const auto& [l, r] : kept) merges_json.push_back(l + " " + r);
    model["merges"] = std::move(merges_json);
    j["model"] = std::move(model);
    switch (source.pretokenizer.scheme) {
        case Scheme::ByteLevel:
            j["pre_tokenizer"] = {{"type", "ByteLevel"},
                                  {"add_prefix_space", source.pretokenizer.add_prefix_space}};
            break;
        case Scheme::Whitespace:
            j["pre_tokenizer"] = {{"type", "Whitespace"}};
            break;
        case Scheme::Identity:
            j["pre_tokenizer"] = {{"type", "Identity"}};
            break;
    }
    write_file(tokenizer_path, dump_canonical(j));

    CompatReport report{true, 0, {}};
    const Tokenizer canonical(adapted);
    const Tokenizer flat(plain);
    std::vector<std::string> words;
    words.reserve(hist.entries.size());
    for (const auto& [word, count] : hist.entries) words.push_back(word);
    std::sort(words.begin(), words.end());
    for (const auto& word : words) {
        ++report.checked_words;
        std::vector<SymbolId> a = canonical.tokenize(word).tokens;
        std::vector<SymbolId> b = flat.tokenize(word).tokens;
        auto strings_of = [](const Tokenizer& tok, const std::vector<SymbolId>& ids) {
            std::vector<std::string> out;
            out.reserve(ids.size());
            for (SymbolId id : ids) out.push_back(tok.table().symbol(id).bytes);
            return out;
        };
        if (strings_of(canonical, a) != strings_of(flat, b))
            report.diverging_words.push_back(word);
    }
    report.lossless = report.diverging_words.empty();

    ordered_json rep;
    rep["lossless"] = report.lossless;
    rep["checked_words"] = report.checked_words;
    rep["diverging_words"] = report.diverging_words;
    write_file(report_path, dump_canonical(rep));
    return report;
}

}  // namespace adaptbpe
