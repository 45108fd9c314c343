// adaptbpe: post-hoc BPE merge-list adaptation under a fixed merge budget.
//
// Exit codes: 0 success, 1 usage error, 2 data error (improper merges, empty
// corpus, malformed files). Diagnostics go to stderr; stdout carries only the
// requested payload.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adaptbpe/adaptation.hpp"
#include "adaptbpe/baselines.hpp"
#include "adaptbpe/bpe_engine.hpp"
#include "adaptbpe/error.hpp"
#include "adaptbpe/merge_model.hpp"
#include "adaptbpe/metrics.hpp"
#include "adaptbpe/parallel.hpp"
#include "adaptbpe/pretokenize.hpp"
#include "adaptbpe/sha256.hpp"
#include "adaptbpe/tokenizer_io.hpp"
#include "adaptbpe/version.hpp"

namespace {

using namespace adaptbpe;
using ordered_json = nlohmann::ordered_json;

struct CommonOptions {
    std::string tokenizer;
    std::vector<std::string> corpus;
    std::string pretokenizer = "from-tokenizer";
    unsigned workers = default_workers();
};

std::optional<PretokenizerSpec> pretokenizer_override(const std::string& name) {
    if (name == "from-tokenizer") return std::nullopt;
    if (name == "bytelevel") return PretokenizerSpec::byte_level();
    if (name == "whitespace") return PretokenizerSpec::whitespace();
    if (name == "identity") return PretokenizerSpec::identity();
    fail(ErrorCode::UnsupportedPattern, "unknown pretokenizer \"" + name + "\"");
}

// Either a pretrained tokenizer file or an .adaptbpe.json.
struct AnyTokenizer {
    MergeTable table;
    PretokenizerSpec pretokenizer;
    std::optional<LoadedTokenizer> source;  // set for pretrained files
    std::optional<AdaptedProvenance> provenance;
};

AnyTokenizer load_any(const std::string& path, const std::string& pretokenizer_flag) {
    auto override = pretokenizer_override(pretokenizer_flag);
    if (is_adapted_file(path)) {
        LoadedAdapted adapted = load_adapted(path);
        return {std::move(adapted.table),
                override ? *override : adapted.pretokenizer,
                std::nullopt,
                std::move(adapted.provenance)};
    }
    LoadedTokenizer loaded = load_pretrained(path, override);
    PretokenizerSpec spec = loaded.pretokenizer;
    MergeTable table = loaded.table;
    return {std::move(table), spec, std::move(loaded), std::nullopt};
}

AdaptMode parse_mode(const std::string& mode) {
    if (mode == "fast") return AdaptMode::Fast;
    if (mode == "strict") return AdaptMode::Strict;
    fail(ErrorCode::InvalidBudget, "unknown mode \"" + mode + "\"");
}

std::string margin_string(double margin) {
    if (std::isfinite(margin) && margin >= 0 && margin < 1e15 &&
        margin == static_cast<double>(static_cast<uint64_t>(margin)))
        return std::to_string(static_cast<uint64_t>(margin));
    std::ostringstream out;
    out << margin;
    return out.str();
}

std::vector<uint64_t> parse_budgets(const std::string& spec) {
    std::vector<uint64_t> budgets;
    if (spec.find(':') != std::string::npos) {
        uint64_t from = 0, to = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(spec);
        if (!(in >> from >> c1 >> to >> c2 >> step) || c1 != ':' || c2 != ':' || step == 0)
            fail(ErrorCode::InvalidBudget, "budget range must be FROM:TO:STEP, got \"" + spec + "\"");
        for (uint64_t b = from; b <= to; b += step) budgets.push_back(b);
    } else {
        std::istringstream in(spec);
        std::string part;
        while (std::getline(in, part, ',')) {
            if (part.empty()) continue;
            budgets.push_back(std::stoull(part));
        }
    }
    if (budgets.empty()) fail(ErrorCode::InvalidBudget, "no budgets in \"" + spec + "\"");
    if (!std::is_sorted(budgets.begin(), budgets.end()))
        fail(ErrorCode::InvalidBudget, "budgets must be ascending");
    return budgets;
}

std::vector<std::string> split_csv(const std::string& list) {
    std::vector<std::string> out;
    std::istringstream in(list);
    std::string part;
    while (std::getline(in, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

void write_text_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << data;
    if (!out) fail(ErrorCode::IoError, "write failure on " + path);
}

ordered_json eval_report_json(const EvalReport& r) {
    ordered_json j;
    j["cu"] = r.cu;
    j["fertility"] = r.fertility;
    j["base_symbols"] = r.base_symbols;
    j["token_total"] = r.token_total;
    j["word_count"] = r.word_count;
    j["merge_depth"] = r.merge_depth;
    j["actual_count"] = r.actual_count;
    return j;
}

// ---- adapt ----------------------------------------------------------------

int cmd_adapt(const CommonOptions& common, uint64_t budget, double margin,
              const std::string& mode, const std::string& out_path,
              const std::string& trace_path, const std::string& compat_path,
              std::string compat_report_path, std::optional<uint64_t> max_swaps, bool json) {
    LoadedTokenizer source =
        load_pretrained(common.tokenizer, pretokenizer_override(common.pretokenizer));
    WordHistogram hist =
        build_histogram_from_files(common.corpus, source.pretokenizer, common.workers);

    AdaptConfig config{budget, margin, parse_mode(mode), max_swaps, common.workers};
    AdaptationResult result = adapt(source.table, hist, config, source.pretokenizer);

    AdaptedProvenance prov;
    prov.source_digest = source.digest;
    prov.budget = budget;
    prov.margin = margin_string(margin);
    prov.mode = mode;
    prov.swap_count = result.swap_trace.size();
    prov.tool_version = kToolVersion;
    save_adapted(out_path, result.table, source.pretokenizer, prov);

    if (!trace_path.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, result.swap_trace);
        write_text_file(trace_path, csv.str());
    }
    if (!compat_path.empty()) {
        if (compat_report_path.empty()) compat_report_path = compat_path + ".report.json";
        CompatReport report =
            export_compat(compat_path, compat_report_path, result.table, source, hist);
        std::cerr << "compat export: " << (report.lossless ? "lossless" : "LOSSY") << ", "
                  << report.diverging_words.size() << "/" << report.checked_words
                  << " words diverge\n";
    }

    ordered_json j;
    j["budget"] = budget;
    j["margin"] = margin_string(margin);
    j["mode"] = mode;
    j["swaps"] = result.swap_trace.size();
    j["incremental_token_total"] = result.incremental_token_total;
    j["canonical_token_total"] = result.canonical_token_total;
    j["first_k_token_total"] = result.first_k_token_total;
    j["merge_depth"] = result.merge_depth;
    j["stop_reason"] = stop_reason_name(result.stop_reason);
    j["out"] = out_path;
    if (json)
        std::cout << j.dump(2) << "\n";
    else
        std::cerr << "adapted " << common.tokenizer << ": " << result.swap_trace.size()
                  << " swaps, incremental " << result.incremental_token_total << ", canonical "
                  << result.canonical_token_total << " tokens (first_k "
                  << result.first_k_token_total << ")\n";
    return 0;
}

// ---- baseline --------------------------------------------------------------

int cmd_baseline(const CommonOptions& common, const std::string& method, uint64_t budget,
                 const std::string& out_path, bool json) {
    LoadedTokenizer source =
        load_pretrained(common.tokenizer, pretokenizer_override(common.pretokenizer));

    std::optional<WordHistogram> hist;
    if (method != "first_k") {
        if (common.corpus.empty())
            fail(ErrorCode::EmptyCorpus, "method " + method + " needs --corpus");
        hist = build_histogram_from_files(common.corpus, source.pretokenizer, common.workers);
    }

    std::optional<MergeTable> table;
    if (method == "first_k")
        table = first_k(source.table, budget);
    else if (method == "first_k_pos")
        table = first_k_positive(source.table, *hist, budget, common.workers);
    else if (method == "top_k")
        table = top_k(source.table, *hist, budget, common.workers);
    else
        fail(ErrorCode::SchemaError, "unknown method \"" + method + "\"");

    AdaptedProvenance prov;
    prov.source_digest = source.digest;
    prov.budget = budget;
    prov.mode = method;
    prov.tool_version = kToolVersion;
    save_adapted(out_path, *table, source.pretokenizer, prov);

    ordered_json j;
    j["method"] = method;
    j["budget"] = budget;
    j["merge_count"] = table->merge_count();
    j["actual_count"] = table->actual_count();
    j["merge_depth"] = merge_depth(*table);
    j["out"] = out_path;
    if (json)
        std::cout << j.dump(2) << "\n";
    else
        std::cerr << method << " with budget " << budget << " -> " << out_path << "\n";
    return 0;
}

// ---- tokenize ---------------------------------------------------------------

int cmd_tokenize(const CommonOptions& common, const std::string& source_path,
                 const std::string& format, const std::vector<std::string>& inputs,
                 const std::string& inline_text) {
    AnyTokenizer any = load_any(common.tokenizer, common.pretokenizer);

    std::optional<LoadedTokenizer> ids_source = std::move(any.source);
    if (!source_path.empty()) {
        LoadedTokenizer src = load_pretrained(source_path, std::nullopt);
        if (any.provenance && !any.provenance->source_digest.empty() &&
            any.provenance->source_digest != src.digest)
            fail(ErrorCode::DigestMismatch,
                 "--source does not match the adapted file's source digest");
        ids_source = std::move(src);
    }
    if (format == "ids" && !ids_source)
        fail(ErrorCode::UnknownToken,
             "ids need the original vocabulary; pass --source with the pretrained file");

    std::vector<std::string> texts;
    if (!inline_text.empty()) texts.push_back(inline_text);
    for (const auto& path : inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(ErrorCode::IoError, "cannot open " + path);
        std::string line;
        while (std::getline(in, line)) texts.push_back(line);
    }
    if (inline_text.empty() && inputs.empty()) {
        std::string line;
        while (std::getline(std::cin, line)) texts.push_back(line);
    }

    const Tokenizer tok(any.table);
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& text : texts) {
        std::vector<std::string> words = pretokenize(text, any.pretokenizer);
        if (format == "strings") {
            std::string out;
            for (const auto& word : words)
                for (SymbolId id : tok.tokenize(word).tokens) {
                    if (!out.empty()) out += ' ';
                    out += any.table.symbol(id).bytes;
                }
            std::cout << out << "\n";
        } else if (format == "ids") {
            for (const auto& word : words) {
                std::string out;
                for (SymbolId id : tok.tokenize(word).tokens) {
                    const std::string& bytes = any.table.symbol(id).bytes;
                    auto it = ids_source->vocab.find(bytes);
                    if (it == ids_source->vocab.end())
                        fail(ErrorCode::UnknownToken, "\"" + bytes + "\" not in the source vocab");
                    if (!out.empty()) out += ' ';
                    out += std::to_string(it->second);
                }
                std::cout << out << "\n";
            }
        } else if (format == "counts") {
            for (const auto& word : words)
                for (SymbolId id : tok.tokenize(word).tokens)
                    counts[any.table.symbol(id).bytes] += 1;
        } else {
            fail(ErrorCode::SchemaError, "unknown format \"" + format + "\"");
        }
    }
    if (format == "counts") {
        std::vector<std::pair<std::string, uint64_t>> sorted(counts.begin(), counts.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        for (const auto& [token, count] : sorted) std::cout << token << "\t" << count << "\n";
    }
    return 0;
}

// ---- evaluate ----------------------------------------------------------------

int cmd_evaluate(const CommonOptions& common, bool chars, bool csv,
                 const std::string& dump_freqs_prefix) {
    AnyTokenizer any = load_any(common.tokenizer, common.pretokenizer);
    WordHistogram hist =
        build_histogram_from_files(common.corpus, any.pretokenizer, common.workers);
    EvalReport report = compression_utility(any.table, hist, chars, common.workers);

    if (!dump_freqs_prefix.empty()) {
        TokenizedCorpus corpus = tokenize_corpus(any.table, hist, common.workers);
        std::vector<uint32_t> all_ranks;
        for (uint32_t r = 0; r < any.table.merge_count(); ++r) all_ranks.push_back(r);
        FrequencyIndex index(any.table, corpus, all_ranks, all_ranks);

        std::ostringstream uni;
        uni << "symbol,token,count\n";
        for (size_t id = 0; id < any.table.symbol_count(); ++id) {
            uint64_t c = index.unigram_count(static_cast<SymbolId>(id));
            if (c > 0)
                uni << id << ",\"" << any.table.symbol(static_cast<SymbolId>(id)).bytes << "\","
                    << c << "\n";
        }
        write_text_file(dump_freqs_prefix + ".unigram.csv", uni.str());

        std::ostringstream bi;
        bi << "rank,left,right,count\n";
        for (uint32_t r = 0; r < any.table.merge_count(); ++r) {
            const MergeRule& m = any.table.rule(r);
            bi << m.origin_rank << ",\"" << any.table.symbol(m.left).bytes << "\",\""
               << any.table.symbol(m.right).bytes << "\"," << index.candidate_count(r) << "\n";
        }
        write_text_file(dump_freqs_prefix + ".bigram.csv", bi.str());
    }

    if (csv) {
        std::cout << "cu,fertility,base_symbols,token_total,word_count,merge_depth,actual_count\n"
                  << format_double(report.cu, 6) << ',' << format_double(report.fertility, 6)
                  << ',' << report.base_symbols << ',' << report.token_total << ','
                  << report.word_count << ',' << report.merge_depth << ',' << report.actual_count
                  << "\n";
    } else {
        std::cout << eval_report_json(report).dump(2) << "\n";
    }
    return 0;
}

// ---- sweep -------------------------------------------------------------------

int cmd_sweep(const CommonOptions& common, const std::string& test_path,
              const std::string& budgets_spec, const std::string& methods_list, double margin,
              const std::string& mode, bool chars, const std::string& out_path) {
    LoadedTokenizer source =
        load_pretrained(common.tokenizer, pretokenizer_override(common.pretokenizer));
    WordHistogram dev =
        build_histogram_from_files(common.corpus, source.pretokenizer, common.workers);
    std::optional<WordHistogram> test;
    if (!test_path.empty())
        test = build_histogram_from_files({test_path}, source.pretokenizer, common.workers);

    SweepOptions options;
    options.margin = margin;
    options.mode = parse_mode(mode);
    options.count_chars = chars;
    options.workers = common.workers;

    std::vector<std::string> methods =
        methods_list.empty() ? kSweepMethods : split_csv(methods_list);
    auto records = sweep(source.table, dev, test ? &*test : nullptr, parse_budgets(budgets_spec),
                         methods, options, source.pretokenizer);

    std::ostringstream csv;
    write_sweep_csv(csv, records);
    if (out_path.empty())
        std::cout << csv.str();
    else
        write_text_file(out_path, csv.str());
    return 0;
}

// ---- mask --------------------------------------------------------------------

int cmd_mask(const std::string& tokenizer_path, const std::string& adapted_path,
             const std::string& out_path) {
    LoadedTokenizer source = load_pretrained(tokenizer_path, std::nullopt);
    LoadedAdapted adapted = load_adapted(adapted_path);
    if (!adapted.provenance.source_digest.empty() &&
        adapted.provenance.source_digest != source.digest)
        fail(ErrorCode::DigestMismatch,
             adapted_path + " was derived from a different source tokenizer");
    export_mask(out_path, adapted.table, source);
    std::cerr << "mask -> " << out_path << "\n";
    return 0;
}

// ---- selftest ------------------------------------------------------------------

int cmd_selftest() {
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    };

    MergeTable table = MergeTable::build(
        {"a", "b", "c", "d"}, {{"a", "b"}, {"ab", "c"}, {"c", "d"}, {"ab", "ab"}, {"abc", "d"}});
    WordHistogram hist = build_histogram({"abab abab abcd", "abab abcd cd cd cd cd cd"},
                                         PretokenizerSpec::whitespace());

    EvalReport plain = compression_utility(first_k(table, 2), hist);
    report("first_2 compression utility 1/3", std::abs(plain.cu - 1.0 / 3.0) < 1e-12);

    AdaptConfig config{2, 0.0, AdaptMode::Fast, std::nullopt, 1};
    AdaptationResult adapted = adapt(table, hist, config);
    report("adaptation swaps once", adapted.swap_trace.size() == 1);
    report("incremental total 15", adapted.incremental_token_total == 15);
    EvalReport canon = compression_utility(adapted.table, hist);
    report("adapted compression utility 13/30", std::abs(canon.cu - 13.0 / 30.0) < 1e-12);
    report("merge depth 2", adapted.merge_depth == 2);

    bool guarded = false;
    try {
        adapt(table, WordHistogram{}, config);
    } catch (const Error& e) {
        guarded = e.code() == ErrorCode::EmptyCorpus;
    }
    report("empty corpus guard", guarded);

    std::mt19937_64 rng(12345);
    bool oracle = true;
    for (int i = 0; i < 100 && oracle; ++i) {
        std::string word;
        size_t len = rng() % 20;
        for (size_t k = 0; k < len; ++k) word += char('a' + rng() % 4);
        oracle = tokenize_word(table, word).tokens == reference_tokenize(table, word).tokens;
    }
    report("oracle equivalence smoke (100 random words)", oracle);

    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"post-hoc BPE tokenizer adaptation under a fixed merge budget"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    CommonOptions common;

    // adapt
    auto* adapt_cmd = app.add_subcommand("adapt", "adapt a merge list to a corpus");
    uint64_t budget = 0;
    double margin = 0.0;
    std::string mode = "fast";
    std::string out_path, trace_path, compat_path, compat_report_path;
    uint64_t max_swaps_value = 0;
    bool json = false;
    adapt_cmd->add_option("--tokenizer", common.tokenizer, "pretrained tokenizer file")
        ->required();
    adapt_cmd->add_option("--corpus", common.corpus, "adaptation text files or directories")
        ->required();
    adapt_cmd->add_option("--budget", budget, "target number of actual merges")->required();
    adapt_cmd->add_option("--margin", margin, "stop-rule slack (default 0)");
    adapt_cmd->add_option("--mode", mode, "fast|strict (default fast)");
    adapt_cmd->add_option("--out", out_path, "output .adaptbpe.json")->required();
    adapt_cmd->add_option("--trace", trace_path, "swap trace CSV");
    adapt_cmd->add_option("--export-compat", compat_path, "best-effort plain merges export");
    adapt_cmd->add_option("--compat-report", compat_report_path, "loss report path");
    auto* cap_opt = adapt_cmd->add_option("--max-swaps", max_swaps_value, "safety cap on swaps");
    adapt_cmd->add_option("--pretokenizer", common.pretokenizer,
                          "bytelevel|whitespace|identity|from-tokenizer");
    adapt_cmd->add_option("--workers", common.workers, "worker threads");
    adapt_cmd->add_flag("--json", json, "print a JSON report on stdout");

    // baseline
    auto* baseline_cmd = app.add_subcommand("baseline", "budget-matched comparison tokenizers");
    std::string method;
    baseline_cmd->add_option("--method", method, "first_k|first_k_pos|top_k")->required();
    baseline_cmd->add_option("--tokenizer", common.tokenizer, "pretrained tokenizer file")
        ->required();
    baseline_cmd->add_option("--corpus", common.corpus, "scanning corpus (first_k_pos, top_k)");
    baseline_cmd->add_option("--budget", budget, "merge budget")->required();
    baseline_cmd->add_option("--out", out_path, "output .adaptbpe.json")->required();
    baseline_cmd->add_option("--pretokenizer", common.pretokenizer,
                             "bytelevel|whitespace|identity|from-tokenizer");
    baseline_cmd->add_option("--workers", common.workers, "worker threads");
    baseline_cmd->add_flag("--json", json, "print a JSON report on stdout");

    // tokenize
    auto* tokenize_cmd = app.add_subcommand("tokenize", "tokenize text with any tokenizer file");
    std::string source_path, format = "strings", inline_text;
    std::vector<std::string> inputs;
    tokenize_cmd->add_option("--tokenizer", common.tokenizer, "tokenizer file (either format)")
        ->required();
    tokenize_cmd->add_option("--source", source_path,
                             "pretrained source file (for original ids)");
    tokenize_cmd->add_option("--format", format, "ids|strings|counts (default strings)");
    tokenize_cmd->add_option("--text", inline_text, "tokenize this literal text");
    tokenize_cmd->add_option("inputs", inputs, "text files (one context per line)");
    tokenize_cmd->add_option("--pretokenizer", common.pretokenizer,
                             "bytelevel|whitespace|identity|from-tokenizer");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "compression metrics on a corpus");
    bool chars = false, csv = false, json_eval = false;
    std::string dump_freqs;
    evaluate_cmd->add_option("--tokenizer", common.tokenizer, "tokenizer file (either format)")
        ->required();
    evaluate_cmd->add_option("--corpus", common.corpus, "evaluation files or directories")
        ->required();
    evaluate_cmd->add_flag("--chars", chars, "denominate in Unicode scalars instead of bytes");
    evaluate_cmd->add_flag("--csv", csv, "CSV instead of JSON");
    evaluate_cmd->add_flag("--json", json_eval, "JSON report (default)");
    evaluate_cmd->add_option("--dump-freqs", dump_freqs,
                             "write PREFIX.unigram.csv and PREFIX.bigram.csv");
    evaluate_cmd->add_option("--pretokenizer", common.pretokenizer,
                             "bytelevel|whitespace|identity|from-tokenizer");
    evaluate_cmd->add_option("--workers", common.workers, "worker threads");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "learning curves over budgets");
    std::string test_path, budgets_spec, methods_list;
    sweep_cmd->add_option("--tokenizer", common.tokenizer, "pretrained tokenizer file")
        ->required();
    sweep_cmd->add_option("--corpus", common.corpus, "dev corpus files or directories")
        ->required();
    sweep_cmd->add_option("--test", test_path, "held-out corpus for the evaluation columns");
    sweep_cmd->add_option("--budgets", budgets_spec, "FROM:TO:STEP or comma list")->required();
    sweep_cmd->add_option("--methods", methods_list,
                          "comma list of adaptbpe,first_k,first_k_pos,top_k (default all)");
    sweep_cmd->add_option("--margin", margin, "stop-rule slack for adaptbpe");
    sweep_cmd->add_option("--mode", mode, "fast|strict for adaptbpe");
    sweep_cmd->add_flag("--chars", chars, "denominate cu in Unicode scalars");
    sweep_cmd->add_option("--out", out_path, "output CSV (stdout when omitted)");
    sweep_cmd->add_option("--pretokenizer", common.pretokenizer,
                          "bytelevel|whitespace|identity|from-tokenizer");
    sweep_cmd->add_option("--workers", common.workers, "worker threads");

    // mask
    auto* mask_cmd = app.add_subcommand("mask", "allowed-token-id mask for logit masking");
    std::string adapted_path;
    mask_cmd->add_option("--tokenizer", common.tokenizer, "pretrained source tokenizer")
        ->required();
    mask_cmd->add_option("--adapted", adapted_path, "adapted .adaptbpe.json")->required();
    mask_cmd->add_option("--out", out_path, "mask JSON path")->required();

    // selftest
    auto* selftest_cmd =
        app.add_subcommand("selftest", "run the bundled fixture suite and print pass/fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 1;
    }

    try {
        if (*adapt_cmd)
            return cmd_adapt(common, budget, margin, mode, out_path, trace_path, compat_path,
                             compat_report_path,
                             *cap_opt ? std::optional<uint64_t>(max_swaps_value) : std::nullopt,
                             json);
        if (*baseline_cmd) return cmd_baseline(common, method, budget, out_path, json);
        if (*tokenize_cmd) return cmd_tokenize(common, source_path, format, inputs, inline_text);
        if (*evaluate_cmd) return cmd_evaluate(common, chars, csv, dump_freqs);
        if (*sweep_cmd)
            return cmd_sweep(common, test_path, budgets_spec, methods_list, margin, mode, chars,
                             out_path);
        if (*mask_cmd) return cmd_mask(common.tokenizer, adapted_path, out_path);
        if (*selftest_cmd) return cmd_selftest();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
