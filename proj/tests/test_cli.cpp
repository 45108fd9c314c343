// Drives the installed CLI binary (path via ADAPTBPE_CLI) end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>

#include <sys/wait.h>
#include <sstream>

#include "json.hpp"

#include "support.hpp"

namespace {

std::string cli_path() {
    const char* p = std::getenv("ADAPTBPE_CLI");
    REQUIRE_MESSAGE(p != nullptr, "set ADAPTBPE_CLI to the binary under test");
    return p;
}

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run(const testsupport::TempDir& dir, const std::string& args) {
    std::string out_file = dir.file("stdout.tmp");
    std::string err_file = dir.file("stderr.tmp");
    std::string cmd = cli_path() + " " + args + " >" + out_file + " 2>" + err_file;
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out_file), slurp(err_file)};
}

void write_toy(const testsupport::TempDir& dir) {
    nlohmann::ordered_json j;
    j["model"] = {
        {"type", "BPE"},
        {"vocab",
         {{"a", 0},
          {"b", 1},
          {"c", 2},
          {"d", 3},
          {"ab", 4},
          {"abc", 5},
          {"cd", 6},
          {"abab", 7},
          {"abcd", 8}}},
        {"merges", {"a b", "ab c", "c d", "ab ab", "abc d"}},
    };
    j["pre_tokenizer"] = {{"type", "Whitespace"}};
    std::ofstream(dir.file("toy.json")) << j.dump(1);
    std::filesystem::create_directories(dir.path() / "dev");
    std::ofstream(dir.file("dev/corpus.txt"))
        << "abab abab abcd\nabab abcd cd cd cd cd cd\n";
}

std::string strip_seconds(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string row;
    while (std::getline(in, row)) out << row.substr(0, row.rfind(',')) << "\n";
    return out.str();
}

}  // namespace

TEST_CASE("adapt writes the tokenizer, trace and report") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult r = run(dir, "adapt --tokenizer " + dir.file("toy.json") + " --corpus " +
                               dir.file("dev") + " --budget 2 --out " + dir.file("out.json") +
                               " --trace " + dir.file("trace.csv") + " --json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["swaps"] == 1);
    CHECK(j["incremental_token_total"] == 15);
    CHECK(j["canonical_token_total"] == 17);
    CHECK(j["merge_depth"] == 2);
    CHECK(slurp(dir.file("trace.csv")) ==
          "step,demoted_rank,demoted_freq,promoted_rank,promoted_freq,incremental_tokens\n"
          "1,1,2,2,5,15\n");
}

TEST_CASE("usage errors exit 1") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult r = run(dir, "adapt --tokenizer " + dir.file("toy.json") + " --corpus " +
                               dir.file("dev") + " --out " + dir.file("out.json"));
    CHECK(r.exit_code == 1);
    CHECK(!r.err.empty());

    RunResult unknown = run(dir, "frobnicate");
    CHECK(unknown.exit_code == 1);
}

TEST_CASE("data errors exit 2 with the error code name") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult r = run(dir, "adapt --tokenizer " + dir.file("toy.json") + " --corpus " +
                               dir.file("dev") + " --budget 9 --out " + dir.file("out.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("BudgetTooLarge") != std::string::npos);

    std::filesystem::create_directories(dir.path() / "empty");
    RunResult empty = run(dir, "adapt --tokenizer " + dir.file("toy.json") + " --corpus " +
                                   dir.file("empty") + " --budget 2 --out " + dir.file("o.json"));
    CHECK(empty.exit_code == 2);
    CHECK(empty.err.find("EmptyCorpus") != std::string::npos);
}

TEST_CASE("tokenize emits ids one pre-token per line") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult strings = run(dir, "tokenize --tokenizer " + dir.file("toy.json") +
                                     " --text \"abcd abab cd\"");
    CHECK(strings.exit_code == 0);
    CHECK(strings.out == "abcd abab cd\n");

    RunResult ids = run(dir, "tokenize --tokenizer " + dir.file("toy.json") +
                                 " --format ids --text \"abcd abab cd\"");
    CHECK(ids.exit_code == 0);
    CHECK(ids.out == "8\n7\n6\n");

    RunResult counts = run(dir, "tokenize --tokenizer " + dir.file("toy.json") +
                                    " --format counts --text \"cd cd abcd\"");
    CHECK(counts.exit_code == 0);
    CHECK(counts.out == "cd\t2\nabcd\t1\n");
}

TEST_CASE("adapted tokenizers keep working through the cli") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult adapt = run(dir, "adapt --tokenizer " + dir.file("toy.json") + " --corpus " +
                                   dir.file("dev") + " --budget 2 --out " + dir.file("a.json"));
    REQUIRE(adapt.exit_code == 0);

    RunResult strings =
        run(dir, "tokenize --tokenizer " + dir.file("a.json") + " --text \"abcd\"");
    CHECK(strings.out == "ab c d\n");

    // ids need the source vocabulary.
    RunResult ids_plain =
        run(dir, "tokenize --tokenizer " + dir.file("a.json") + " --format ids --text \"abcd\"");
    CHECK(ids_plain.exit_code == 2);
    RunResult ids = run(dir, "tokenize --tokenizer " + dir.file("a.json") + " --source " +
                                 dir.file("toy.json") + " --format ids --text \"abcd\"");
    CHECK(ids.exit_code == 0);
    CHECK(ids.out == "4 2 3\n");

    RunResult eval = run(dir, "evaluate --tokenizer " + dir.file("a.json") + " --corpus " +
                                  dir.file("dev") + " --csv");
    CHECK(eval.exit_code == 0);
    CHECK(eval.out.find("0.433333,1.700000,30,17,10,2,2") != std::string::npos);

    RunResult mask = run(dir, "mask --tokenizer " + dir.file("toy.json") + " --adapted " +
                                  dir.file("a.json") + " --out " + dir.file("mask.json"));
    CHECK(mask.exit_code == 0);
    auto m = nlohmann::json::parse(slurp(dir.file("mask.json")));
    CHECK(m["allowed_ids"] == nlohmann::json({0, 1, 2, 3, 4, 6}));
    CHECK(m["count"] == 6);
}

TEST_CASE("mask refuses a mismatched source") {
    testsupport::TempDir dir;
    write_toy(dir);
    REQUIRE(run(dir, "adapt --tokenizer " + dir.file("toy.json") + " --corpus " + dir.file("dev") +
                         " --budget 2 --out " + dir.file("a.json"))
                .exit_code == 0);

    // A different source file (one space changes the digest).
    std::ofstream(dir.file("toy2.json")) << slurp(dir.file("toy.json")) << "\n";
    RunResult r = run(dir, "mask --tokenizer " + dir.file("toy2.json") + " --adapted " +
                               dir.file("a.json") + " --out " + dir.file("m.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("DigestMismatch") != std::string::npos);
}

TEST_CASE("baseline and evaluate round trip") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult base = run(dir, "baseline --method top_k --tokenizer " + dir.file("toy.json") +
                                  " --corpus " + dir.file("dev") + " --budget 2 --out " +
                                  dir.file("top.json") + " --json");
    CHECK(base.exit_code == 0);
    auto j = nlohmann::json::parse(base.out);
    CHECK(j["actual_count"] == 2);

    RunResult eval = run(dir, "evaluate --tokenizer " + dir.file("top.json") + " --corpus " +
                                  dir.file("dev"));
    CHECK(eval.exit_code == 0);
    auto report = nlohmann::json::parse(eval.out);
    CHECK(report["token_total"] == 16);

    RunResult pos = run(dir, "baseline --method first_k_pos --tokenizer " + dir.file("toy.json") +
                                 " --budget 2 --out " + dir.file("p.json"));
    CHECK(pos.exit_code == 2);  // needs --corpus
}

TEST_CASE("sweep output is deterministic apart from timings") {
    testsupport::TempDir dir;
    write_toy(dir);
    std::string base = "sweep --tokenizer " + dir.file("toy.json") + " --corpus " +
                       dir.file("dev") + " --budgets 1:3:1 --methods adaptbpe,first_k --workers 2";
    RunResult a = run(dir, base + " --out " + dir.file("s1.csv"));
    RunResult b = run(dir, base + " --out " + dir.file("s2.csv"));
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(strip_seconds(slurp(dir.file("s1.csv"))) == strip_seconds(slurp(dir.file("s2.csv"))));
    CHECK(slurp(dir.file("s1.csv")).rfind(
              "method,budget,dev_tokens,test_tokens,cu,fertility,merge_depth,seconds\n", 0) == 0);
}

TEST_CASE("evaluate dumps frequency tables") {
    testsupport::TempDir dir;
    write_toy(dir);
    RunResult r = run(dir, "evaluate --tokenizer " + dir.file("toy.json") + " --corpus " +
                               dir.file("dev") + " --dump-freqs " + dir.file("freqs"));
    CHECK(r.exit_code == 0);
    std::string uni = slurp(dir.file("freqs.unigram.csv"));
    std::string bi = slurp(dir.file("freqs.bigram.csv"));
    CHECK(uni.rfind("symbol,token,count\n", 0) == 0);
    CHECK(bi.rfind("rank,left,right,count\n", 0) == 0);
    CHECK(uni.find("\"abcd\",2") != std::string::npos);
}

TEST_CASE("selftest passes") {
    testsupport::TempDir dir;
    RunResult r = run(dir, "selftest");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("oracle equivalence smoke") != std::string::npos);
}
