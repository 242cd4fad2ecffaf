#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "corpus.hpp"
#include "inspectre/errors.hpp"
#include "program_io.hpp"

namespace inspectre::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCorpus = INSPECTRE_CORPUS_DIR;

std::string corpus_file(const std::string& name) { return kCorpus + "/" + name; }

struct Invocation {
    int code = -1;
    std::string out;
};

// Runs the installed-layout binary with stderr folded into stdout.
Invocation invoke(const std::string& args) {
    Invocation r;
    const std::string cmd = std::string(INSPECTRE_BIN) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<json> json_lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "inspectre_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

TEST(Run, InOrderTraceIsDeterministic) {
    CommandOptions opts;
    opts.semantics = "inorder";
    std::ostringstream a, b;
    EXPECT_EQ(cmd_run(corpus_file("spectre_pht.isa"), opts, a), kExitOk);
    EXPECT_EQ(cmd_run(corpus_file("spectre_pht.isa"), opts, b), kExitOk);
    EXPECT_EQ(a.str(), b.str());
    const auto lines = json_lines(a.str());
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_TRUE(lines[0].at("trace").is_array());
    EXPECT_EQ(lines[1].at("end"), "halted");
    EXPECT_EQ(lines[1].at("traces"), 1);
}

TEST(Run, SpeculativeTraceSetHoldsTheLeak) {
    CommandOptions opts;
    opts.semantics = "spec";
    opts.predictors = {"br"};
    opts.depth = 40;
    opts.secrets = {"[0x104]=9"};
    std::ostringstream out;
    EXPECT_EQ(cmd_run(corpus_file("spectre_pht.isa"), opts, out), kExitOk);
    bool leak = false;
    for (const auto& line : json_lines(out.str())) {
        if (!line.contains("trace")) continue;
        const auto& t = line.at("trace");
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            leak |= t[i] == "DL(260)" && t[i + 1] == "DL(521)";
        }
    }
    EXPECT_TRUE(leak);
}

TEST(Run, RetpolineNeverFetchesTheGadget) {
    CommandOptions opts;
    opts.predictors = {"rsb,btb"};
    opts.btb_candidates = {"gadget"};
    const fs::path traces = scratch("retpoline.jsonl");
    opts.trace_out = traces.string();
    std::ostringstream summary;
    EXPECT_EQ(cmd_run(corpus_file("retpoline.isa"), opts, summary), kExitOk);
    const auto s = json_lines(summary.str());
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].at("semantics"), "spec(predictors=rsb,btb constraints=)");

    std::ifstream in(traces);
    std::stringstream body;
    body << in.rdbuf();
    const auto lines = json_lines(body.str());
    ASSERT_FALSE(lines.empty());
    std::set<std::string> fetched;
    for (const auto& line : lines) {
        for (const auto& o : line.at("trace")) {
            if (o.get<std::string>().rfind("IL(", 0) == 0) fetched.insert(o.get<std::string>());
        }
    }
    // a1, a2, a3, b1, b2 and target; the gadget sits at 24.
    EXPECT_EQ(fetched, (std::set<std::string>{"IL(0)", "IL(4)", "IL(8)", "IL(12)", "IL(16)", "IL(20)"}));
}

TEST(Check, ConditionalStoreIsMilInsecure) {
    CommandOptions opts;
    opts.property = "mil-ct";
    std::ostringstream out;
    EXPECT_EQ(cmd_check(corpus_file("spectre_ooo_cmov.isa"), opts, out), kExitOk);
    EXPECT_EQ(json::parse(out.str()).at("verdict"), "Insecure");
}

TEST(Check, FencedBoundsCheckIsSecure) {
    CommandOptions opts;
    opts.semantics = "spec";
    opts.predictors = {"br"};
    std::ostringstream out;
    EXPECT_EQ(cmd_check(corpus_file("spectre_pht_lfence.isa"), opts, out), kExitOk);
    EXPECT_EQ(json::parse(out.str()).at("verdict"), "Secure-up-to-depth");
    opts.ignore_fences = true;
    std::ostringstream ignored;
    cmd_check(corpus_file("spectre_pht_lfence.isa"), opts, ignored);
    EXPECT_EQ(json::parse(ignored.str()).at("verdict"), "Insecure");
}

TEST(Check, ConsistencyOfTheStoreChain) {
    CommandOptions opts;
    opts.property = "consistency";
    opts.samples = 50;
    opts.seed = 3;
    std::ostringstream out;
    EXPECT_EQ(cmd_check(corpus_file("store_chain.mil"), opts, out), kExitOk);
    const json j = json::parse(out.str());
    EXPECT_EQ(j.at("verdict"), "Consistent");
    EXPECT_EQ(j.at("seed"), 3);
}

TEST(Check, UnknownPropertyIsAnError) {
    CommandOptions opts;
    opts.property = "timing";
    std::ostringstream out;
    EXPECT_THROW(cmd_check(corpus_file("spectre_pht.isa"), opts, out), Error);
}

TEST(ProgramIo, ResolvesSymbolsAndObservations) {
    const LoadedProgram prog = load_program(corpus_file("spectre_pht.isa"));
    EXPECT_EQ(prog.resolve("A2+5"), 0x205u);
    EXPECT_EQ(prog.resolve("0x10"), 16u);
    EXPECT_EQ(prog.location("r0"), (Location{Resource::Reg, 0}));
    EXPECT_EQ(prog.location("[A1SIZE]"), (Location{Resource::Mem, 0x80}));
    EXPECT_EQ(prog.observation("DL(A1+4)"), Observation::dl(0x104));
    EXPECT_EQ(prog.assignment({}).at(Location{Resource::Mem, 0x104}), 5u);
    EXPECT_EQ(prog.assignment({"[0x104]=9"}).at(Location{Resource::Mem, 0x104}), 9u);
    EXPECT_TRUE(has_fence(load_program(corpus_file("spectre_pht_lfence.isa"))));
    EXPECT_FALSE(has_fence(prog));
    EXPECT_EQ(split_list({"a,b", " c ,", ""}), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ProgramIo, MalformedProgramIsAParseError) {
    const fs::path bad = scratch("bad.isa");
    std::ofstream(bad) << "a: jump nowhere\n";
    EXPECT_THROW(load_program(bad.string()), ParseError);
}

TEST(Corpus, EntriesAreSortedAndComplete) {
    const Corpus c = load_corpus(kCorpus);
    ASSERT_FALSE(c.entries.empty());
    for (std::size_t i = 1; i < c.entries.size(); ++i) EXPECT_LT(c.entries[i - 1].id, c.entries[i].id);
    for (const auto& e : c.entries) {
        EXPECT_TRUE(fs::exists(c.dir / e.file)) << e.file;
        EXPECT_FALSE(e.checks.empty()) << e.id;
    }
}

TEST(Corpus, VerifyIsStableAcrossWorkerCounts) {
    const fs::path dir = kCorpus;
    std::ostringstream one, many;
    EXPECT_EQ(cmd_corpus_verify(dir, {"spectre_pht", "stl", "store_chain"}, 1, one), kExitOk);
    EXPECT_EQ(cmd_corpus_verify(dir, {"spectre_pht", "stl", "store_chain"}, 4, many), kExitOk);
    EXPECT_EQ(one.str(), many.str());
}

TEST(Corpus, MismatchFailsTheRun) {
    const fs::path dir = scratch("corpus");
    fs::create_directories(dir);
    fs::copy_file(corpus_file("spectre_pht.isa"), dir / "spectre_pht.isa", fs::copy_options::overwrite_existing);
    std::ofstream(dir / "expectations.json")
        << R"({"schema": 1, "entries": [{"id": "wrong", "file": "spectre_pht.isa", "checks": [)"
        << R"({"kind": "ni", "semantics": "spec", "predictors": ["br"], "depth": 14, "expect": "Secure-up-to-depth"}]}]})";
    std::ostringstream out;
    EXPECT_EQ(cmd_corpus_verify(dir, {}, 1, out), kExitMismatch);
    EXPECT_NE(out.str().find("FAIL wrong"), std::string::npos);
    EXPECT_NE(out.str().find("0/1 corpus checks passed"), std::string::npos);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(invoke("--help").code, 0);
    EXPECT_EQ(invoke("").code, kExitParse);
    EXPECT_EQ(invoke("run " + corpus_file("spectre_pht.isa") + " --semantics sideways").code, kExitParse);
    const fs::path bad = scratch("bad_binary.isa");
    std::ofstream(bad) << "a: frobnicate r1\n";
    const Invocation parse = invoke("check " + bad.string());
    EXPECT_EQ(parse.code, kExitParse);
    EXPECT_NE(parse.out.find("parse error"), std::string::npos);
    const Invocation budget =
        invoke("run " + corpus_file("btb.isa") + " --semantics spec --predictor btb --depth 40 --max-nodes 50");
    EXPECT_EQ(budget.code, kExitBudget);
    EXPECT_EQ(invoke("corpus verify spectre_pht").code, kExitOk);
    EXPECT_EQ(invoke("corpus verify no_such_entry").code, kExitMismatch);
}

TEST(Binary, ConfigFileSetsPredictors) {
    const fs::path cfg = scratch("config.toml");
    std::ofstream(cfg) << "predictor = [\"br\"]\nconstraint = [\"lfence\"]\n";
    const Invocation r = invoke("--config " + cfg.string() + " check " + corpus_file("spectre_pht_lfence.isa"));
    EXPECT_EQ(r.code, kExitOk) << r.out;
    const json j = json::parse(r.out);
    EXPECT_EQ(j.at("semantics"), "spec(predictors=br constraints=lfence)");
    EXPECT_EQ(j.at("verdict"), "Secure-up-to-depth");
}

TEST(Binary, CorpusListShowsEveryEntry) {
    const Invocation r = invoke("corpus list");
    EXPECT_EQ(r.code, kExitOk);
    for (const auto& e : load_corpus(kCorpus).entries) EXPECT_NE(r.out.find(e.id), std::string::npos) << e.id;
}

}  // namespace
}  // namespace inspectre::cli
