#include "corpus.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include "inspectre/consistency.hpp"
#include "inspectre/errors.hpp"
#include "inspectre/inorder.hpp"
#include "program_io.hpp"

namespace inspectre::cli {

namespace {

using nlohmann::json;

AnalysisConfig config_of(const json& params) {
    AnalysisConfig c;
    c.semantics = params.value("semantics", "spec");
    c.predictors = params.value("predictors", std::vector<std::string>{});
    c.constraints = params.value("constraints", std::vector<std::string>{});
    c.rsb_capacity = params.value("rsb_capacity", 4u);
    c.btb_candidates = params.value("btb_candidates", std::vector<std::string>{});
    c.depth = params.value("depth", std::size_t{40});
    c.honor_fences = !params.value("ignore_fences", false);
    return c;
}

std::string describe(const AnalysisConfig& c) {
    std::string out = c.semantics;
    if (c.semantics == "spec") {
        std::string parts;
        for (const auto& p : c.predictors) parts += (parts.empty() ? "" : ",") + p;
        for (const auto& k : c.constraints) parts += (parts.empty() ? "" : ",") + ("+" + k);
        out += "[" + parts + "]";
    }
    return out;
}

std::string default_label(const std::string& kind, const json& params) {
    if (kind == "isa-ct" || kind == "mil-ct") return kind;
    std::string label = kind + " " + describe(config_of(params));
    if (params.contains("observe")) label += " " + params["observe"].get<std::string>();
    if (params.contains("depth")) label += " depth " + std::to_string(params["depth"].get<std::size_t>());
    if (params.contains("secrets")) label += " " + params["secrets"].dump();
    return label;
}

Trace observations(const LoadedProgram& prog, const json& list) {
    Trace out;
    for (const auto& item : list) out.push_back(prog.observation(item.get<std::string>()));
    return out;
}

bool contains_run(const Trace& hay, const Trace& needle) {
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

Assignment assignment_of(const LoadedProgram& prog, const json& params) {
    std::vector<std::string> overrides;
    if (params.contains("secrets")) {
        for (const auto& [loc, value] : params["secrets"].items()) {
            overrides.push_back(loc + "=" + (value.is_string() ? value.get<std::string>() : value.dump()));
        }
    }
    return prog.assignment(overrides);
}

void expect_verdict(CheckOutcome& out, const std::string& expected, const std::string& got, const std::string& json_text) {
    out.pass = expected == got;
    out.detail = out.pass ? got : "expected " + expected + ", got " + json_text;
}

void run_ni(const LoadedProgram& prog, const json& params, CheckOutcome& out) {
    const AnalysisConfig cfg = config_of(params);
    NiOptions opts;
    opts.limits.depth = cfg.depth;
    const Verdict v = check_conditional_ni(prog.scenario, cfg.build(prog), opts);
    expect_verdict(out, params.at("expect").get<std::string>(), v.verdict_name(), v.to_json());
    if (!out.pass || !params.contains("witness_contains")) return;
    const Trace needle = observations(prog, params["witness_contains"]);
    if (!v.witness || !contains_run(*v.witness, needle)) {
        out.pass = false;
        out.detail = "witness lacks " + to_string(needle) + ": " + v.to_json();
        return;
    }
    out.detail += " with witness " + to_string(*v.witness);
}

void run_ct(const LoadedProgram& prog, const std::string& kind, const json& params, CheckOutcome& out) {
    const std::size_t fuel = params.value("fuel", std::size_t{400});
    const Verdict v = kind == "isa-ct" ? check_isa_constant_time(prog.scenario, fuel)
                                       : check_mil_constant_time(prog.scenario, fuel);
    expect_verdict(out, params.at("expect").get<std::string>(), v.verdict_name(), v.to_json());
}

void run_reach(const LoadedProgram& prog, const json& params, CheckOutcome& out) {
    const AnalysisConfig cfg = config_of(params);
    const Trace pattern = observations(prog, params.at("pattern"));
    ExploreLimits limits;
    limits.depth = cfg.depth;
    const TraceTrie traces = trace_set(prog.scenario.initial(assignment_of(prog, params)), cfg.build(prog), limits);
    const auto hit = traces.find([&](const Trace& t) {
        return t.size() >= pattern.size() && std::equal(pattern.rbegin(), pattern.rend(), t.rbegin());
    });
    const bool expected = params.value("expect", true);
    out.pass = hit.has_value() == expected;
    out.detail = hit ? "reached by " + to_string(*hit) : "no trace contains " + to_string(pattern);
    if (!out.pass) out.detail = std::string(expected ? "expected reachable: " : "expected unreachable: ") + out.detail;
}

void run_observations(const LoadedProgram& prog, const json& params, CheckOutcome& out) {
    const AnalysisConfig cfg = config_of(params);
    const Observation::Kind kind = prog.observation(params.at("observe").get<std::string>() + "(0)").kind;
    std::set<Word> allowed;
    for (const auto& a : params.at("allowed")) allowed.insert(prog.resolve(a.get<std::string>()));
    const OooState init = prog.scenario.initial(assignment_of(prog, params));
    for (Observation o : run_inorder(init, 4 * cfg.depth + 400, false).trace()) {
        if (o.kind == kind) allowed.insert(o.value);
    }
    ExploreLimits limits;
    limits.depth = cfg.depth;
    const TraceTrie traces = trace_set(init, cfg.build(prog), limits);
    std::set<Word> seen;
    for (auto n : traces.breadth_first()) {
        if (n == traces.root()) continue;
        const Trace t = traces.trace(n);
        if (t.back().kind == kind) seen.insert(t.back().value);
    }
    std::vector<Word> extra;
    std::set_difference(seen.begin(), seen.end(), allowed.begin(), allowed.end(), std::back_inserter(extra));
    out.pass = extra.empty();
    std::string listed;
    for (Word w : (extra.empty() ? std::vector<Word>(seen.begin(), seen.end()) : extra)) {
        listed += (listed.empty() ? "" : " ") + std::to_string(w);
    }
    out.detail = extra.empty() ? "observed only {" + listed + "}" : "unexpected addresses {" + listed + "}";
}

void run_consistency(const LoadedProgram& prog, const json& params, CheckOutcome& out) {
    AnalysisConfig cfg = config_of(params);
    ConsistencyOptions opts;
    opts.depth = params.value("depth", std::size_t{200});
    opts.samples = params.value("samples", std::size_t{100});
    opts.seed = params.value("seed", std::uint64_t{1});
    const PropertyVerdict v = check_memory_consistency(prog.scenario.initial(), cfg.build(prog), opts);
    out.pass = v.ok;
    out.detail = v.ok ? std::to_string(v.cases) + " sampled runs consistent" : v.counterexample;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir) {
    const auto path = dir / "expectations.json";
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
    if (doc.value("schema", 0) != 1) throw Error(path.string() + ": unsupported schema");
    Corpus corpus{dir, {}};
    for (const auto& e : doc.at("entries")) {
        CorpusEntry entry{e.at("id").get<std::string>(), e.at("file").get<std::string>(),
                          e.value("description", ""), {}};
        for (auto c : e.at("checks")) {
            if (!c.contains("depth") && e.contains("depth")) c["depth"] = e["depth"];
            const std::string kind = c.at("kind").get<std::string>();
            entry.checks.push_back({kind, c.value("label", default_label(kind, c)), c});
        }
        corpus.entries.push_back(std::move(entry));
    }
    std::sort(corpus.entries.begin(), corpus.entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) { return a.id < b.id; });
    return corpus;
}

std::vector<CheckOutcome> verify_entry(const Corpus& corpus, const CorpusEntry& entry) {
    std::vector<CheckOutcome> outcomes;
    std::optional<LoadedProgram> prog;
    std::string load_error;
    try {
        prog = load_program((corpus.dir / entry.file).string());
    } catch (const std::exception& e) {
        load_error = e.what();
    }
    for (const auto& check : entry.checks) {
        CheckOutcome out{entry.id, check.label};
        const auto start = std::chrono::steady_clock::now();
        try {
            if (!prog) throw Error(load_error);
            if (check.kind == "ni") {
                run_ni(*prog, check.params, out);
            } else if (check.kind == "isa-ct" || check.kind == "mil-ct") {
                run_ct(*prog, check.kind, check.params, out);
            } else if (check.kind == "reach") {
                run_reach(*prog, check.params, out);
            } else if (check.kind == "observations") {
                run_observations(*prog, check.params, out);
            } else if (check.kind == "consistency") {
                run_consistency(*prog, check.params, out);
            } else {
                throw Error("unknown check kind '" + check.kind + "'");
            }
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = e.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

std::vector<CheckOutcome> verify_corpus(const Corpus& corpus, unsigned jobs) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<CheckOutcome>> per_entry(corpus.entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < corpus.entries.size();) per_entry[i] = verify_entry(corpus, corpus.entries[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < std::min<std::size_t>(jobs, corpus.entries.size()); ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::vector<CheckOutcome> all;
    for (auto& v : per_entry) all.insert(all.end(), v.begin(), v.end());
    return all;
}

}  // namespace inspectre::cli
