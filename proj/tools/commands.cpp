#include "commands.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "corpus.hpp"
#include "inspectre/consistency.hpp"
#include "inspectre/errors.hpp"
#include "inspectre/inorder.hpp"
#include "program_io.hpp"

namespace inspectre::cli {

namespace {

using nlohmann::ordered_json;

AnalysisConfig analysis_of(const CommandOptions& opts, std::size_t default_depth) {
    AnalysisConfig c;
    c.predictors = split_list(opts.predictors);
    c.constraints = split_list(opts.constraints);
    c.semantics = opts.semantics;
    if (c.semantics.empty()) c.semantics = c.predictors.empty() && c.constraints.empty() ? "ooo" : "spec";
    c.rsb_capacity = opts.rsb_capacity;
    c.btb_candidates = split_list(opts.btb_candidates);
    c.depth = opts.depth.value_or(default_depth);
    c.honor_fences = !opts.ignore_fences;
    return c;
}

ordered_json trace_json(const Trace& t) {
    ordered_json arr = ordered_json::array();
    for (Observation o : t) arr.push_back(to_string(o));
    return arr;
}

}  // namespace

int cmd_run(const std::string& file, const CommandOptions& opts, std::ostream& out) {
    const LoadedProgram prog = load_program(file);
    const AnalysisConfig cfg = analysis_of(opts, opts.semantics == "inorder" ? 1000 : 40);
    const Semantics sem = cfg.build(prog);
    const Assignment secrets = prog.assignment(opts.secrets);
    const OooState init = prog.scenario.initial(secrets);

    std::vector<Trace> traces;
    ordered_json summary;
    summary["schema"] = 1;
    summary["file"] = file;
    summary["semantics"] = sem.describe();
    summary["depth"] = cfg.depth;
    summary["secrets"] = to_string(secrets);
    if (sem.kind == SemanticsKind::InOrder) {
        const InOrderRun run = run_inorder(init, cfg.depth, false);
        traces.push_back(run.trace());
        summary["end"] = run_end_name(run.end);
        summary["steps"] = run.params.size();
    } else {
        ExploreLimits limits;
        limits.depth = cfg.depth;
        limits.max_nodes = opts.max_nodes;
        ExploreStats stats;
        traces = trace_set(init, sem, limits, &stats).maximal();
        summary["states"] = stats.nodes;
        summary["transitions"] = stats.transitions;
        summary["truncated"] = stats.truncated;
    }
    summary["traces"] = traces.size();

    std::ofstream file_out;
    std::ostream* trace_stream = &out;
    if (!opts.trace_out.empty()) {
        file_out.open(opts.trace_out);
        if (!file_out) throw Error("cannot write " + opts.trace_out);
        trace_stream = &file_out;
    }
    for (const auto& t : traces) *trace_stream << ordered_json{{"trace", trace_json(t)}}.dump() << "\n";
    out << summary.dump() << "\n";
    return kExitOk;
}

int cmd_check(const std::string& file, const CommandOptions& opts, std::ostream& out) {
    const LoadedProgram prog = load_program(file);
    if (opts.property == "ni") {
        const AnalysisConfig cfg = analysis_of(opts, 40);
        NiOptions ni;
        ni.limits.depth = cfg.depth;
        ni.limits.max_nodes = opts.max_nodes;
        out << check_conditional_ni(prog.scenario, cfg.build(prog), ni).to_json() << "\n";
    } else if (opts.property == "isa-ct") {
        out << check_isa_constant_time(prog.scenario, opts.depth.value_or(400)).to_json() << "\n";
    } else if (opts.property == "mil-ct") {
        out << check_mil_constant_time(prog.scenario, opts.depth.value_or(400)).to_json() << "\n";
    } else if (opts.property == "consistency") {
        const AnalysisConfig cfg = analysis_of(opts, 200);
        ConsistencyOptions c;
        c.depth = cfg.depth;
        c.samples = opts.samples;
        c.seed = opts.seed ? *opts.seed : seed_from_env(1);
        out << check_memory_consistency(prog.scenario.initial(prog.assignment(opts.secrets)), cfg.build(prog), c)
                   .to_json()
            << "\n";
    } else {
        throw Error("unknown property '" + opts.property + "' (expected ni, isa-ct, mil-ct or consistency)");
    }
    return kExitOk;
}

int cmd_corpus_list(const std::filesystem::path& dir, std::ostream& out) {
    const Corpus corpus = load_corpus(dir);
    for (const auto& e : corpus.entries) {
        out << e.id << "  " << e.file << "  " << e.checks.size() << " checks";
        if (!e.description.empty()) out << "  " << e.description;
        out << "\n";
    }
    return kExitOk;
}

int cmd_corpus_verify(const std::filesystem::path& dir, const std::vector<std::string>& only, unsigned jobs,
                      std::ostream& out) {
    Corpus corpus = load_corpus(dir);
    if (!only.empty()) {
        std::erase_if(corpus.entries, [&](const CorpusEntry& e) {
            return std::find(only.begin(), only.end(), e.id) == only.end();
        });
        if (corpus.entries.empty()) throw Error("no corpus entry matches the requested ids");
    }
    std::size_t failed = 0;
    const auto outcomes = verify_corpus(corpus, jobs);
    for (const auto& o : outcomes) {
        if (!o.pass) ++failed;
        out << (o.pass ? "PASS " : "FAIL ") << o.entry << ": " << o.label << " -- " << o.detail << "\n";
    }
    out << outcomes.size() - failed << "/" << outcomes.size() << " corpus checks passed\n";
    return failed == 0 ? kExitOk : kExitMismatch;
}

}  // namespace inspectre::cli
