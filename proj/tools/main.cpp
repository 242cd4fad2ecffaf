#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "inspectre/errors.hpp"

#ifndef INSPECTRE_CORPUS_DIR
#define INSPECTRE_CORPUS_DIR "corpus"
#endif

int main(int argc, char** argv) {
    using namespace inspectre::cli;

    CLI::App app{"Explore and check in-order, out-of-order and speculative executions of toy programs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML file setting predictor, constraint, rsb_capacity, btb_candidates");

    CommandOptions opts;
    app.add_option("--semantics", opts.semantics, "inorder, ooo or spec")
        ->check(CLI::IsMember({"inorder", "ooo", "spec"}));
    app.add_option("--predictor,--predictors,--pred", opts.predictors, "br, btb, rsb, rsb_btb, stl, stld (comma list)")
        ->delimiter(',');
    app.add_option("--constraint,--constraints", opts.constraints, "fetch_only, lfence, ssbs (comma list)")
        ->delimiter(',');
    app.add_option("--rsb-capacity,--rsb_capacity", opts.rsb_capacity, "Return stack buffer entries");
    app.add_option("--btb-candidates,--btb_candidates", opts.btb_candidates,
                   "Indirect jump targets guessed by btb (labels or numbers)")
        ->delimiter(',');
    app.add_flag("--ignore-fences", opts.ignore_fences, "Do not add the lfence constraint for programs with fences");
    app.add_option("--depth", opts.depth, "Transition bound (in-order fuel for run/isa-ct/mil-ct)");
    app.add_option("--max-nodes", opts.max_nodes, "State budget before giving up with exit code 3");
    app.add_option("--secret", opts.secrets, "LOC=VALUE for a secret location (run, consistency)");

    std::string file;
    auto* run = app.add_subcommand("run", "Write the traces of one initial state as JSON lines");
    run->add_option("file", file, "Program (.isa or .mil)")->required()->check(CLI::ExistingFile);
    run->add_option("--trace-out", opts.trace_out, "Trace file (default: standard output)");

    auto* check = app.add_subcommand("check", "Print the verdict of a security or consistency property");
    check->add_option("file", file, "Program (.isa or .mil)")->required()->check(CLI::ExistingFile);
    check->add_option("--property", opts.property, "ni, isa-ct, mil-ct or consistency")
        ->check(CLI::IsMember({"ni", "isa-ct", "mil-ct", "consistency"}));
    check->add_option("--samples", opts.samples, "Sampled schedules for consistency");
    check->add_option("--seed", opts.seed, "PRNG seed (default: INSPECTRE_SEED or 1)");

    std::string corpus_dir = INSPECTRE_CORPUS_DIR;
    unsigned jobs = 0;
    std::vector<std::string> only;
    auto* corpus = app.add_subcommand("corpus", "List or verify the bundled attack corpus");
    corpus->require_subcommand(1);
    corpus->add_option("--dir", corpus_dir, "Corpus directory holding expectations.json");
    auto* list = corpus->add_subcommand("list", "List corpus entries");
    auto* verify = corpus->add_subcommand("verify", "Run every entry and compare with its expectations");
    verify->add_option("--jobs", jobs, "Worker threads (default: hardware threads)");
    verify->add_option("ids", only, "Only verify these entry ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    try {
        if (*run) return cmd_run(file, opts, std::cout);
        if (*check) return cmd_check(file, opts, std::cout);
        if (*list) return cmd_corpus_list(corpus_dir, std::cout);
        if (*verify) return cmd_corpus_verify(corpus_dir, only, jobs, std::cout);
    } catch (const inspectre::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const inspectre::ExplosionBudgetExceeded& e) {
        std::cerr << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    }
    return kExitOk;
}
