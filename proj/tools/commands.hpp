#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace inspectre::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitMismatch = 1,
    kExitParse = 2,
    kExitBudget = 3,
};

// Options shared by `run` and `check`; also settable from a config file.
struct CommandOptions {
    // inorder, ooo or spec; empty picks spec when predictors or
    // constraints are given and ooo otherwise.
    std::string semantics;
    std::vector<std::string> predictors;
    std::vector<std::string> constraints;
    unsigned rsb_capacity = 4;
    std::vector<std::string> btb_candidates;
    bool ignore_fences = false;
    // LOC=VALUE choices for the secret locations of `run`.
    std::vector<std::string> secrets;
    std::optional<std::size_t> depth;
    std::size_t max_nodes = 2'000'000;
    std::string trace_out;
    std::string property = "ni";
    std::size_t samples = 100;
    std::optional<std::uint64_t> seed;
};

// Explores one initial state and writes its maximal traces as JSON lines,
// followed by a summary line.
int cmd_run(const std::string& file, const CommandOptions& opts, std::ostream& out);

// Prints the verdict JSON of the selected property.
int cmd_check(const std::string& file, const CommandOptions& opts, std::ostream& out);

int cmd_corpus_list(const std::filesystem::path& dir, std::ostream& out);

// Exit code 1 when any check disagrees with its expectation.
int cmd_corpus_verify(const std::filesystem::path& dir, const std::vector<std::string>& only, unsigned jobs,
                      std::ostream& out);

}  // namespace inspectre::cli
