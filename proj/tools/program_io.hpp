#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "inspectre/explore.hpp"
#include "inspectre/isa.hpp"
#include "inspectre/predictors.hpp"
#include "inspectre/security.hpp"

namespace inspectre::cli {

// A program file, `.isa` or `.mil`, with its policy and machine.
struct LoadedProgram {
    std::string path;
    std::optional<IsaProgram> isa;
    Scenario scenario;

    // Accepts numbers, ISA symbols and `symbol+offset`.
    Word resolve(std::string_view text) const;
    // `r3`, `z`, `[0x40]` or `[SYMBOL]`.
    Location location(std::string_view text) const;
    // `DL(A2+1)` style observation text.
    Observation observation(std::string_view text) const;
    // First candidate of every secret, overridden by `LOC=VALUE` entries.
    Assignment assignment(const std::vector<std::string>& overrides) const;
};

LoadedProgram load_program(const std::string& path);

// Semantics selection shared by the commands and the corpus.
struct AnalysisConfig {
    std::string semantics = "spec";
    std::vector<std::string> predictors;
    std::vector<std::string> constraints;
    unsigned rsb_capacity = 4;
    // Symbolic or numeric; empty means every code label.
    std::vector<std::string> btb_candidates;
    std::size_t depth = 40;
    // Adds the lfence constraint when the program contains a fence.
    bool honor_fences = true;

    Semantics build(const LoadedProgram& prog) const;
};

// Whether the program holds an lfence instruction or a fence-tagged micro.
bool has_fence(const LoadedProgram& prog);

// Splits comma-separated list arguments and drops empty items.
std::vector<std::string> split_list(const std::vector<std::string>& items);

}  // namespace inspectre::cli
