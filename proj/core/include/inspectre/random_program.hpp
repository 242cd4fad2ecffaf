#pragma once

#include <cstddef>
#include <random>
#include <string>

#include "inspectre/isa.hpp"

namespace inspectre {

struct RandomProgramOptions {
    // Instruction count including the final halt.
    std::size_t max_instructions = 6;
    // Declare one secret location with two candidate values.
    bool with_secret = true;
    bool allow_branches = true;
    bool allow_fences = true;
};

// Toy-ISA source of a small terminating program.  Memory accesses stay
// inside a four-cell array, indexed by constants or by r8, which only
// ever holds 0..3.  Branches and jumps only go forward.
std::string random_program_text(std::mt19937_64& rng, const RandomProgramOptions& opts = {});

IsaProgram random_program(std::mt19937_64& rng, const RandomProgramOptions& opts = {});

}  // namespace inspectre
