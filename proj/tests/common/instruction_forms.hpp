#pragma once

#include <string>
#include <vector>

#include "inspectre/isa.hpp"

namespace inspectre::testing {

// One program per opcode and operand-form combination: the instruction
// under test at address 0 followed by labelled halts used as jump targets.
struct InstructionForm {
    Opcode op;
    std::string text;
    IsaProgram program;
};

// Every opcode with every operand form its shape admits (registers,
// constants, direct, indexed and nested memory operands, and the optional
// trailing operand present or absent).
std::vector<InstructionForm> all_instruction_forms();

}  // namespace inspectre::testing
