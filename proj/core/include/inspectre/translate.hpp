#pragma once

#include <string>
#include <vector>

#include "inspectre/isa.hpp"
#include "inspectre/micro.hpp"

namespace inspectre {

// Translates the instruction at `addr`; every produced name has
// instruction index `after.instr + 1`.  Throws UndecodableAddress.
BlockPtr translate(const IsaProgram& prog, Word addr, Name after);

// Translation of a single instruction with instruction index `instr`.
BlockPtr translate_instruction(const Instruction& ins, std::uint32_t instr, Word mask);

enum class ViolationKind : std::uint8_t {
    DuplicateName,     // two micros bind the same name
    ForwardReference,  // a free name is not smaller than the bound one
    StaleName,         // a name is not greater than the translation bound
    PcLoadAfterStore,  // a PC load follows a PC store
    PcNameUsed,        // a PC store's name is read inside the instruction
    NonUniquePcStore,  // some guard valuation enables zero or several PC stores
};

const char* violation_name(ViolationKind k);

struct Violation {
    ViolationKind kind;
    Name at;
    std::string detail;
};

// Naming discipline of a translation produced after `after`.
std::vector<Violation> check_translation_properties(const std::vector<Micro>& micros, Name after);

// Structural wellformedness of one instruction's micros.  Guards are
// checked by enumerating valuations of their free names over a small
// domain built from 0, 1, 2 and the literals in the guards.  Instructions
// tagged halt are terminal and need no PC store.
std::vector<Violation> check_translation_wellformed(const std::vector<Micro>& micros);

}  // namespace inspectre
