#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "inspectre/micro.hpp"

namespace inspectre {

// Hand-written MIL: a boot image plus optionally already-decoded
// instructions and micro templates for addresses reachable by fetch.
//
//   .width 64
//   .reg z 1          initial register value (name or number)
//   .mem 16 0         initial memory cell
//   .pc 32            initial program counter
//   t1_1 : true ? ld R z
//   t1_2 : (t1_1 = 1) ? st PC 40 @ijmp
//   .code 36          template fetched at address 36; names use t_J
//   t_1 : true ? 0
//   .end
struct MilProgram {
    unsigned width = 64;
    std::map<Word, Word> regs;
    std::map<Word, Word> mem;
    std::optional<Word> pc;
    std::vector<Micro> micros;
    std::map<Word, std::vector<Micro>> code;

    Word mask() const;
    // Decoded micros grouped by instruction index (1, 2, ...).
    std::vector<std::vector<Micro>> decoded_blocks() const;
};

MilProgram parse_mil(std::string_view text);
MilProgram load_mil_file(const std::string& path);
std::string print_mil(const MilProgram& prog);
bool same_program(const MilProgram& a, const MilProgram& b);

// Single micro in `.mil` line syntax.  Template names (`t_J`) take
// instruction index `template_instr`.
Micro parse_micro_line(std::string_view line, std::uint32_t template_instr = 0);

}  // namespace inspectre
