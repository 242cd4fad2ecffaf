#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "inspectre/micro.hpp"

namespace inspectre {

enum class Opcode : std::uint8_t {
    Loadi,
    Mov,
    Add,
    Sub,
    Addi,
    Andi,
    SetLt,
    SetGe,
    SetEq,
    SetNe,
    Load,
    Store,
    Beq,
    Blt,
    Cmov,
    Csel,
    Jmp,
    Jmpi,
    Cjmpi,
    Call,
    Ret,
    Lfence,
    Halt,
};

const char* opcode_name(Opcode op);
std::optional<Opcode> opcode_from(std::string_view text);
// Every opcode of the toy ISA, in declaration order.
const std::vector<Opcode>& all_opcodes();

constexpr Word kInstrStride = 4;

// Registers r0..r15 plus the stack pointer and the two flag registers.
constexpr unsigned kRegSp = 16;
constexpr unsigned kRegZ = 17;
constexpr unsigned kRegF = 18;
constexpr unsigned kRegCount = 19;

std::optional<unsigned> register_id(std::string_view text);
std::string register_name(unsigned id);

// Operand syntax: numbers, symbols, registers, `[...]` dereferences and
// `+ - &` combinations.
struct IsaExpr;
using IsaExprPtr = std::shared_ptr<const IsaExpr>;

struct IsaExpr {
    enum class Kind : std::uint8_t { Num, Reg, Deref, Add, Sub, And };
    Kind kind = Kind::Num;
    Word value = 0;       // Num: resolved value
    std::string symbol;   // Num: symbol it was written as, if any
    unsigned reg = 0;     // Reg
    IsaExprPtr lhs, rhs;  // Deref uses lhs only

    static IsaExprPtr num(Word v, std::string symbol = {});
    static IsaExprPtr reg_ref(unsigned r);
    static IsaExprPtr deref(IsaExprPtr inner);
    static IsaExprPtr combine(Kind k, IsaExprPtr a, IsaExprPtr b);

    bool is_constant() const;
    std::optional<Word> constant_value(Word mask) const;
};

bool same_expr(const IsaExprPtr& a, const IsaExprPtr& b);
std::string to_string(const IsaExprPtr& e);

struct Instruction {
    Opcode op = Opcode::Halt;
    std::vector<IsaExprPtr> args;
    Word addr = 0;
    std::size_t line = 0;
};

std::string to_string(const Instruction& ins);

struct ArrayDecl {
    std::string name;
    Word base = 0;
    Word size = 0;
    std::vector<Word> values;
};

// A register or memory cell of the initial state.
struct Location {
    Resource res = Resource::Mem;
    Word where = 0;

    auto operator<=>(const Location&) const = default;
};

std::string to_string(const Location& loc);

struct SecretDecl {
    Location loc;
    std::vector<Word> candidates;
};

class IsaProgram {
public:
    unsigned width = 64;
    std::optional<Word> entry;
    std::map<Word, Instruction> code;
    std::map<std::string, Word> labels;
    std::vector<ArrayDecl> arrays;
    std::map<unsigned, Word> reg_init;
    std::vector<SecretDecl> secrets;
    std::vector<Location> publics;

    Word mask() const;
    Word entry_point() const;
    const Instruction* at(Word addr) const;
    std::optional<Word> symbol(const std::string& name) const;
    // Name used when printing `value`, preferring labels then arrays.
    std::optional<std::string> symbol_for(Word value) const;

    // Initial memory: declared arrays plus every constant address named
    // by an operand or a secret annotation.
    std::map<Word, Word> memory_footprint() const;
    // Initial registers: every register mentioned by code or
    // annotations, with declared values.
    std::map<unsigned, Word> register_footprint() const;
    std::vector<Word> code_labels() const;
};

IsaProgram parse_isa(std::string_view text);
IsaProgram load_isa_file(const std::string& path);
std::string print_isa(const IsaProgram& prog);
bool same_program(const IsaProgram& a, const IsaProgram& b);

}  // namespace inspectre
