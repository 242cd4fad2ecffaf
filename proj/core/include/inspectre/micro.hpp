#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "inspectre/expr.hpp"

namespace inspectre {

enum class Resource : std::uint8_t { Pc, Reg, Mem };
enum class MicroKind : std::uint8_t { Internal, Load, Store };

// Metadata attached by the translation so predictors and scheduling
// constraints can recognise particular control-flow updates.
enum MicroTag : std::uint8_t {
    kTagNone = 0,
    kTagIndirectJump = 1 << 0,
    kTagCall = 1 << 1,
    kTagReturn = 1 << 2,
    kTagFence = 1 << 3,
    kTagHalt = 1 << 4,
    kTagReturnAddress = 1 << 5,
};

const char* resource_name(Resource r);

// `guard ? name <- op`.  Internal operations keep their expression in
// `value`; loads use `addr`; stores use `addr` and `value`.  Program
// counter accesses carry no address.
struct Micro {
    Name name;
    Expr guard = Expr::lit(1);
    MicroKind kind = MicroKind::Internal;
    Resource res = Resource::Reg;
    Expr addr;
    Expr value;
    std::uint8_t tags = kTagNone;
    // For the program counter store of a call: the store saving the
    // return address.
    Name link{};

    bool is_internal() const { return kind == MicroKind::Internal; }
    bool is_load() const { return kind == MicroKind::Load; }
    bool is_store() const { return kind == MicroKind::Store; }
    bool is_load(Resource r) const { return is_load() && res == r; }
    bool is_store(Resource r) const { return is_store() && res == r; }
    bool has_addr() const { return !is_internal() && res != Resource::Pc; }
    bool has_tag(MicroTag t) const { return (tags & t) != 0; }

    NameSet free_names() const;
    NameSet op_names() const;

    friend bool operator==(const Micro& a, const Micro& b);
};

std::string to_string(const Micro& m);
std::string to_string(const Micro& m, const std::function<std::string(Name)>& show);

// Translation of one instruction.  Micro indices start at 1 and are
// contiguous, so micros[j - 1].name == Name{instr, j}.
struct Block {
    Word pc = 0;
    std::uint32_t instr = 0;
    std::vector<Micro> micros;
    std::string text;
};

using BlockPtr = std::shared_ptr<const Block>;

}  // namespace inspectre
