#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inspectre/machine.hpp"
#include "inspectre/micro.hpp"

namespace inspectre {

struct Observation {
    enum class Kind : std::uint8_t { Silent, DL, DS, IL };
    Kind kind = Kind::Silent;
    Word value = 0;

    static Observation silent() { return {}; }
    static Observation dl(Word v) { return {Kind::DL, v}; }
    static Observation ds(Word v) { return {Kind::DS, v}; }
    static Observation il(Word v) { return {Kind::IL, v}; }

    bool is_silent() const { return kind == Kind::Silent; }
    auto operator<=>(const Observation&) const = default;
};

std::string to_string(Observation o);

using Trace = std::vector<Observation>;

std::string to_string(const Trace& t);

// One decoded instruction and the PC store whose fetch produced it.
struct InstrSlot {
    BlockPtr block;
    std::optional<Name> producer;
};

// (I, s, C, F).  Instruction indices are contiguous: instrs[i] holds the
// micros named (i, *), with index 0 the bootstrap.
class OooState {
public:
    MachinePtr machine;
    std::vector<InstrSlot> instrs;
    Storage s;
    NameSet committed;
    NameSet fetched;

    const Micro* find(Name n) const;
    const Micro& at(Name n) const;  // throws NotInProgram
    bool contains(Name n) const { return find(n) != nullptr; }
    Name max_name() const;
    std::size_t micro_count() const;
    Word mask() const { return machine->mask(); }

    std::optional<Word> value(Name n) const;
    std::optional<Word> eval(const Expr& e) const;
    std::optional<Word> eval(const Expr& e, const Storage& over) const;
    // Guard truth value, absent when undefined.
    std::optional<bool> guard(const Micro& m) const;
    std::optional<bool> guard(const Micro& m, const Storage& over) const;

    template <class F>
    void for_each_micro(F&& f) const {
        for (const auto& slot : instrs) {
            for (const auto& m : slot.block->micros) f(m);
        }
    }

    std::size_t hash() const;
    friend bool operator==(const OooState& a, const OooState& b);
};

using StoreSet = std::vector<const Micro*>;

NameSet bound_names(const StoreSet& stores);

// Earlier same-resource stores that may determine the resource accessed
// by `t`.  Throws NotAMemoryOp for internal operations and NotInProgram
// for unbound names.  The storage overload evaluates against `over`.
StoreSet str_may(const OooState& st, Name t);
StoreSet str_may(const OooState& st, const Storage& over, Name t);
// Members of str_may not overwritten by a later member with a true guard
// writing the accessed address or the member's address.
StoreSet str_act(const OooState& st, Name t);
StoreSet str_act(const OooState& st, const Storage& over, Name t);

struct Denotation {
    Word value;
    Observation obs;
};

std::optional<Denotation> denote(const OooState& st, Name t);
std::optional<Denotation> denote(const OooState& st, const Storage& over, Name t);

enum class Rule : std::uint8_t { Exe, Cmt, Ftc };

const char* rule_name(Rule r);

struct StepParam {
    Rule rule = Rule::Exe;
    Name name;
    // Cmt: the committed address and value.  Exe: the computed value.
    // Ftc: the fetched address in `addr`.
    Word addr = 0;
    Word value = 0;
    // Ftc: the newly decoded instruction.
    BlockPtr decoded;

    friend bool operator==(const StepParam& a, const StepParam& b);
};

std::string to_string(const StepParam& p);

// Individual rule premises; each returns the step parameter when `t`
// may take the rule.  `ignore_siblings` drops PC stores of t's own
// instruction from the Ftc ordering check.
std::optional<StepParam> exe_premise(const OooState& st, Name t);
std::optional<StepParam> cmt_premise(const OooState& st, Name t);
std::optional<StepParam> ftc_premise(const OooState& st, Name t, bool ignore_siblings = false);

std::vector<StepParam> enabled(const OooState& st);

struct StepResult {
    OooState state;
    Observation obs;
    StepParam param;
};

// Throws RuleNotEnabled.
StepResult step(const OooState& st, const StepParam& p);

// Applies a step whose premise has already been established.
StepResult apply_step(const OooState& st, const StepParam& p);

// Throws NotAStep.
StepParam step_param(const OooState& before, const OooState& after);

// Bootstrap instruction 0 with one executed store per register and memory
// cell (memory stores committed) and, when an entry is given, an executed
// PC store of it.  The entry is fetched by the first Ftc step unless the
// image already lists decoded instructions.
OooState initial_state(MachinePtr machine, const BootImage& image);

std::string dump_state(const OooState& st);

}  // namespace inspectre

template <>
struct std::hash<inspectre::OooState> {
    std::size_t operator()(const inspectre::OooState& s) const noexcept { return s.hash(); }
};
