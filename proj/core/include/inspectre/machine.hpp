#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "inspectre/isa.hpp"
#include "inspectre/micro.hpp"
#include "inspectre/mil_text.hpp"

namespace inspectre {

// Source of instruction translations.  Code is not self-modifying, so a
// translation depends only on the address and the instruction index.
class CodeSource {
public:
    virtual ~CodeSource() = default;
    // Throws UndecodableAddress.
    virtual BlockPtr decode(Word pc, std::uint32_t instr) const = 0;
};

class IsaCodeSource final : public CodeSource {
public:
    explicit IsaCodeSource(IsaProgram prog) : prog_(std::move(prog)) {}
    BlockPtr decode(Word pc, std::uint32_t instr) const override;
    const IsaProgram& program() const { return prog_; }

private:
    IsaProgram prog_;
};

// Templates named t_1, t_2, ... that are renamed on fetch.
class TemplateCodeSource final : public CodeSource {
public:
    explicit TemplateCodeSource(std::map<Word, std::vector<Micro>> templates)
        : templates_(std::move(templates)) {}
    BlockPtr decode(Word pc, std::uint32_t instr) const override;

private:
    std::map<Word, std::vector<Micro>> templates_;
};

// Fixed per-program context shared by all states of an exploration.
class Machine {
public:
    Machine(std::shared_ptr<const CodeSource> code, Word mask, std::vector<Word> footprint,
            std::vector<Word> code_labels);

    Word mask() const { return mask_; }
    const std::vector<Word>& footprint() const { return footprint_; }
    const std::vector<Word>& code_labels() const { return code_labels_; }
    const CodeSource& code() const { return *code_; }

    // Translation of `pc` as instruction `instr`.  Undecodable addresses
    // yield a terminal block holding a single halt-tagged micro.
    BlockPtr fetch(Word pc, std::uint32_t instr) const;

private:
    std::shared_ptr<const CodeSource> code_;
    Word mask_;
    std::vector<Word> footprint_;
    std::vector<Word> code_labels_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<Word, std::uint32_t>, BlockPtr> cache_;
};

using MachinePtr = std::shared_ptr<const Machine>;

// Values placed in the bootstrap instruction.
struct BootImage {
    std::map<Word, Word> regs;
    std::map<Word, Word> mem;
    std::optional<Word> entry;
    // Instructions already decoded from `entry` onwards.  When present the
    // bootstrap PC store starts out fetched.
    std::vector<std::vector<Micro>> decoded;
};

MachinePtr make_machine(const IsaProgram& prog);
MachinePtr make_machine(const MilProgram& prog);

BootImage boot_image(const IsaProgram& prog);
BootImage boot_image(const MilProgram& prog);

}  // namespace inspectre
