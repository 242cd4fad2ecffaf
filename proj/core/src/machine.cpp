#include "inspectre/machine.hpp"

#include <algorithm>
#include <set>

#include "inspectre/errors.hpp"
#include "inspectre/translate.hpp"

namespace inspectre {

BlockPtr IsaCodeSource::decode(Word pc, std::uint32_t instr) const {
    const Instruction* ins = prog_.at(pc);
    if (!ins) throw UndecodableAddress(pc);
    return translate_instruction(*ins, instr, prog_.mask());
}

BlockPtr TemplateCodeSource::decode(Word pc, std::uint32_t instr) const {
    auto it = templates_.find(pc);
    if (it == templates_.end()) throw UndecodableAddress(pc);
    auto block = std::make_shared<Block>();
    block->pc = pc;
    block->instr = instr;
    auto rename = [instr](Name n) { return n.instr == 0 ? Name{instr, n.micro} : n; };
    for (const auto& tmpl : it->second) {
        Micro m = tmpl;
        m.name = rename(m.name);
        m.guard = m.guard.rename(rename);
        m.addr = m.addr.rename(rename);
        m.value = m.value.rename(rename);
        if (m.has_tag(kTagCall)) m.link = rename(m.link);
        block->micros.push_back(std::move(m));
    }
    block->text = "code@" + std::to_string(pc);
    return block;
}

Machine::Machine(std::shared_ptr<const CodeSource> code, Word mask, std::vector<Word> footprint,
                 std::vector<Word> code_labels)
    : code_(std::move(code)),
      mask_(mask),
      footprint_(std::move(footprint)),
      code_labels_(std::move(code_labels)) {
    std::sort(footprint_.begin(), footprint_.end());
    footprint_.erase(std::unique(footprint_.begin(), footprint_.end()), footprint_.end());
}

BlockPtr Machine::fetch(Word pc, std::uint32_t instr) const {
    const auto key = std::make_pair(pc, instr);
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    BlockPtr block;
    try {
        block = code_->decode(pc, instr);
    } catch (const UndecodableAddress&) {
        auto fault = std::make_shared<Block>();
        fault->pc = pc;
        fault->instr = instr;
        Micro m;
        m.name = Name{instr, 1};
        m.kind = MicroKind::Internal;
        m.value = Expr::lit(0);
        m.tags = kTagHalt;
        fault->micros.push_back(std::move(m));
        fault->text = "<undecodable>";
        block = std::move(fault);
    }
    std::lock_guard lock(cache_mutex_);
    return cache_.emplace(key, std::move(block)).first->second;
}

MachinePtr make_machine(const IsaProgram& prog) {
    std::vector<Word> footprint;
    for (const auto& [addr, v] : prog.memory_footprint()) footprint.push_back(addr);
    return std::make_shared<Machine>(std::make_shared<IsaCodeSource>(prog), prog.mask(),
                                     std::move(footprint), prog.code_labels());
}

MachinePtr make_machine(const MilProgram& prog) {
    std::set<Word> footprint;
    for (const auto& [addr, v] : prog.mem) footprint.insert(addr);
    auto literal_addresses = [&](const Micro& m) {
        if (m.has_addr() && m.res == Resource::Mem && m.addr.is_lit()) footprint.insert(m.addr.literal());
    };
    for (const auto& m : prog.micros) literal_addresses(m);
    std::vector<Word> labels;
    for (const auto& [addr, micros] : prog.code) {
        labels.push_back(addr);
        for (const auto& m : micros) literal_addresses(m);
    }
    return std::make_shared<Machine>(std::make_shared<TemplateCodeSource>(prog.code), prog.mask(),
                                     std::vector<Word>(footprint.begin(), footprint.end()),
                                     std::move(labels));
}

BootImage boot_image(const IsaProgram& prog) {
    BootImage img;
    for (const auto& [r, v] : prog.register_footprint()) img.regs[r] = v;
    img.mem = prog.memory_footprint();
    img.entry = prog.entry_point();
    return img;
}

BootImage boot_image(const MilProgram& prog) {
    BootImage img;
    img.regs = prog.regs;
    img.mem = prog.mem;
    img.entry = prog.pc;
    img.decoded = prog.decoded_blocks();
    return img;
}

}  // namespace inspectre
