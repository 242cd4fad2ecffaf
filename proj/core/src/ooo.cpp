#include "inspectre/ooo.hpp"

#include <boost/container_hash/hash.hpp>
#include <sstream>

#include "inspectre/errors.hpp"

namespace inspectre {

std::string to_string(Observation o) {
    switch (o.kind) {
    case Observation::Kind::Silent: return "silent";
    case Observation::Kind::DL: return "DL(" + std::to_string(o.value) + ")";
    case Observation::Kind::DS: return "DS(" + std::to_string(o.value) + ")";
    case Observation::Kind::IL: return "IL(" + std::to_string(o.value) + ")";
    }
    return "?";
}

std::string to_string(const Trace& t) {
    std::string out;
    for (const auto& o : t) {
        if (!out.empty()) out += " :: ";
        out += to_string(o);
    }
    return out.empty() ? "<empty>" : out;
}

const Micro* OooState::find(Name n) const {
    if (n.instr >= instrs.size()) return nullptr;
    const auto& micros = instrs[n.instr].block->micros;
    if (n.micro == 0 || n.micro > micros.size()) return nullptr;
    return &micros[n.micro - 1];
}

const Micro& OooState::at(Name n) const {
    const Micro* m = find(n);
    if (!m) throw NotInProgram(n);
    return *m;
}

Name OooState::max_name() const {
    for (auto it = instrs.rbegin(); it != instrs.rend(); ++it) {
        if (!it->block->micros.empty()) return it->block->micros.back().name;
    }
    return Name{};
}

std::size_t OooState::micro_count() const {
    std::size_t n = 0;
    for (const auto& slot : instrs) n += slot.block->micros.size();
    return n;
}

std::optional<Word> OooState::value(Name n) const {
    auto it = s.find(n);
    if (it == s.end()) return std::nullopt;
    return it->second;
}

std::optional<Word> OooState::eval(const Expr& e) const { return eval_expr(e, s, mask()); }

std::optional<Word> OooState::eval(const Expr& e, const Storage& over) const {
    return eval_expr(e, over, mask());
}

std::optional<bool> OooState::guard(const Micro& m) const { return guard(m, s); }

std::optional<bool> OooState::guard(const Micro& m, const Storage& over) const {
    auto g = eval_expr(m.guard, over, mask());
    if (!g) return std::nullopt;
    return *g != 0;
}

std::size_t OooState::hash() const {
    std::size_t h = 0;
    for (const auto& slot : instrs) {
        boost::hash_combine(h, slot.block->pc);
        boost::hash_combine(h, slot.producer ? slot.producer->key() : ~std::uint64_t{0});
    }
    for (const auto& [n, v] : s) {
        boost::hash_combine(h, n.key());
        boost::hash_combine(h, v);
    }
    for (Name n : committed) boost::hash_combine(h, n.key());
    boost::hash_combine(h, 0x9e37u);
    for (Name n : fetched) boost::hash_combine(h, n.key());
    return h;
}

bool operator==(const OooState& a, const OooState& b) {
    if (a.instrs.size() != b.instrs.size()) return false;
    for (std::size_t i = 0; i < a.instrs.size(); ++i) {
        const auto& x = a.instrs[i];
        const auto& y = b.instrs[i];
        if (x.producer != y.producer) return false;
        if (x.block != y.block &&
            (x.block->pc != y.block->pc || !(x.block->micros == y.block->micros))) {
            return false;
        }
    }
    return a.s == b.s && a.committed == b.committed && a.fetched == b.fetched;
}

NameSet bound_names(const StoreSet& stores) {
    NameSet out;
    for (const Micro* m : stores) out.insert(out.end(), m->name);
    return out;
}

namespace {

const Micro& memory_op(const OooState& st, Name t) {
    const Micro& m = st.at(t);
    if (m.is_internal()) throw NotAMemoryOp(t);
    return m;
}

}  // namespace

StoreSet str_may(const OooState& st, Name t) { return str_may(st, st.s, t); }

StoreSet str_may(const OooState& st, const Storage& over, Name t) {
    const Micro& target = memory_op(st, t);
    const bool addressed = target.has_addr();
    const auto addr = addressed ? st.eval(target.addr, over) : std::nullopt;
    StoreSet out;
    for (std::uint32_t i = 0; i <= t.instr && i < st.instrs.size(); ++i) {
        for (const auto& m : st.instrs[i].block->micros) {
            if (!(m.name < t)) break;
            if (!m.is_store(target.res)) continue;
            if (st.guard(m, over) == std::optional<bool>(false)) continue;
            if (addressed && addr) {
                auto other = st.eval(m.addr, over);
                if (other && *other != *addr) continue;
            }
            out.push_back(&m);
        }
    }
    return out;
}

StoreSet str_act(const OooState& st, Name t) { return str_act(st, st.s, t); }

StoreSet str_act(const OooState& st, const Storage& over, Name t) {
    StoreSet may = str_may(st, over, t);
    const Micro& target = st.at(t);
    const bool addressed = target.has_addr();
    const auto addr = addressed ? st.eval(target.addr, over) : std::nullopt;

    // Later members with a true guard and a defined address kill earlier
    // members writing the same cell.
    std::vector<std::optional<Word>> addrs(may.size());
    std::vector<bool> sure(may.size());
    for (std::size_t i = 0; i < may.size(); ++i) {
        if (addressed) addrs[i] = st.eval(may[i]->addr, over);
        sure[i] = st.guard(*may[i], over) == std::optional<bool>(true);
    }
    StoreSet out;
    for (std::size_t i = 0; i < may.size(); ++i) {
        bool killed = false;
        for (std::size_t j = i + 1; j < may.size() && !killed; ++j) {
            if (!sure[j]) continue;
            if (!addressed) {
                killed = true;
            } else if (addrs[j]) {
                killed = (addr && *addrs[j] == *addr) || (addrs[i] && *addrs[j] == *addrs[i]);
            }
        }
        if (!killed) out.push_back(may[i]);
    }
    return out;
}

std::optional<Denotation> denote(const OooState& st, Name t) { return denote(st, st.s, t); }

std::optional<Denotation> denote(const OooState& st, const Storage& over, Name t) {
    const Micro& m = st.at(t);
    switch (m.kind) {
    case MicroKind::Internal: {
        auto v = st.eval(m.value, over);
        if (!v) return std::nullopt;
        return Denotation{*v, Observation::silent()};
    }
    case MicroKind::Store: {
        if (m.has_addr() && !st.eval(m.addr, over)) return std::nullopt;
        auto v = st.eval(m.value, over);
        if (!v) return std::nullopt;
        return Denotation{*v, Observation::silent()};
    }
    case MicroKind::Load: {
        std::optional<Word> addr;
        if (m.has_addr()) {
            addr = st.eval(m.addr, over);
            if (!addr) return std::nullopt;
        }
        StoreSet act = str_act(st, over, t);
        if (act.size() != 1) return std::nullopt;
        const Name src = act.front()->name;
        auto it = over.find(src);
        if (it == over.end()) return std::nullopt;
        Observation obs = Observation::silent();
        if (m.res == Resource::Mem && st.committed.count(src)) obs = Observation::dl(*addr);
        return Denotation{it->second, obs};
    }
    }
    return std::nullopt;
}

const char* rule_name(Rule r) {
    switch (r) {
    case Rule::Exe: return "Exe";
    case Rule::Cmt: return "Cmt";
    case Rule::Ftc: return "Ftc";
    }
    return "?";
}

bool operator==(const StepParam& a, const StepParam& b) {
    if (a.rule != b.rule || a.name != b.name || a.addr != b.addr || a.value != b.value) return false;
    if (a.rule != Rule::Ftc) return true;
    if (!a.decoded || !b.decoded) return a.decoded == b.decoded;
    return a.decoded->pc == b.decoded->pc && a.decoded->micros == b.decoded->micros;
}

std::string to_string(const StepParam& p) {
    std::string out = std::string(rule_name(p.rule));
    switch (p.rule) {
    case Rule::Exe: break;
    case Rule::Cmt: out += "(" + std::to_string(p.addr) + ", " + std::to_string(p.value) + ")"; break;
    case Rule::Ftc: out += "(" + std::to_string(p.addr) + ")"; break;
    }
    return out + " " + to_string(p.name);
}

std::optional<StepParam> exe_premise(const OooState& st, Name t) {
    const Micro* m = st.find(t);
    if (!m || defined(st.s, t)) return std::nullopt;
    if (st.guard(*m) != std::optional<bool>(true)) return std::nullopt;
    auto d = denote(st, t);
    if (!d) return std::nullopt;
    StepParam p;
    p.rule = Rule::Exe;
    p.name = t;
    p.value = d->value;
    return p;
}

std::optional<StepParam> cmt_premise(const OooState& st, Name t) {
    const Micro* m = st.find(t);
    if (!m || !m->is_store(Resource::Mem)) return std::nullopt;
    auto v = st.value(t);
    if (!v || st.committed.count(t)) return std::nullopt;
    for (const Micro* prior : str_may(st, t)) {
        if (!st.committed.count(prior->name)) return std::nullopt;
    }
    auto addr = st.eval(m->addr);
    if (!addr) return std::nullopt;
    StepParam p;
    p.rule = Rule::Cmt;
    p.name = t;
    p.addr = *addr;
    p.value = *v;
    return p;
}

std::optional<StepParam> ftc_premise(const OooState& st, Name t, bool ignore_siblings) {
    const Micro* m = st.find(t);
    if (!m || !m->is_store(Resource::Pc)) return std::nullopt;
    auto v = st.value(t);
    if (!v || st.fetched.count(t)) return std::nullopt;
    for (const Micro* prior : str_may(st, t)) {
        if (ignore_siblings && prior->name.instr == t.instr) continue;
        if (!st.fetched.count(prior->name)) return std::nullopt;
    }
    StepParam p;
    p.rule = Rule::Ftc;
    p.name = t;
    p.addr = *v;
    p.decoded = st.machine->fetch(*v, static_cast<std::uint32_t>(st.instrs.size()));
    return p;
}

std::vector<StepParam> enabled(const OooState& st) {
    std::vector<StepParam> exe, cmt, ftc;
    st.for_each_micro([&](const Micro& m) {
        if (auto p = exe_premise(st, m.name)) exe.push_back(std::move(*p));
        if (m.is_store(Resource::Mem)) {
            if (auto p = cmt_premise(st, m.name)) cmt.push_back(std::move(*p));
        } else if (m.is_store(Resource::Pc)) {
            if (auto p = ftc_premise(st, m.name)) ftc.push_back(std::move(*p));
        }
    });
    exe.insert(exe.end(), cmt.begin(), cmt.end());
    exe.insert(exe.end(), ftc.begin(), ftc.end());
    return exe;
}

StepResult apply_step(const OooState& st, const StepParam& p) {
    StepResult r{st, Observation::silent(), p};
    switch (p.rule) {
    case Rule::Exe: {
        auto d = denote(st, p.name);
        r.state.s.emplace(p.name, d->value);
        r.obs = d->obs;
        r.param.value = d->value;
        break;
    }
    case Rule::Cmt:
        r.state.committed.insert(p.name);
        r.obs = Observation::ds(p.addr);
        break;
    case Rule::Ftc: {
        BlockPtr block = p.decoded;
        if (!block) block = st.machine->fetch(p.addr, static_cast<std::uint32_t>(st.instrs.size()));
        r.state.instrs.push_back(InstrSlot{block, p.name});
        r.state.fetched.insert(p.name);
        r.obs = Observation::il(p.addr);
        r.param.decoded = block;
        break;
    }
    }
    return r;
}

StepResult step(const OooState& st, const StepParam& p) {
    std::optional<StepParam> checked;
    switch (p.rule) {
    case Rule::Exe: checked = exe_premise(st, p.name); break;
    case Rule::Cmt: checked = cmt_premise(st, p.name); break;
    case Rule::Ftc: checked = ftc_premise(st, p.name); break;
    }
    if (!checked) throw RuleNotEnabled(std::string(rule_name(p.rule)) + " is not enabled for " + to_string(p.name));
    return apply_step(st, *checked);
}

StepParam step_param(const OooState& before, const OooState& after) {
    auto fail = [] [[noreturn]] (const std::string& why) { throw NotAStep(why); };
    if (before.machine != after.machine) fail("states belong to different programs");
    std::optional<StepParam> p;
    if (after.instrs.size() == before.instrs.size() + 1 && after.fetched.size() == before.fetched.size() + 1) {
        Name t = after.instrs.back().producer.value_or(Name{});
        p = ftc_premise(before, t);
    } else if (after.instrs.size() == before.instrs.size() &&
               after.committed.size() == before.committed.size() + 1) {
        for (Name t : after.committed) {
            if (!before.committed.count(t)) {
                p = cmt_premise(before, t);
                break;
            }
        }
    } else if (after.instrs.size() == before.instrs.size() && after.s.size() == before.s.size() + 1) {
        for (const auto& [t, v] : after.s) {
            if (!defined(before.s, t)) {
                p = exe_premise(before, t);
                break;
            }
        }
    }
    if (!p) fail("states are not related by a single enabled rule");
    StepResult r = apply_step(before, *p);
    if (!(r.state == after)) fail("states differ by more than one rule application");
    return r.param;
}

OooState initial_state(MachinePtr machine, const BootImage& image) {
    OooState st;
    st.machine = std::move(machine);
    const Word mask = st.machine->mask();
    auto boot = std::make_shared<Block>();
    boot->pc = 0;
    boot->instr = 0;
    boot->text = "<boot>";
    std::uint32_t next = 1;
    auto add_store = [&](Resource r, Word addr, Word value) {
        Micro m;
        m.name = Name{0, next++};
        m.kind = MicroKind::Store;
        m.res = r;
        if (r != Resource::Pc) m.addr = Expr::lit(addr & mask);
        m.value = Expr::lit(value & mask);
        st.s.emplace(m.name, value & mask);
        if (r == Resource::Mem) st.committed.insert(m.name);
        boot->micros.push_back(std::move(m));
        return boot->micros.back().name;
    };
    for (const auto& [r, v] : image.regs) add_store(Resource::Reg, r, v);
    for (const auto& [a, v] : image.mem) add_store(Resource::Mem, a, v);
    std::optional<Name> pc_store;
    if (image.entry) pc_store = add_store(Resource::Pc, 0, *image.entry);
    st.instrs.push_back(InstrSlot{boot, std::nullopt});

    for (std::size_t i = 0; i < image.decoded.size(); ++i) {
        auto block = std::make_shared<Block>();
        block->instr = static_cast<std::uint32_t>(i + 1);
        block->pc = image.entry.value_or(0) + kInstrStride * i;
        block->micros = image.decoded[i];
        for (std::size_t j = 0; j < block->micros.size(); ++j) {
            if (block->micros[j].name != Name{block->instr, static_cast<std::uint32_t>(j + 1)}) {
                throw PreconditionViolated("decoded micros must be named contiguously from t" +
                                           std::to_string(i + 1) + "_1");
            }
        }
        block->text = "decoded";
        std::optional<Name> producer = (i == 0) ? pc_store : std::nullopt;
        st.instrs.push_back(InstrSlot{block, producer});
    }
    if (!image.decoded.empty() && pc_store) st.fetched.insert(*pc_store);
    return st;
}

std::string dump_state(const OooState& st) {
    std::ostringstream out;
    for (const auto& slot : st.instrs) {
        out << "# instr " << slot.block->instr << " @" << slot.block->pc << " " << slot.block->text;
        if (slot.producer) out << " (from " << to_string(*slot.producer) << ")";
        out << "\n";
        for (const auto& m : slot.block->micros) {
            out << "  " << to_string(m);
            if (auto v = st.value(m.name)) out << "   = " << *v;
            if (st.committed.count(m.name)) out << " [C]";
            if (st.fetched.count(m.name)) out << " [F]";
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace inspectre
