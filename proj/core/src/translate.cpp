#include "inspectre/translate.hpp"

#include <set>

#include "inspectre/errors.hpp"

namespace inspectre {

namespace {

class BlockBuilder {
public:
    BlockBuilder(std::uint32_t instr, Word mask) : instr_(instr), mask_(mask) {}

    Name emit(Micro m) {
        m.name = Name{instr_, next_++};
        micros_.push_back(std::move(m));
        return micros_.back().name;
    }

    Expr internal(Expr e, std::uint8_t tags = kTagNone) {
        Micro m;
        m.kind = MicroKind::Internal;
        m.value = std::move(e);
        m.tags = tags;
        return Expr::ref(emit(std::move(m)));
    }

    Expr load(Resource r, Expr addr, Expr guard = Expr::lit(1)) {
        Micro m;
        m.kind = MicroKind::Load;
        m.res = r;
        m.guard = std::move(guard);
        if (r != Resource::Pc) m.addr = std::move(addr);
        return Expr::ref(emit(std::move(m)));
    }

    Name store(Resource r, Expr addr, Expr value, Expr guard = Expr::lit(1),
               std::uint8_t tags = kTagNone) {
        Micro m;
        m.kind = MicroKind::Store;
        m.res = r;
        m.guard = std::move(guard);
        if (r != Resource::Pc) m.addr = std::move(addr);
        m.value = std::move(value);
        m.tags = tags;
        return emit(std::move(m));
    }

    Expr read_reg(unsigned r) { return load(Resource::Reg, Expr::lit(r)); }

    Name write_reg(unsigned r, Expr value, Expr guard = Expr::lit(1)) {
        return store(Resource::Reg, Expr::lit(r), std::move(value), std::move(guard));
    }

    Name jump(Expr target, Expr guard = Expr::lit(1), std::uint8_t tags = kTagNone) {
        return store(Resource::Pc, Expr{}, std::move(target), std::move(guard), tags);
    }

    // Lowers an operand; registers and dereferences become loads, emitted
    // left to right.
    Expr lower(const IsaExprPtr& e) {
        using K = IsaExpr::Kind;
        switch (e->kind) {
        case K::Num: return Expr::lit(e->value & mask_);
        case K::Reg: return read_reg(e->reg);
        case K::Deref: return load(Resource::Mem, lower(e->lhs));
        case K::Add: {
            Expr a = lower(e->lhs);
            return a + lower(e->rhs);
        }
        case K::Sub: {
            Expr a = lower(e->lhs);
            return a - lower(e->rhs);
        }
        case K::And: {
            Expr a = lower(e->lhs);
            return Expr::binary(ExprOp::And, a, lower(e->rhs));
        }
        }
        return Expr{};
    }

    Micro& last() { return micros_.back(); }
    std::vector<Micro> take() { return std::move(micros_); }

private:
    std::uint32_t instr_;
    Word mask_;
    std::uint32_t next_ = 1;
    std::vector<Micro> micros_;
};

ExprOp compare_op(Opcode op) {
    switch (op) {
    case Opcode::SetLt: return ExprOp::Lt;
    case Opcode::SetGe: return ExprOp::Ge;
    case Opcode::SetEq: return ExprOp::Eq;
    default: return ExprOp::Ne;
    }
}

unsigned reg_of(const IsaExprPtr& e) { return e->reg; }

}  // namespace

const char* violation_name(ViolationKind k) {
    switch (k) {
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::ForwardReference: return "ForwardReference";
    case ViolationKind::StaleName: return "StaleName";
    case ViolationKind::PcLoadAfterStore: return "PCLoadAfterStore";
    case ViolationKind::PcNameUsed: return "PCNameUsed";
    case ViolationKind::NonUniquePcStore: return "NonUniquePCStore";
    }
    return "?";
}

BlockPtr translate_instruction(const Instruction& ins, std::uint32_t instr, Word mask) {
    BlockBuilder b(instr, mask);
    const auto& a = ins.args;
    const Expr next = Expr::lit((ins.addr + kInstrStride) & mask);
    const Expr one = Expr::lit(1);

    switch (ins.op) {
    case Opcode::Loadi:
        b.write_reg(reg_of(a[0]), b.lower(a[1]));
        b.jump(next);
        break;
    case Opcode::Mov:
        b.write_reg(reg_of(a[0]), b.read_reg(reg_of(a[1])));
        b.jump(next);
        break;
    case Opcode::Add:
    case Opcode::Sub: {
        Expr x = b.read_reg(reg_of(a[1]));
        Expr y = b.lower(a[2]);
        Expr sum = b.internal(ins.op == Opcode::Add ? x + y : x - y);
        b.write_reg(reg_of(a[0]), sum);
        b.jump(next);
        break;
    }
    case Opcode::Addi: {
        // Register index and program counter are read explicitly.
        Expr index = b.internal(Expr::lit(reg_of(a[1])));
        Expr x = b.load(Resource::Reg, index);
        Expr sum = b.internal(x + b.lower(a[2]));
        Expr dst = reg_of(a[0]) == reg_of(a[1]) ? index : Expr::lit(reg_of(a[0]));
        b.store(Resource::Reg, dst, sum);
        Expr pc = b.load(Resource::Pc, Expr{});
        Expr succ = b.internal(pc + Expr::lit(kInstrStride));
        b.jump(succ);
        break;
    }
    case Opcode::Andi: {
        Expr x = b.read_reg(reg_of(a[1]));
        Expr v = b.internal(Expr::binary(ExprOp::And, x, b.lower(a[2])));
        b.write_reg(reg_of(a[0]), v);
        b.jump(next);
        break;
    }
    case Opcode::SetLt:
    case Opcode::SetGe:
    case Opcode::SetEq:
    case Opcode::SetNe: {
        Expr x = b.read_reg(reg_of(a[1]));
        Expr y = b.lower(a[2]);
        Expr c = b.internal(Expr::binary(compare_op(ins.op), x, y));
        b.write_reg(reg_of(a[0]), c);
        b.jump(next);
        break;
    }
    case Opcode::Load:
        b.write_reg(reg_of(a[0]), b.lower(a[1]));
        b.jump(next);
        break;
    case Opcode::Store: {
        Expr addr = b.internal(b.lower(a[0]->lhs));
        Expr value = b.lower(a[1]);
        b.store(Resource::Mem, addr, value);
        b.jump(next);
        break;
    }
    case Opcode::Beq: {
        Expr flag = b.read_reg(reg_of(a[0]));
        Expr taken = b.internal(Expr::binary(ExprOp::Eq, flag, one));
        Expr pc = b.load(Resource::Pc, Expr{});
        b.jump(b.lower(a[1]), taken);
        b.jump(pc + Expr::lit(kInstrStride), Expr::negate(taken));
        break;
    }
    case Opcode::Blt: {
        Expr x = b.read_reg(reg_of(a[0]));
        Expr y = b.read_reg(reg_of(a[1]));
        Expr taken = b.internal(Expr::binary(ExprOp::Lt, x, y));
        b.jump(b.lower(a[2]), taken);
        b.jump(a.size() > 3 ? b.lower(a[3]) : next, Expr::negate(taken));
        break;
    }
    case Opcode::Cmov: {
        Expr flag = b.read_reg(reg_of(a[0]));
        Expr cond = Expr::binary(ExprOp::Eq, flag, one);
        if (a[2]->kind == IsaExpr::Kind::Reg) {
            Expr v = b.load(Resource::Reg, Expr::lit(reg_of(a[2])), cond);
            b.write_reg(reg_of(a[1]), v, cond);
        } else {
            b.write_reg(reg_of(a[1]), b.lower(a[2]), cond);
        }
        b.jump(next);
        break;
    }
    case Opcode::Csel: {
        Expr flag = b.read_reg(reg_of(a[0]));
        Expr keep = b.read_reg(reg_of(a[1]));
        Expr take = b.read_reg(reg_of(a[2]));
        b.write_reg(reg_of(a[1]), Expr::negate(flag) * keep + flag * take);
        b.jump(next);
        break;
    }
    case Opcode::Jmp:
        b.jump(b.lower(a[0]));
        break;
    case Opcode::Jmpi: {
        Expr target = b.internal(b.lower(a[0]));
        b.jump(target, one, kTagIndirectJump);
        break;
    }
    case Opcode::Cjmpi: {
        Expr cond = b.lower(a[0]);
        Expr target = b.read_reg(reg_of(a[1]));
        Expr fall = b.internal(Expr::binary(ExprOp::Ne, cond, one));
        b.jump(next, fall);
        b.jump(target, Expr::negate(fall), kTagIndirectJump);
        break;
    }
    case Opcode::Call: {
        Expr sp = b.read_reg(kRegSp);
        Expr top = b.internal(sp - Expr::lit(kInstrStride));
        b.write_reg(kRegSp, top);
        Expr ra = b.internal(next, kTagReturnAddress);
        Name save = b.store(Resource::Mem, top, ra);
        b.jump(b.lower(a[0]), one, kTagCall);
        b.last().link = save;
        break;
    }
    case Opcode::Ret: {
        Expr sp = b.read_reg(kRegSp);
        Expr ra = b.load(Resource::Mem, sp);
        b.write_reg(kRegSp, b.internal(sp + Expr::lit(kInstrStride)));
        Expr target = b.internal(ra);
        b.jump(target, one, kTagReturn);
        break;
    }
    case Opcode::Lfence:
        b.internal(Expr::lit(0), kTagFence);
        b.jump(next);
        break;
    case Opcode::Halt:
        b.internal(Expr::lit(0), kTagHalt);
        break;
    }

    auto block = std::make_shared<Block>();
    block->pc = ins.addr;
    block->instr = instr;
    block->micros = b.take();
    block->text = to_string(ins);
    return block;
}

BlockPtr translate(const IsaProgram& prog, Word addr, Name after) {
    const Instruction* ins = prog.at(addr);
    if (!ins) throw UndecodableAddress(addr);
    return translate_instruction(*ins, after.instr + 1, prog.mask());
}

std::vector<Violation> check_translation_properties(const std::vector<Micro>& micros, Name after) {
    std::vector<Violation> out;
    NameSet bound;
    for (const auto& m : micros) {
        if (!bound.insert(m.name).second) {
            out.push_back({ViolationKind::DuplicateName, m.name, "name bound twice"});
        }
        if (!(after < m.name)) {
            out.push_back({ViolationKind::StaleName, m.name, "not greater than " + to_string(after)});
        }
        for (Name n : m.free_names()) {
            if (!(n < m.name)) {
                out.push_back({ViolationKind::ForwardReference, m.name, "reads " + to_string(n)});
            }
            if (!(after < n)) {
                out.push_back({ViolationKind::StaleName, m.name, "reads " + to_string(n)});
            }
        }
    }
    return out;
}

std::vector<Violation> check_translation_wellformed(const std::vector<Micro>& micros) {
    std::vector<Violation> out;
    std::vector<const Micro*> pc_stores;
    NameSet pc_store_names;
    bool halts = false;
    for (const auto& m : micros) {
        if (m.is_store(Resource::Pc)) {
            pc_stores.push_back(&m);
            pc_store_names.insert(m.name);
        }
        if (m.has_tag(kTagHalt)) halts = true;
    }

    for (const auto& m : micros) {
        if (!m.is_load(Resource::Pc)) continue;
        for (const Micro* s : pc_stores) {
            if (!(m.name < s->name)) {
                out.push_back({ViolationKind::PcLoadAfterStore, m.name, "after " + to_string(s->name)});
            }
        }
    }

    for (const auto& m : micros) {
        for (Name n : m.free_names()) {
            if (pc_store_names.count(n)) {
                out.push_back({ViolationKind::PcNameUsed, m.name, "reads " + to_string(n)});
            }
        }
    }

    if (pc_stores.empty()) {
        if (!halts) out.push_back({ViolationKind::NonUniquePcStore, Name{}, "no PC store"});
        return out;
    }

    NameSet vars;
    std::set<Word> domain{0, 1, 2};
    std::function<void(const Expr&)> literals = [&](const Expr& e) {
        if (e.is_lit()) domain.insert(e.literal());
        for (std::size_t i = 0; i < e.arity(); ++i) literals(e.arg(i));
    };
    for (const Micro* s : pc_stores) {
        s->guard.collect_names(vars);
        literals(s->guard);
    }
    const std::vector<Name> names(vars.begin(), vars.end());
    const std::vector<Word> values(domain.begin(), domain.end());
    std::vector<std::size_t> choice(names.size(), 0);
    for (;;) {
        Storage s;
        for (std::size_t i = 0; i < names.size(); ++i) s[names[i]] = values[choice[i]];
        int enabled = 0;
        for (const Micro* st : pc_stores) {
            auto g = eval_expr(st->guard, s);
            if (g && *g != 0) ++enabled;
        }
        if (enabled != 1) {
            std::string detail = std::to_string(enabled) + " PC stores enabled under {";
            for (std::size_t i = 0; i < names.size(); ++i) {
                detail += (i ? ", " : "") + to_string(names[i]) + "=" + std::to_string(values[choice[i]]);
            }
            out.push_back({ViolationKind::NonUniquePcStore, pc_stores.front()->name, detail + "}"});
            break;
        }
        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] == values.size()) choice[k++] = 0;
        if (k == choice.size()) break;
    }
    return out;
}

}  // namespace inspectre
