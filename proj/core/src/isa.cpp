#include "inspectre/isa.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "text_cursor.hpp"

namespace inspectre {

using detail::TextCursor;

namespace {

struct OpcodeInfo {
    Opcode op;
    const char* name;
    // Operand shape letters:
    //   R register, I constant, V register or constant,
    //   M memory `[..]`, S register/constant/memory, J register or memory,
    //   L constant (code address); a trailing `?` marks the last operand optional.
    const char* shape;
};

constexpr std::array<OpcodeInfo, 23> kOpcodes{{
    {Opcode::Loadi, "loadi", "RI"},
    {Opcode::Mov, "mov", "RR"},
    {Opcode::Add, "add", "RRV"},
    {Opcode::Sub, "sub", "RRV"},
    {Opcode::Addi, "addi", "RRI"},
    {Opcode::Andi, "andi", "RRI"},
    {Opcode::SetLt, "setlt", "RRV"},
    {Opcode::SetGe, "setge", "RRV"},
    {Opcode::SetEq, "seteq", "RRV"},
    {Opcode::SetNe, "setne", "RRV"},
    {Opcode::Load, "load", "RM"},
    {Opcode::Store, "store", "MS"},
    {Opcode::Beq, "beq", "RL"},
    {Opcode::Blt, "blt", "RRLL?"},
    {Opcode::Cmov, "cmov", "RRV"},
    {Opcode::Csel, "csel", "RRR"},
    {Opcode::Jmp, "jmp", "L"},
    {Opcode::Jmpi, "jmpi", "J"},
    {Opcode::Cjmpi, "cjmpi", "JR"},
    {Opcode::Call, "call", "L"},
    {Opcode::Ret, "ret", ""},
    {Opcode::Lfence, "lfence", ""},
    {Opcode::Halt, "halt", ""},
}};

const OpcodeInfo& info(Opcode op) { return kOpcodes[static_cast<std::size_t>(op)]; }

Word mask_for(unsigned width) {
    return width >= 64 ? ~Word{0} : ((Word{1} << width) - 1);
}

void visit(const IsaExprPtr& e, const std::function<void(const IsaExpr&)>& f) {
    if (!e) return;
    f(*e);
    visit(e->lhs, f);
    visit(e->rhs, f);
}

// Symbols known after the first pass.
using SymbolTable = std::map<std::string, Word>;

class OperandParser {
public:
    OperandParser(TextCursor& cur, const SymbolTable& symbols) : cur_(cur), symbols_(symbols) {}

    IsaExprPtr expr() {
        IsaExprPtr lhs = term();
        for (;;) {
            IsaExpr::Kind k;
            if (cur_.accept("+")) {
                k = IsaExpr::Kind::Add;
            } else if (cur_.accept("-")) {
                k = IsaExpr::Kind::Sub;
            } else if (cur_.peek() == '&') {
                cur_.accept("&");
                k = IsaExpr::Kind::And;
            } else {
                return lhs;
            }
            lhs = IsaExpr::combine(k, lhs, term());
        }
    }

    IsaExprPtr term() {
        if (cur_.accept("[")) {
            IsaExprPtr inner = expr();
            cur_.expect("]");
            return IsaExpr::deref(inner);
        }
        if (cur_.accept("(")) {
            IsaExprPtr inner = expr();
            cur_.expect(")");
            return inner;
        }
        if (auto n = cur_.number()) return IsaExpr::num(*n);
        bool address_of = cur_.accept("&");
        auto id = cur_.ident();
        if (!id) cur_.fail("expected operand");
        if (!address_of) {
            if (auto r = register_id(*id)) return IsaExpr::reg_ref(*r);
        }
        auto it = symbols_.find(*id);
        if (it == symbols_.end()) cur_.fail("unknown symbol '" + *id + "'");
        return IsaExpr::num(it->second, *id);
    }

private:
    TextCursor& cur_;
    const SymbolTable& symbols_;
};

bool shape_accepts(char shape, const IsaExprPtr& e) {
    using K = IsaExpr::Kind;
    bool is_reg = e->kind == K::Reg;
    bool is_mem = e->kind == K::Deref;
    bool is_const = e->is_constant();
    switch (shape) {
    case 'R': return is_reg;
    case 'I':
    case 'L': return is_const;
    case 'V': return is_reg || is_const;
    case 'M': return is_mem;
    case 'S': return is_reg || is_const || is_mem;
    case 'J': return is_reg || is_mem;
    default: return false;
    }
}

const char* shape_description(char shape) {
    switch (shape) {
    case 'R': return "a register";
    case 'I': return "a constant";
    case 'L': return "a code address";
    case 'V': return "a register or constant";
    case 'M': return "a memory operand";
    case 'S': return "a register, constant or memory operand";
    case 'J': return "a register or memory operand";
    default: return "an operand";
    }
}

Location parse_location(TextCursor& cur, const SymbolTable& symbols, Word mask) {
    OperandParser p(cur, symbols);
    IsaExprPtr e = p.term();
    if (e->kind == IsaExpr::Kind::Reg) return Location{Resource::Reg, e->reg};
    if (e->kind == IsaExpr::Kind::Deref) {
        auto addr = e->lhs->constant_value(mask);
        if (!addr) cur.fail("memory location must have a constant address");
        return Location{Resource::Mem, *addr};
    }
    cur.fail("expected a register or [address]");
}

Word parse_value(TextCursor& cur, const SymbolTable& symbols, Word mask) {
    OperandParser p(cur, symbols);
    IsaExprPtr e = p.expr();
    auto v = e->constant_value(mask);
    if (!v) cur.fail("expected a constant");
    return *v;
}

std::vector<Word> parse_value_list(TextCursor& cur, const SymbolTable& symbols, Word mask) {
    std::vector<Word> out;
    bool bracketed = cur.accept("[");
    while (!cur.at_end() && !(bracketed && cur.peek() == ']')) {
        out.push_back(parse_value(cur, symbols, mask));
        cur.accept(",");
    }
    if (bracketed) cur.expect("]");
    return out;
}

// Leading `label:` prefixes of a line.
std::vector<std::string> take_labels(TextCursor& cur) {
    std::vector<std::string> labels;
    for (;;) {
        cur.skip_ws();
        TextCursor probe = cur;
        auto id = probe.ident();
        if (!id || !probe.accept(":")) return labels;
        cur = probe;
        labels.push_back(*id);
    }
}

}  // namespace

const char* opcode_name(Opcode op) { return info(op).name; }

std::optional<Opcode> opcode_from(std::string_view text) {
    for (const auto& i : kOpcodes) {
        if (text == i.name) return i.op;
    }
    return std::nullopt;
}

const std::vector<Opcode>& all_opcodes() {
    static const std::vector<Opcode> ops = [] {
        std::vector<Opcode> v;
        for (const auto& i : kOpcodes) v.push_back(i.op);
        return v;
    }();
    return ops;
}

std::optional<unsigned> register_id(std::string_view text) {
    if (text == "sp") return kRegSp;
    if (text == "z") return kRegZ;
    if (text == "f") return kRegF;
    if (text.size() >= 2 && text.size() <= 3 && text[0] == 'r') {
        unsigned v = 0;
        for (char c : text.substr(1)) {
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + static_cast<unsigned>(c - '0');
        }
        if (text.size() == 3 && text[1] == '0') return std::nullopt;
        if (v < 16) return v;
    }
    return std::nullopt;
}

std::string register_name(unsigned id) {
    switch (id) {
    case kRegSp: return "sp";
    case kRegZ: return "z";
    case kRegF: return "f";
    default: return "r" + std::to_string(id);
    }
}

IsaExprPtr IsaExpr::num(Word v, std::string symbol) {
    auto e = std::make_shared<IsaExpr>();
    e->kind = Kind::Num;
    e->value = v;
    e->symbol = std::move(symbol);
    return e;
}

IsaExprPtr IsaExpr::reg_ref(unsigned r) {
    auto e = std::make_shared<IsaExpr>();
    e->kind = Kind::Reg;
    e->reg = r;
    return e;
}

IsaExprPtr IsaExpr::deref(IsaExprPtr inner) {
    auto e = std::make_shared<IsaExpr>();
    e->kind = Kind::Deref;
    e->lhs = std::move(inner);
    return e;
}

IsaExprPtr IsaExpr::combine(Kind k, IsaExprPtr a, IsaExprPtr b) {
    auto e = std::make_shared<IsaExpr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

bool IsaExpr::is_constant() const {
    switch (kind) {
    case Kind::Num: return true;
    case Kind::Reg:
    case Kind::Deref: return false;
    default: return lhs->is_constant() && rhs->is_constant();
    }
}

std::optional<Word> IsaExpr::constant_value(Word mask) const {
    switch (kind) {
    case Kind::Num: return value & mask;
    case Kind::Reg:
    case Kind::Deref: return std::nullopt;
    default: break;
    }
    auto a = lhs->constant_value(mask);
    auto b = rhs->constant_value(mask);
    if (!a || !b) return std::nullopt;
    switch (kind) {
    case Kind::Add: return (*a + *b) & mask;
    case Kind::Sub: return (*a - *b) & mask;
    default: return *a & *b;
    }
}

bool same_expr(const IsaExprPtr& a, const IsaExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case IsaExpr::Kind::Num: return a->value == b->value;
    case IsaExpr::Kind::Reg: return a->reg == b->reg;
    case IsaExpr::Kind::Deref: return same_expr(a->lhs, b->lhs);
    default: return same_expr(a->lhs, b->lhs) && same_expr(a->rhs, b->rhs);
    }
}

std::string to_string(const IsaExprPtr& e) {
    using K = IsaExpr::Kind;
    switch (e->kind) {
    case K::Num: return e->symbol.empty() ? std::to_string(e->value) : e->symbol;
    case K::Reg: return register_name(e->reg);
    case K::Deref: return "[" + to_string(e->lhs) + "]";
    default: break;
    }
    const char* op = e->kind == K::Add ? " + " : e->kind == K::Sub ? " - " : " & ";
    std::string rhs = to_string(e->rhs);
    bool nested = e->rhs->kind == K::Add || e->rhs->kind == K::Sub || e->rhs->kind == K::And;
    return to_string(e->lhs) + op + (nested ? "(" + rhs + ")" : rhs);
}

std::string to_string(const Instruction& ins) {
    std::string out = opcode_name(ins.op);
    for (std::size_t i = 0; i < ins.args.size(); ++i) {
        out += i == 0 ? " " : ", ";
        out += to_string(ins.args[i]);
    }
    return out;
}

std::string to_string(const Location& loc) {
    if (loc.res == Resource::Reg) return register_name(static_cast<unsigned>(loc.where));
    return "[" + std::to_string(loc.where) + "]";
}

Word IsaProgram::mask() const { return mask_for(width); }

Word IsaProgram::entry_point() const {
    if (entry) return *entry;
    if (!code.empty()) return code.begin()->first;
    return 0;
}

const Instruction* IsaProgram::at(Word addr) const {
    auto it = code.find(addr);
    return it == code.end() ? nullptr : &it->second;
}

std::optional<Word> IsaProgram::symbol(const std::string& name) const {
    if (auto it = labels.find(name); it != labels.end()) return it->second;
    for (const auto& a : arrays) {
        if (a.name == name) return a.base;
    }
    return std::nullopt;
}

std::optional<std::string> IsaProgram::symbol_for(Word value) const {
    for (const auto& [name, v] : labels) {
        if (v == value) return name;
    }
    for (const auto& a : arrays) {
        if (a.base == value) return a.name;
    }
    return std::nullopt;
}

std::map<Word, Word> IsaProgram::memory_footprint() const {
    const Word m = mask();
    std::map<Word, Word> out;
    for (const auto& a : arrays) {
        for (Word i = 0; i < a.size; ++i) {
            out[(a.base + i) & m] = i < a.values.size() ? a.values[i] & m : 0;
        }
    }
    for (const auto& [addr, ins] : code) {
        for (const auto& arg : ins.args) {
            visit(arg, [&](const IsaExpr& e) {
                if (e.kind != IsaExpr::Kind::Deref) return;
                if (auto c = e.lhs->constant_value(m)) out.emplace(*c, 0);
            });
        }
    }
    for (const auto& s : secrets) {
        if (s.loc.res == Resource::Mem) out.emplace(s.loc.where, 0);
    }
    for (const auto& p : publics) {
        if (p.res == Resource::Mem) out.emplace(p.where, 0);
    }
    return out;
}

std::map<unsigned, Word> IsaProgram::register_footprint() const {
    std::set<unsigned> regs;
    for (const auto& [addr, ins] : code) {
        if (ins.op == Opcode::Call || ins.op == Opcode::Ret) regs.insert(kRegSp);
        for (const auto& arg : ins.args) {
            visit(arg, [&](const IsaExpr& e) {
                if (e.kind == IsaExpr::Kind::Reg) regs.insert(e.reg);
            });
        }
    }
    for (const auto& [r, v] : reg_init) regs.insert(r);
    for (const auto& s : secrets) {
        if (s.loc.res == Resource::Reg) regs.insert(static_cast<unsigned>(s.loc.where));
    }
    for (const auto& p : publics) {
        if (p.res == Resource::Reg) regs.insert(static_cast<unsigned>(p.where));
    }
    std::map<unsigned, Word> out;
    for (unsigned r : regs) {
        auto it = reg_init.find(r);
        out[r] = it == reg_init.end() ? 0 : it->second & mask();
    }
    return out;
}

std::vector<Word> IsaProgram::code_labels() const {
    std::set<Word> out;
    for (const auto& [name, v] : labels) {
        if (code.count(v)) out.insert(v);
    }
    return {out.begin(), out.end()};
}

IsaProgram parse_isa(std::string_view text) {
    const auto lines = detail::split_lines(text);
    IsaProgram prog;
    SymbolTable symbols;

    auto define = [&](TextCursor& cur, const std::string& name, Word value) {
        if (register_id(name) || opcode_from(name)) cur.fail("'" + name + "' is reserved");
        if (!symbols.emplace(name, value).second) cur.fail("duplicate symbol '" + name + "'");
    };

    // First pass: addresses of labels, arrays and constants.
    Word addr = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        TextCursor cur(lines[i], i + 1);
        for (const auto& l : take_labels(cur)) define(cur, l, addr);
        if (cur.at_end()) continue;
        if (cur.accept(".")) {
            auto d = cur.ident();
            if (!d) cur.fail("expected directive");
            if (*d == "org") {
                auto v = cur.number();
                if (!v) cur.fail("expected address");
                addr = *v;
            } else if (*d == "array" || *d == "equ") {
                auto name = cur.ident();
                if (!name) cur.fail("expected name");
                auto v = cur.number();
                if (!v) cur.fail("expected a numeric value");
                define(cur, *name, *v);
            }
            continue;
        }
        addr += kInstrStride;
    }

    // Second pass: everything else.
    addr = 0;
    std::optional<std::string> entry_symbol;
    std::set<Location> seen_secret;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        TextCursor cur(lines[i], i + 1);
        for (const auto& l : take_labels(cur)) prog.labels[l] = addr;
        if (cur.at_end()) continue;
        const Word m = mask_for(prog.width);
        if (cur.accept(".")) {
            auto d = cur.ident();
            if (*d == "org") {
                addr = *cur.number();
            } else if (*d == "equ") {
                auto name = cur.ident();
                prog.labels[*name] = *cur.number();
            } else if (*d == "width") {
                auto w = cur.number();
                if (!w || *w < 8 || *w > 64) cur.fail("width must be between 8 and 64");
                prog.width = static_cast<unsigned>(*w);
            } else if (*d == "entry") {
                prog.entry = parse_value(cur, symbols, m);
            } else if (*d == "array") {
                ArrayDecl a;
                a.name = *cur.ident();
                a.base = *cur.number();
                auto size = cur.number();
                if (!size) cur.fail("expected array size");
                a.size = *size;
                a.values = parse_value_list(cur, symbols, m);
                if (a.values.size() > a.size) cur.fail("more values than array cells");
                prog.arrays.push_back(std::move(a));
            } else if (*d == "reg") {
                auto name = cur.ident();
                auto r = name ? register_id(*name) : std::nullopt;
                if (!r) cur.fail("expected register");
                prog.reg_init[*r] = parse_value(cur, symbols, m);
            } else if (*d == "secret") {
                SecretDecl s;
                s.loc = parse_location(cur, symbols, m);
                s.candidates = parse_value_list(cur, symbols, m);
                if (s.candidates.empty()) cur.fail("secret needs at least one candidate value");
                if (!seen_secret.insert(s.loc).second) cur.fail("location declared secret twice");
                prog.secrets.push_back(std::move(s));
            } else if (*d == "public") {
                prog.publics.push_back(parse_location(cur, symbols, m));
            } else {
                cur.fail("unknown directive '." + *d + "'");
            }
            cur.expect_end();
            continue;
        }
        std::size_t op_column = cur.column();
        auto word = cur.ident();
        auto op = word ? opcode_from(*word) : std::nullopt;
        if (!op) throw ParseError(i + 1, op_column, "unknown opcode '" + word.value_or(cur.rest()) + "'");
        Instruction ins;
        ins.op = *op;
        ins.addr = addr;
        ins.line = i + 1;
        std::string_view shape = info(*op).shape;
        OperandParser p(cur, symbols);
        for (std::size_t k = 0; k < shape.size(); ++k) {
            if (shape[k] == '?') continue;
            bool optional = k + 1 < shape.size() && shape[k + 1] == '?';
            if (k > 0) {
                if (optional && cur.at_end()) break;
                cur.expect(",");
            }
            std::size_t col = cur.column();
            IsaExprPtr arg = p.expr();
            if (!shape_accepts(shape[k], arg)) {
                throw ParseError(i + 1, col,
                                 std::string(opcode_name(*op)) + " operand " + std::to_string(k + 1) +
                                     " must be " + shape_description(shape[k]));
            }
            ins.args.push_back(std::move(arg));
        }
        cur.expect_end();
        if (prog.code.count(addr)) cur.fail("two instructions at the same address");
        prog.code.emplace(addr, std::move(ins));
        addr += kInstrStride;
    }

    for (const auto& s : prog.secrets) {
        for (const auto& pl : prog.publics) {
            if (pl == s.loc) throw ParseError(0, 0, to_string(s.loc) + " is both secret and public");
        }
    }
    return prog;
}

IsaProgram load_isa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_isa(buf.str());
}

std::string print_isa(const IsaProgram& prog) {
    std::ostringstream out;
    if (prog.width != 64) out << ".width " << prog.width << "\n";
    std::map<Word, std::vector<std::string>> code_labels;
    for (const auto& [name, v] : prog.labels) {
        if (prog.code.count(v)) {
            code_labels[v].push_back(name);
        } else {
            out << ".equ " << name << " " << v << "\n";
        }
    }
    for (const auto& a : prog.arrays) {
        out << ".array " << a.name << " " << a.base << " " << a.size;
        if (!a.values.empty()) {
            out << " [";
            for (std::size_t i = 0; i < a.values.size(); ++i) out << (i ? ", " : "") << a.values[i];
            out << "]";
        }
        out << "\n";
    }
    for (const auto& [r, v] : prog.reg_init) out << ".reg " << register_name(r) << " " << v << "\n";
    for (const auto& s : prog.secrets) {
        out << ".secret " << to_string(s.loc);
        for (Word c : s.candidates) out << " " << c;
        out << "\n";
    }
    for (const auto& p : prog.publics) out << ".public " << to_string(p) << "\n";
    if (prog.entry) out << ".entry " << *prog.entry << "\n";
    std::optional<Word> next;
    for (const auto& [addr, ins] : prog.code) {
        if (!next || *next != addr) out << ".org " << addr << "\n";
        for (const auto& l : code_labels[addr]) out << l << ":\n";
        out << "    " << to_string(ins) << "\n";
        next = addr + kInstrStride;
    }
    return out.str();
}

bool same_program(const IsaProgram& a, const IsaProgram& b) {
    if (a.width != b.width || a.entry != b.entry || a.labels != b.labels) return false;
    if (a.reg_init != b.reg_init || a.publics != b.publics) return false;
    if (a.arrays.size() != b.arrays.size() || a.secrets.size() != b.secrets.size()) return false;
    for (std::size_t i = 0; i < a.arrays.size(); ++i) {
        const auto& x = a.arrays[i];
        const auto& y = b.arrays[i];
        if (x.name != y.name || x.base != y.base || x.size != y.size || x.values != y.values) return false;
    }
    for (std::size_t i = 0; i < a.secrets.size(); ++i) {
        if (a.secrets[i].loc != b.secrets[i].loc || a.secrets[i].candidates != b.secrets[i].candidates) {
            return false;
        }
    }
    if (a.code.size() != b.code.size()) return false;
    for (auto ia = a.code.begin(), ib = b.code.begin(); ia != a.code.end(); ++ia, ++ib) {
        const auto& x = ia->second;
        const auto& y = ib->second;
        if (ia->first != ib->first || x.op != y.op || x.args.size() != y.args.size()) return false;
        for (std::size_t k = 0; k < x.args.size(); ++k) {
            if (!same_expr(x.args[k], y.args[k])) return false;
        }
    }
    return true;
}

}  // namespace inspectre
