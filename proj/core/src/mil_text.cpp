#include "inspectre/mil_text.hpp"

#include <fstream>
#include <sstream>

#include "inspectre/isa.hpp"
#include "text_cursor.hpp"

namespace inspectre {

using detail::TextCursor;

namespace {

std::optional<Name> parse_name_token(const std::string& id, std::uint32_t template_instr) {
    if (id.size() < 3 || id[0] != 't') return std::nullopt;
    auto us = id.find('_');
    if (us == std::string::npos || us + 1 >= id.size()) return std::nullopt;
    auto digits = [](std::string_view s) {
        if (s.empty()) return false;
        for (char c : s) {
            if (c < '0' || c > '9') return false;
        }
        return true;
    };
    std::string_view instr = std::string_view(id).substr(1, us - 1);
    std::string_view micro = std::string_view(id).substr(us + 1);
    if (!digits(micro) || (!instr.empty() && !digits(instr))) return std::nullopt;
    Name n;
    n.instr = instr.empty() ? template_instr : static_cast<std::uint32_t>(std::stoul(std::string(instr)));
    n.micro = static_cast<std::uint32_t>(std::stoul(std::string(micro)));
    if (n.micro == 0) return std::nullopt;
    return n;
}

class ExprParser {
public:
    ExprParser(TextCursor& cur, std::uint32_t template_instr) : cur_(cur), tmpl_(template_instr) {}

    Expr parse() { return disjunction(); }

    Name name() {
        auto id = cur_.ident();
        auto n = id ? parse_name_token(*id, tmpl_) : std::nullopt;
        if (!n) cur_.fail("expected a name like t1_2");
        return *n;
    }

private:
    Expr disjunction() {
        Expr lhs = conjunction();
        while (cur_.accept("||") || cur_.accept("|")) lhs = Expr::binary(ExprOp::Or, lhs, conjunction());
        return lhs;
    }

    Expr conjunction() {
        Expr lhs = comparison();
        while (cur_.accept("&&") || cur_.accept("&")) lhs = Expr::binary(ExprOp::And, lhs, comparison());
        return lhs;
    }

    Expr comparison() {
        Expr lhs = additive();
        if (cur_.accept("==") || cur_.accept("=")) return Expr::binary(ExprOp::Eq, lhs, additive());
        if (cur_.accept("!=")) return Expr::binary(ExprOp::Ne, lhs, additive());
        if (cur_.accept(">=")) return Expr::binary(ExprOp::Ge, lhs, additive());
        if (cur_.accept("<")) return Expr::binary(ExprOp::Lt, lhs, additive());
        return lhs;
    }

    Expr additive() {
        Expr lhs = multiplicative();
        for (;;) {
            if (cur_.accept("+")) {
                lhs = lhs + multiplicative();
            } else if (cur_.accept("-")) {
                lhs = lhs - multiplicative();
            } else {
                return lhs;
            }
        }
    }

    Expr multiplicative() {
        Expr lhs = unary();
        while (cur_.accept("*")) lhs = lhs * unary();
        return lhs;
    }

    Expr unary() {
        if (cur_.peek() == '!' && cur_.peek_raw(1) != '=') {
            cur_.accept("!");
            return Expr::negate(unary());
        }
        if (cur_.accept("(")) {
            Expr e = parse();
            cur_.expect(")");
            return e;
        }
        if (auto v = cur_.number()) return Expr::lit(*v);
        auto id = cur_.ident();
        if (!id) cur_.fail("expected expression");
        if (*id == "true") return Expr::lit(1);
        if (*id == "false") return Expr::lit(0);
        if (*id == "sel") {
            cur_.expect("(");
            Expr c = parse();
            cur_.expect(",");
            Expr a = parse();
            cur_.expect(",");
            Expr b = parse();
            cur_.expect(")");
            return Expr::select(c, a, b);
        }
        if (auto n = parse_name_token(*id, tmpl_)) return Expr::ref(*n);
        if (auto r = register_id(*id)) return Expr::lit(*r);
        cur_.fail("unknown identifier '" + *id + "'");
    }

    TextCursor& cur_;
    std::uint32_t tmpl_;
};

Resource parse_resource(TextCursor& cur) {
    if (cur.accept("PC")) return Resource::Pc;
    if (cur.accept("M")) return Resource::Mem;
    if (cur.accept("R")) return Resource::Reg;
    cur.fail("expected resource M, R or PC");
}

Micro parse_micro(TextCursor& cur, std::uint32_t tmpl) {
    ExprParser p(cur, tmpl);
    Micro m;
    m.name = p.name();
    cur.expect(":");
    m.guard = p.parse();
    cur.expect("?");
    TextCursor probe = cur;
    auto word = probe.ident();
    if (word && (*word == "ld" || *word == "st")) {
        cur = probe;
        m.kind = *word == "ld" ? MicroKind::Load : MicroKind::Store;
        m.res = parse_resource(cur);
        if (m.kind == MicroKind::Load) {
            if (m.res != Resource::Pc) m.addr = p.parse();
        } else {
            if (m.res != Resource::Pc) {
                m.addr = p.parse();
                cur.expect(",");
            }
            m.value = p.parse();
        }
    } else {
        m.kind = MicroKind::Internal;
        m.value = p.parse();
    }
    while (cur.accept("@")) {
        auto tag = cur.ident();
        if (!tag) cur.fail("expected tag");
        if (*tag == "ijmp") {
            m.tags |= kTagIndirectJump;
        } else if (*tag == "call") {
            m.tags |= kTagCall;
            if (cur.accept("(")) {
                m.link = p.name();
                cur.expect(")");
            }
        } else if (*tag == "ret") {
            m.tags |= kTagReturn;
        } else if (*tag == "fence") {
            m.tags |= kTagFence;
        } else if (*tag == "halt") {
            m.tags |= kTagHalt;
        } else if (*tag == "ra") {
            m.tags |= kTagReturnAddress;
        } else {
            cur.fail("unknown tag '@" + *tag + "'");
        }
    }
    cur.expect_end();
    return m;
}

Word parse_number(TextCursor& cur) {
    auto v = cur.number();
    if (!v) cur.fail("expected number");
    return *v;
}

std::string template_name(Name n) { return "t_" + std::to_string(n.micro); }

}  // namespace

Word MilProgram::mask() const { return width >= 64 ? ~Word{0} : ((Word{1} << width) - 1); }

std::vector<std::vector<Micro>> MilProgram::decoded_blocks() const {
    std::vector<std::vector<Micro>> out;
    for (const auto& m : micros) {
        if (out.size() < m.name.instr) out.resize(m.name.instr);
        out[m.name.instr - 1].push_back(m);
    }
    return out;
}

Micro parse_micro_line(std::string_view line, std::uint32_t template_instr) {
    TextCursor cur(line, 1);
    return parse_micro(cur, template_instr);
}

MilProgram parse_mil(std::string_view text) {
    MilProgram prog;
    const auto lines = detail::split_lines(text);
    std::optional<Word> code_addr;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        TextCursor cur(lines[i], i + 1);
        if (cur.at_end()) continue;
        if (cur.accept(".")) {
            auto d = cur.ident();
            if (!d) cur.fail("expected directive");
            if (*d == "end") {
                if (!code_addr) cur.fail(".end without .code");
                code_addr.reset();
            } else if (code_addr) {
                cur.fail("directive inside .code block");
            } else if (*d == "width") {
                Word w = parse_number(cur);
                if (w < 8 || w > 64) cur.fail("width must be between 8 and 64");
                prog.width = static_cast<unsigned>(w);
            } else if (*d == "reg") {
                Word r;
                if (auto v = cur.number()) {
                    r = *v;
                } else {
                    auto id = cur.ident();
                    auto reg = id ? register_id(*id) : std::nullopt;
                    if (!reg) cur.fail("expected register");
                    r = *reg;
                }
                prog.regs[r] = parse_number(cur);
            } else if (*d == "mem") {
                Word a = parse_number(cur);
                prog.mem[a] = parse_number(cur);
            } else if (*d == "pc") {
                prog.pc = parse_number(cur);
            } else if (*d == "code") {
                code_addr = parse_number(cur);
                if (prog.code.count(*code_addr)) cur.fail("address already has code");
                prog.code[*code_addr];
            } else {
                cur.fail("unknown directive '." + *d + "'");
            }
            cur.expect_end();
            continue;
        }
        std::size_t col = cur.column();
        if (code_addr) {
            Micro m = parse_micro(cur, 0);
            auto& block = prog.code[*code_addr];
            if (m.name.instr != 0 || m.name.micro != block.size() + 1) {
                throw ParseError(i + 1, col, "template micros must be named t_1, t_2, ... in order");
            }
            block.push_back(std::move(m));
        } else {
            Micro m = parse_micro(cur, 0);
            if (m.name.instr == 0) throw ParseError(i + 1, col, "instruction index 0 is reserved for the boot image");
            Name expected{1, 1};
            if (!prog.micros.empty()) {
                Name prev = prog.micros.back().name;
                expected = m.name.instr == prev.instr ? Name{prev.instr, prev.micro + 1}
                                                      : Name{prev.instr + 1, 1};
            }
            if (m.name != expected) {
                throw ParseError(i + 1, col, "expected " + to_string(expected) + " (names must be contiguous)");
            }
            prog.micros.push_back(std::move(m));
        }
    }
    if (code_addr) throw ParseError(lines.size(), 1, "missing .end");
    return prog;
}

MilProgram load_mil_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_mil(buf.str());
}

std::string print_mil(const MilProgram& prog) {
    std::ostringstream out;
    if (prog.width != 64) out << ".width " << prog.width << "\n";
    for (const auto& [r, v] : prog.regs) out << ".reg " << r << " " << v << "\n";
    for (const auto& [a, v] : prog.mem) out << ".mem " << a << " " << v << "\n";
    if (prog.pc) out << ".pc " << *prog.pc << "\n";
    for (const auto& m : prog.micros) out << to_string(m) << "\n";
    for (const auto& [addr, micros] : prog.code) {
        out << ".code " << addr << "\n";
        for (const auto& m : micros) out << to_string(m, template_name) << "\n";
        out << ".end\n";
    }
    return out.str();
}

bool same_program(const MilProgram& a, const MilProgram& b) {
    return a.width == b.width && a.regs == b.regs && a.mem == b.mem && a.pc == b.pc &&
           a.micros == b.micros && a.code == b.code;
}

}  // namespace inspectre
