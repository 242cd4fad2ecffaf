#include <set>

#include <gtest/gtest.h>

#include "inspectre/errors.hpp"
#include "inspectre/isa.hpp"
#include "inspectre/mil_text.hpp"
#include "inspectre/translate.hpp"
#include "instruction_forms.hpp"

namespace inspectre {
namespace {

std::set<ViolationKind> kinds(const std::vector<Violation>& vs) {
    std::set<ViolationKind> out;
    for (const auto& v : vs) out.insert(v.kind);
    return out;
}

std::string describe(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) out += std::string(violation_name(v.kind)) + " at " + to_string(v.at) + ": " + v.detail + "\n";
    return out;
}

TEST(Translation, EveryInstructionFormIsWellformed) {
    const auto forms = testing::all_instruction_forms();
    std::set<Opcode> covered;
    for (const auto& f : forms) {
        const Name after{3, 7};
        const BlockPtr block = translate(f.program, 0, after);
        ASSERT_FALSE(block->micros.empty()) << f.text;
        EXPECT_EQ(block->instr, after.instr + 1) << f.text;
        const auto props = check_translation_properties(block->micros, after);
        EXPECT_TRUE(props.empty()) << f.text << "\n" << describe(props);
        const auto wf = check_translation_wellformed(block->micros);
        EXPECT_TRUE(wf.empty()) << f.text << "\n" << describe(wf);
        covered.insert(f.op);
    }
    EXPECT_EQ(covered.size(), all_opcodes().size());
}

TEST(Translation, MicroNamesAreContiguous) {
    for (const auto& f : testing::all_instruction_forms()) {
        const BlockPtr block = translate(f.program, 0, Name{0, 1});
        for (std::size_t j = 0; j < block->micros.size(); ++j) {
            EXPECT_EQ(block->micros[j].name, (Name{1, static_cast<std::uint32_t>(j + 1)})) << f.text;
        }
    }
}

TEST(Translation, ConditionalBranchGuardsAreExclusive) {
    const IsaProgram prog = parse_isa("a: beq r1, b\nb: halt\n");
    const BlockPtr block = translate(prog, 0, Name{0, 0});
    std::size_t pc_stores = 0;
    for (const auto& m : block->micros) pc_stores += m.is_store(Resource::Pc) ? 1 : 0;
    EXPECT_EQ(pc_stores, 2u);
    EXPECT_TRUE(check_translation_wellformed(block->micros).empty());
}

TEST(Translation, TwoUnconditionalPcStoresAreRejected) {
    const MilProgram prog = parse_mil("t1_1 : true ? st PC 4\nt1_2 : true ? st PC 8\n");
    EXPECT_TRUE(kinds(check_translation_wellformed(prog.micros)).count(ViolationKind::NonUniquePcStore));
}

TEST(Translation, MissingPcStoreIsRejected) {
    const MilProgram prog = parse_mil("t1_1 : true ? 1\n");
    EXPECT_TRUE(kinds(check_translation_wellformed(prog.micros)).count(ViolationKind::NonUniquePcStore));
}

TEST(Translation, PcNameReadInsideInstructionIsRejected) {
    const MilProgram prog = parse_mil("t1_1 : true ? st PC 4\nt1_2 : true ? t1_1 + 1\n");
    EXPECT_TRUE(kinds(check_translation_wellformed(prog.micros)).count(ViolationKind::PcNameUsed));
}

TEST(Translation, PcLoadAfterPcStoreIsRejected) {
    const MilProgram prog = parse_mil("t1_1 : true ? st PC 4\nt1_2 : true ? ld PC\n");
    EXPECT_TRUE(kinds(check_translation_wellformed(prog.micros)).count(ViolationKind::PcLoadAfterStore));
}

TEST(Translation, NamingViolationsAreReported) {
    const MilProgram fwd = parse_mil("t1_1 : true ? t1_2\nt1_2 : true ? 1\n");
    EXPECT_TRUE(kinds(check_translation_properties(fwd.micros, Name{0, 0})).count(ViolationKind::ForwardReference));
    const MilProgram stale = parse_mil("t1_1 : true ? 1\n");
    EXPECT_TRUE(kinds(check_translation_properties(stale.micros, Name{1, 4})).count(ViolationKind::StaleName));
}

TEST(Translation, UndecodableAddressThrows) {
    const IsaProgram prog = parse_isa("a: halt\n");
    EXPECT_THROW(translate(prog, 0x400, Name{0, 0}), UndecodableAddress);
}

TEST(IsaText, SingleInstructionProgram) {
    const IsaProgram prog = parse_isa("a1: loadi r1, 0\n");
    ASSERT_EQ(prog.code.size(), 1u);
    EXPECT_EQ(prog.code.begin()->second.op, Opcode::Loadi);
    EXPECT_EQ(prog.labels.at("a1"), 0u);
}

TEST(IsaText, BoundsCheckProgramHasFourInstructions) {
    const IsaProgram prog = load_isa_file(INSPECTRE_CORPUS_DIR "/spectre_pht.isa");
    EXPECT_EQ(prog.code.size(), 4u);
    ASSERT_EQ(prog.secrets.size(), 1u);
    EXPECT_EQ(prog.secrets[0].candidates, (std::vector<Word>{5, 9}));
}

TEST(IsaText, MalformedInputReportsPosition) {
    EXPECT_THROW(parse_isa("a: frobnicate r1\n"), ParseError);
    try {
        parse_isa("a: halt\nb: load r1\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(IsaText, PrintedFormsRoundTrip) {
    for (const auto& f : testing::all_instruction_forms()) {
        const IsaProgram again = parse_isa(print_isa(f.program));
        EXPECT_TRUE(same_program(f.program, again)) << f.text << "\n" << print_isa(f.program);
    }
}

TEST(MilText, CorpusProgramRoundTrips) {
    const MilProgram prog = load_mil_file(INSPECTRE_CORPUS_DIR "/store_chain.mil");
    EXPECT_EQ(prog.micros.size(), 8u);
    EXPECT_TRUE(same_program(prog, parse_mil(print_mil(prog))));
    EXPECT_THROW(parse_mil("t1_1 : true ? ld Q 3\n"), ParseError);
}

TEST(Expressions, EvaluationIsMonotoneInTheStorage) {
    const Name a{1, 1}, b{1, 2};
    const Expr e = Expr::binary(ExprOp::Add, Expr::ref(a), Expr::binary(ExprOp::Mul, Expr::ref(b), Expr::lit(3)));
    Storage s{{a, 2}};
    EXPECT_FALSE(eval_expr(e, s).has_value());
    s[b] = 4;
    EXPECT_EQ(eval_expr(e, s), 14u);
    s[Name{2, 1}] = 99;
    EXPECT_EQ(eval_expr(e, s), 14u);
}

TEST(Expressions, ArithmeticWrapsAtTheWordWidth) {
    const Expr e = Expr::binary(ExprOp::Add, Expr::lit(0xff), Expr::lit(1));
    EXPECT_EQ(eval_expr(e, {}, 0xff), 0u);
    EXPECT_EQ(eval_expr(Expr::negate(Expr::lit(0)), {}), 1u);
    EXPECT_EQ(eval_expr(Expr::select(Expr::lit(0), Expr::lit(4), Expr::lit(5)), {}), 5u);
}

TEST(Names, OrderIsLexicographic) {
    EXPECT_LT((Name{1, 9}), (Name{2, 1}));
    EXPECT_LT((Name{2, 1}), (Name{2, 2}));
    EXPECT_EQ(to_string(Name{4, 2}), "t4_2");
}

}  // namespace
}  // namespace inspectre
