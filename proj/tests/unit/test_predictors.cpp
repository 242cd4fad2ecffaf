#include <algorithm>
#include <stdexcept>

#include <gtest/gtest.h>

#include "inspectre/isa.hpp"
#include "inspectre/predictors.hpp"
#include "inspectre/security.hpp"
#include "test_support.hpp"

namespace inspectre {
namespace {

using testing::must_step;
using testing::nm;

// Runs the OoO semantics greedily, never executing the `held` names, until
// nothing else is enabled.
OooState run_except(const std::string& isa, std::initializer_list<Name> held) {
    OooState st = Scenario::from_isa(parse_isa(isa)).initial();
    for (;;) {
        const auto steps = enabled(st);
        auto it = std::find_if(steps.begin(), steps.end(), [&](const StepParam& p) {
            return std::find(held.begin(), held.end(), p.name) == held.end();
        });
        if (it == steps.end()) return st;
        st = step(st, *it).state;
    }
}

using Values = boost::container::flat_set<Word>;

TEST(BranchPredictor, GuessesBothOutcomesOfAnUnresolvedGuard) {
    // Instruction 2 is the branch; its register read is held back.
    const OooState st = run_except("a: loadi r1, 1\nb: beq r1, d\nc: halt\nd: halt\n", {nm(2, 1)});
    const PredictionMap p = BranchPredictor{}.predict(st);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.begin()->first, nm(2, 2));
    EXPECT_EQ(p.begin()->second, (Values{0, 1}));
}

TEST(BranchPredictor, ResolvedGuardNeedsNoPrediction) {
    const OooState st = run_except("a: loadi r1, 1\nb: beq r1, d\nc: halt\nd: halt\n", {});
    EXPECT_TRUE(BranchPredictor{}.predict(st).empty());
}

TEST(BtbPredictor, GuessesConfiguredTargets) {
    const std::string prog = ".reg r2 4\na: jmpi r2\nb: halt\ng: halt\n";
    const OooState st = run_except(prog, {nm(1, 1)});
    const PredictionMap all = BtbPredictor{}.predict(st);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all.begin()->first, nm(1, 2));
    EXPECT_EQ(all.begin()->second, (Values{0, 4, 8}));
    const PredictionMap only = BtbPredictor{std::vector<Word>{8}}.predict(st);
    EXPECT_EQ(only.at(nm(1, 2)), (Values{8}));
}

TEST(RsbPredictor, PredictsTheReturnAddressOfTheMatchingCall) {
    // The return's stack load (micro 2 of instruction 2) is held back.
    const std::string prog = ".reg sp 0x100\na: call callee\nb: halt\ncallee: ret\n";
    const OooState st = run_except(prog, {nm(2, 2)});
    const PredictionMap p = RsbPredictor(4, false).predict(st);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.begin()->first, nm(2, 5));
    EXPECT_EQ(p.begin()->second, (Values{4}));
    EXPECT_EQ(rsb_depths(st, nm(1, 6), nm(2, 6)), (std::set<long>{1}));
    EXPECT_TRUE(RsbPredictor(0, false).predict(st).empty());
}

TEST(RsbPredictor, FallsBackToJumpTargetsWhenNestedTooDeep) {
    const std::string prog = ".reg sp 0x100\na: call callee\nb: halt\ncallee: ret\n";
    const OooState st = run_except(prog, {nm(2, 2)});
    EXPECT_TRUE(RsbPredictor(0, false).predict(st).empty());
    const PredictionMap p = RsbPredictor(0, true, std::vector<Word>{8}).predict(st);
    EXPECT_EQ(p.at(nm(2, 5)), (Values{8}));
}

const std::string kStoreThenLoad = ".array D 0x40 2\n.reg r3 0x41\n"
                                   "a: store [r3], 1\nb: load r1, [D + 1]\nc: halt\n";

TEST(StorePredictor, BypassGuessesEveryOtherAddress) {
    const OooState st = run_except(kStoreThenLoad, {nm(1, 1)});
    const PredictionMap p = StorePredictor(StorePredictor::Mode::Bypass).predict(st);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.begin()->first, nm(1, 2));
    EXPECT_FALSE(p.begin()->second.count(0x41));
    EXPECT_TRUE(p.begin()->second.count(0x40));
}

TEST(StorePredictor, DependencyGuessesTheLoadAddress) {
    const OooState st = run_except(kStoreThenLoad, {nm(1, 1)});
    const PredictionMap p = StorePredictor(StorePredictor::Mode::Dependency).predict(st);
    EXPECT_EQ(p.at(nm(1, 2)), (Values{0x41}));
}

TEST(Factory, KnownNamesAndErrors) {
    for (const auto& n : predictor_names()) EXPECT_EQ(make_predictor(n)->name(), n);
    for (const auto& n : constraint_names()) EXPECT_EQ(make_constraint(n)->name(), n);
    EXPECT_THROW(make_predictor("oracle"), std::invalid_argument);
    EXPECT_THROW(make_constraint("none"), std::invalid_argument);
    EXPECT_EQ(make_config({"br", "stl"}, {"ssbs"}).predictors.size(), 2u);
}

TEST(FetchOnly, MemoryAccessWaitsForOlderSpeculation) {
    SpecState h = testing::spec_from_mil(".mem 1 0\nt1_1 : true ? 1\nt1_2 : true ? ld M t1_1\n");
    h = must_step(h, SpecRule::Prd, nm(1, 1), 1);
    const FetchOnlyConstraint c;
    EXPECT_FALSE(c.allows(h, SpecStep{SpecRule::Exe, nm(1, 2)}));
    h = must_step(h, SpecRule::Pexe, nm(1, 1));
    h = must_step(h, SpecRule::Ret, nm(1, 1));
    EXPECT_TRUE(c.allows(h, SpecStep{SpecRule::Exe, nm(1, 2)}));
}

TEST(Lfence, YoungerAccessesWaitForTheFence) {
    SpecState h = testing::spec_from_mil(".mem 1 0\nt1_1 : true ? 0 @fence\nt2_1 : true ? 1\nt2_2 : true ? ld M t2_1\n");
    h = must_step(h, SpecRule::Exe, nm(2, 1));
    const LfenceConstraint c;
    EXPECT_FALSE(c.allows(h, SpecStep{SpecRule::Exe, nm(2, 2)}));
    EXPECT_TRUE(c.allows(h, SpecStep{SpecRule::Exe, nm(1, 1)}));
    h = must_step(h, SpecRule::Exe, nm(1, 1));
    EXPECT_FALSE(c.allows(h, SpecStep{SpecRule::Exe, nm(2, 2)}));
    h = must_step(h, SpecRule::Ret, nm(1, 1));
    EXPECT_TRUE(c.allows(h, SpecStep{SpecRule::Exe, nm(2, 2)}));
}

TEST(Lfence, FenceWaitsForOlderLoads) {
    SpecState h = testing::spec_from_mil(".mem 1 0\nt1_1 : true ? 1\nt1_2 : true ? ld M t1_1\nt2_1 : true ? 0 @fence\n");
    const LfenceConstraint c;
    EXPECT_FALSE(c.allows(h, SpecStep{SpecRule::Exe, nm(2, 1)}));
    h = must_step(h, SpecRule::Exe, nm(1, 1));
    h = must_step(h, SpecRule::Exe, nm(1, 2));
    EXPECT_FALSE(c.allows(h, SpecStep{SpecRule::Exe, nm(2, 1)}));
    h = must_step(h, SpecRule::Ret, nm(1, 1));
    h = must_step(h, SpecRule::Ret, nm(1, 2));
    EXPECT_TRUE(c.allows(h, SpecStep{SpecRule::Exe, nm(2, 1)}));
}

TEST(Ssbs, LoadMayNotBypassAMispredictedStoreAddress) {
    const char* mil = ".mem 1 0\n.mem 2 0\nt1_1 : true ? 1\nt1_2 : true ? st M t1_1, 5\n"
                      "t2_1 : true ? 1\nt2_2 : true ? ld M t2_1\n";
    SpecState h = testing::spec_from_mil(mil);
    h = must_step(h, SpecRule::Exe, nm(2, 1));
    const SsbsConstraint c;
    const SpecState wrong = must_step(h, SpecRule::Prd, nm(1, 1), 2);
    EXPECT_FALSE(c.allows(wrong, SpecStep{SpecRule::Exe, nm(2, 2)}));
    const SpecState right = must_step(h, SpecRule::Prd, nm(1, 1), 1);
    EXPECT_TRUE(c.allows(right, SpecStep{SpecRule::Exe, nm(2, 2)}));
}

TEST(SpecConfig, ConstraintsFilterEnabledSteps) {
    SpecState h = testing::spec_from_mil(".mem 1 0\nt1_1 : true ? 0 @fence\nt2_1 : true ? 1\nt2_2 : true ? ld M t2_1\n");
    h = must_step(h, SpecRule::Exe, nm(2, 1));
    const SpecConfig free = make_config({}, {});
    const SpecConfig fenced = make_config({}, {"lfence"});
    auto has_load = [](const std::vector<SpecStep>& steps) {
        return std::any_of(steps.begin(), steps.end(),
                           [](const SpecStep& p) { return p.rule == SpecRule::Exe && p.name == nm(2, 2); });
    };
    EXPECT_TRUE(has_load(spec_enabled(h, free)));
    EXPECT_FALSE(has_load(spec_enabled(h, fenced)));
    EXPECT_TRUE(has_load(spec_enabled_unconstrained(h, fenced)));
}

}  // namespace
}  // namespace inspectre
