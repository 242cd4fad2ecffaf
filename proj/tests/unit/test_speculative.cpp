#include <gtest/gtest.h>

#include "inspectre/errors.hpp"
#include "inspectre/explore.hpp"
#include "inspectre/predictors.hpp"
#include "test_support.hpp"

namespace inspectre {
namespace {

using testing::names;
using testing::nm;

const Name t11 = nm(1, 1), t12 = nm(1, 2), t21 = nm(2, 1), t22 = nm(2, 2), t31 = nm(3, 1), t32 = nm(3, 2),
           t41 = nm(4, 1), t42 = nm(4, 2);

// Store chain whose third store writes `third` and whose stores and
// address computations have all executed, except the load.
std::string chain(Word third) {
    return ".mem 0 0\n.mem 1 0\n.mem 2 0\n.mem 5 0\n"
           "t1_1 : true ? 1\nt1_2 : true ? st M t1_1, 1\n"
           "t2_1 : true ? 0\nt2_2 : true ? st M t2_1, 2\n"
           "t3_1 : true ? " + std::to_string(third) + "\nt3_2 : true ? st M t3_1, 3\n"
           "t4_1 : true ? 1\nt4_2 : true ? ld M t4_1\n";
}

OooState executed(Word third, std::initializer_list<Name> list) {
    OooState st = testing::ooo_from_mil(chain(third));
    for (Name t : list) st = step(st, StepParam{Rule::Exe, t}).state;
    return st;
}

TEST(Deps, LoadDependsOnActiveStoresAndTheirSources) {
    const OooState st = executed(1, {t11, t21, t41});
    EXPECT_EQ(asn(st, t42), names({t12, t32}));
    EXPECT_EQ(srcs(st, t42), names({t11, t21, t31}));
    EXPECT_EQ(deps(st, t42), names({t12, t32, t11, t21, t31, t41}));
}

TEST(Deps, NonLoadDependsOnItsOperands) {
    const OooState st = executed(1, {});
    EXPECT_EQ(deps(st, t32), names({t31}));
    EXPECT_TRUE(deps_x(st, t32).empty());
    EXPECT_TRUE(deps(st, t11).empty());
}

TEST(Deps, ResolvedAdjacentStoreLimitsSources) {
    const OooState st = executed(1, {t11, t21, t31, t41});
    EXPECT_EQ(asn(st, t42), names({t32}));
    EXPECT_EQ(srcs(st, t42), names({t31}));
}

TEST(TEquivalence, DifferentActiveStoresAreDistinguished) {
    const OooState s1 = executed(1, {t11, t12, t21, t22, t31, t32, t41});
    const OooState s2 = executed(0, {t11, t12, t21, t22, t31, t32, t41});
    EXPECT_EQ(bound_names(str_act(s1, t42)), names({t32}));
    EXPECT_EQ(bound_names(str_act(s2, t42)), names({t12}));
    EXPECT_FALSE(t_equivalent(s1, s2, t42));
    EXPECT_FALSE(t_equivalent(s2, s1, t42));
}

TEST(TEquivalence, SameActiveStoreAndValueAreEquivalent) {
    const OooState s2 = executed(0, {t11, t12, t21, t22, t31, t32, t41});
    const OooState s3 = executed(5, {t11, t12, t21, t22, t31, t32, t41});
    EXPECT_TRUE(t_equivalent(s2, s3, t42));
    EXPECT_TRUE(t_equivalent(s3, s2, t42));
}

TEST(TEquivalence, Reflexive) {
    const OooState st = executed(1, {t11, t21, t41});
    for (Name t : {t11, t12, t32, t42}) EXPECT_TRUE(t_equivalent(st, st, t)) << to_string(t);
}

TEST(TEquivalence, StorageOverloadComparesOperands) {
    const OooState st = executed(1, {t11, t31});
    Storage a = st.s, b = st.s;
    b[t31] = 2;
    EXPECT_TRUE(t_equivalent(st, a, a, t32));
    EXPECT_FALSE(t_equivalent(st, a, b, t32));
    EXPECT_TRUE(t_equivalent(st, a, b, t12));
}

TEST(RetireAll, RetiresEverythingNotSpeculative) {
    SpecState h = spec_initial(executed(1, {}));
    for (Name t : {t11, t21, t31, t41}) h = apply_spec_step(h, SpecStep{SpecRule::Exe, t}).state;
    EXPECT_FALSE(h.delta.empty());
    const SpecState r = retire_all(h, SpecConfig{});
    EXPECT_TRUE(r.delta.empty());
    EXPECT_EQ(r.base, h.base);
}

TEST(RetireAll, KeepsNamesThatDependOnAPrediction) {
    SpecState h = spec_initial(executed(1, {}));
    h = testing::must_step(h, SpecRule::Prd, t31, 1);
    h = testing::must_step(h, SpecRule::Exe, t32);
    const SpecState r = retire_all(h, SpecConfig{});
    EXPECT_FALSE(r.retired(t31));
    EXPECT_FALSE(r.retired(t32));
}

// A predicted address moves the first store away from address 1; the
// younger store to 1 must still wait for it.
TEST(SpecRules, CommitWaitsForPredictedOlderStoreAddresses) {
    SpecState h = spec_initial(executed(1, {}));
    h = testing::must_step(h, SpecRule::Prd, t11, 0);
    for (Name t : {t12, t21, t22, t31, t32}) h = testing::must_step(h, SpecRule::Exe, t);
    h = retire_all(h, SpecConfig{});
    ASSERT_TRUE(h.retired(t32));
    EXPECT_TRUE(cmt_premise(h.base, t32).has_value());
    EXPECT_FALSE(spec_premise(h, SpecStep{SpecRule::Cmt, t32}));
    h = testing::must_step(h, SpecRule::Pexe, t11);
    h = retire_all(h, SpecConfig{});
    EXPECT_FALSE(spec_premise(h, SpecStep{SpecRule::Cmt, t32}));
    EXPECT_TRUE(spec_premise(h, SpecStep{SpecRule::Rbk, t12}));
}

TEST(Partition, InitialStateIsWellformed) {
    const SpecState h = spec_initial(executed(1, {}));
    const auto part = wellformed_partition(h);
    ASSERT_TRUE(part.has_value());
}

TEST(SpecRules, StepRejectsDisabledRule) {
    const SpecState h = spec_initial(executed(1, {}));
    EXPECT_THROW(spec_step(h, SpecStep{SpecRule::Exe, t42}), RuleNotEnabled);
    EXPECT_THROW(spec_step(h, SpecStep{SpecRule::Ret, t42}), RuleNotEnabled);
}

// Without predictors the speculative successors of a state are the OoO
// successors plus retirements.
TEST(SpecRules, NoPredictorMeansNoPrediction) {
    const SpecState h = spec_initial(executed(1, {t11}));
    for (const SpecStep& p : spec_enabled(h, SpecConfig{})) {
        EXPECT_NE(p.rule, SpecRule::Prd);
        EXPECT_NE(p.rule, SpecRule::Pexe);
        EXPECT_NE(p.rule, SpecRule::Rbk);
    }
}

}  // namespace
}  // namespace inspectre
