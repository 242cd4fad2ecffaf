// Replays of the two worked speculative executions: the mispredicted
// branch with a speculative fetch, and the mispredicted store address
// that lets a load bypass a store.

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace inspectre {
namespace {

using testing::must_step;
using testing::nm;

constexpr const char* kBranchProgram = R"(
.reg z 1
.mem 16 0
.pc 32
t1_1 : true ? ld R z
t1_2 : true ? (t1_1 = 1)
t1_3 : true ? ld PC
t1_4 : true ? st M 16, t1_1
t1_5 : t1_2 ? st PC 100
t1_6 : !t1_2 ? st PC t1_3 + 4
.code 36
t_1 : true ? 0
t_2 : true ? st PC 40
.end
)";

Storage storage(std::initializer_list<std::pair<Name, Word>> list) {
    Storage s;
    for (auto [n, v] : list) s.emplace(n, v);
    return s;
}

TEST(BranchMisprediction, ReplaysEveryStateOfTheTrace) {
    const SpecState h0 = testing::spec_from_mil(kBranchProgram);
    const Name t1 = nm(1, 1), t2 = nm(1, 2), t3 = nm(1, 3), t4 = nm(1, 4), t6 = nm(1, 6);

    SpecState h1 = must_step(h0, SpecRule::Prd, t2, 0);
    EXPECT_EQ(h1.base.value(t2), 0u);
    EXPECT_TRUE(h1.predicted.count(t2));
    EXPECT_TRUE(h1.delta.at(t2).empty());

    SpecState h = must_step(h1, SpecRule::Exe, t1);
    h = must_step(h, SpecRule::Ret, t1);
    h = must_step(h, SpecRule::Exe, t3);
    const SpecState h2 = must_step(h, SpecRule::Ret, t3);
    EXPECT_EQ(h2.base.value(t1), 1u);
    EXPECT_EQ(h2.base.value(t3), 32u);
    EXPECT_TRUE(h2.retired(t1));
    EXPECT_TRUE(h2.retired(t3));

    // The predicted guard selects the fall-through store.
    EXPECT_FALSE(spec_premise(h2, SpecStep{SpecRule::Exe, nm(1, 5)}));
    const SpecState h3 = must_step(h2, SpecRule::Exe, t6);
    EXPECT_EQ(h3.base.value(t6), 36u);
    EXPECT_EQ(h3.delta.at(t6), storage({{t2, 0}, {t3, 32}}));

    const SpecState h4 = must_step(h3, SpecRule::Exe, t4);
    EXPECT_EQ(h4.delta.at(t4), storage({{t1, 1}}));
    EXPECT_FALSE(spec_premise(h4, SpecStep{SpecRule::Cmt, t4}));

    const SpecState h5 = must_step(h4, SpecRule::Pexe, t2);
    EXPECT_EQ(h5.base.value(t2), 1u);
    EXPECT_EQ(h5.delta.at(t2), storage({{t1, 1}}));
    EXPECT_TRUE(h5.predicted.empty());
    // The mispredicted PC store is not rolled back eagerly.
    EXPECT_EQ(h5.base.value(t6), 36u);

    SpecResult fetch = spec_step(h5, SpecStep{SpecRule::Ftc, t6});
    EXPECT_EQ(fetch.obs, Observation::il(36));
    const SpecState& h6 = fetch.state;
    ASSERT_EQ(h6.base.instrs.size(), 3u);
    EXPECT_EQ(h6.delta.at(nm(2, 1)), storage({{t6, 36}}));
    EXPECT_EQ(h6.delta.at(nm(2, 2)), storage({{t6, 36}}));
    EXPECT_EQ(delta_plus(h6, t6), testing::names({nm(2, 1), nm(2, 2)}));
    EXPECT_FALSE(spec_premise(h6, SpecStep{SpecRule::Ret, t6}));

    const SpecState h7 = must_step(h6, SpecRule::Ret, t4);
    EXPECT_TRUE(h7.retired(t4));

    const SpecState h8 = must_step(h7, SpecRule::Rbk, t6);
    EXPECT_EQ(h8.base.instrs.size(), 2u);
    EXPECT_FALSE(h8.base.value(t6).has_value());
    EXPECT_FALSE(h8.base.fetched.count(t6));
    EXPECT_TRUE(h8.retired(t6));
    EXPECT_FALSE(h8.delta.count(nm(2, 1)));
    EXPECT_EQ(h8.delta.at(t2), storage({{t1, 1}}));
    EXPECT_TRUE(wellformed_partition(h8).has_value());

    SpecResult commit = spec_step(h8, SpecStep{SpecRule::Cmt, t4});
    EXPECT_EQ(commit.obs, Observation::ds(16));
    EXPECT_TRUE(commit.state.base.committed.count(t4));

    // The correct branch target is now reachable.
    SpecState h9 = must_step(commit.state, SpecRule::Ret, t2);
    h9 = must_step(h9, SpecRule::Exe, nm(1, 5));
    EXPECT_EQ(h9.base.value(nm(1, 5)), 100u);
}

std::string store_program(Word third_address) {
    return ".mem 0 0\n.mem 1 0\n"
           "t1_1 : true ? 1\nt1_2 : true ? st M t1_1, 1\n"
           "t2_1 : true ? 0\nt2_2 : true ? st M t2_1, 2\n"
           "t3_1 : true ? " + std::to_string(third_address) + "\nt3_2 : true ? st M t3_1, 3\n"
           "t4_1 : true ? 1\nt4_2 : true ? ld M t4_1\n";
}

SpecState resolved_prefix(Word third_address) {
    SpecState h = testing::spec_from_mil(store_program(third_address));
    for (Name t : {nm(1, 1), nm(1, 2), nm(2, 1), nm(2, 2), nm(4, 1)}) {
        h = must_step(h, SpecRule::Exe, t);
        h = must_step(h, SpecRule::Ret, t);
    }
    return h;
}

TEST(StoreAddressMisprediction, LoadBypassesStoreAndIsRolledBack) {
    const Name t11 = nm(1, 1), t12 = nm(1, 2), t21 = nm(2, 1), t31 = nm(3, 1), t41 = nm(4, 1), t42 = nm(4, 2);
    const SpecState h0 = resolved_prefix(1);
    EXPECT_FALSE(spec_premise(h0, SpecStep{SpecRule::Exe, t42}));

    const SpecState h1 = must_step(h0, SpecRule::Prd, t31, 0);
    EXPECT_EQ(bound_names(str_act(h1.base, t42)), testing::names({t12}));

    SpecResult exe = spec_step(h1, SpecStep{SpecRule::Exe, t42});
    const SpecState& h2 = exe.state;
    EXPECT_EQ(h2.base.value(t42), 1u);
    EXPECT_EQ(h2.delta.at(t42), storage({{t11, 1}, {t21, 0}, {t31, 0}, {t41, 1}, {t12, 1}}));
    EXPECT_FALSE(spec_premise(h2, SpecStep{SpecRule::Ret, t42}));

    const SpecState h3 = must_step(h2, SpecRule::Pexe, t31);
    EXPECT_EQ(h3.base.value(t31), 1u);
    EXPECT_TRUE(h3.delta.at(t31).empty());
    EXPECT_TRUE(h3.predicted.empty());
    EXPECT_EQ(bound_names(str_act(h3.base, h3.delta.at(t42), t42)), testing::names({t12}));
    EXPECT_EQ(bound_names(str_act(h3.base, t42)), testing::names({nm(3, 2)}));

    const SpecState h4 = must_step(h3, SpecRule::Rbk, t42);
    EXPECT_FALSE(h4.base.value(t42).has_value());
    EXPECT_TRUE(h4.retired(t42));
}

TEST(StoreAddressMisprediction, HarmlessMispredictionRetires) {
    const Name t31 = nm(3, 1), t42 = nm(4, 2);
    SpecState h = must_step(resolved_prefix(5), SpecRule::Prd, t31, 0);
    h = must_step(h, SpecRule::Exe, t42);
    h = must_step(h, SpecRule::Pexe, t31);
    EXPECT_EQ(h.base.value(t31), 5u);
    EXPECT_FALSE(spec_premise(h, SpecStep{SpecRule::Rbk, t42}));
    h = must_step(h, SpecRule::Ret, t31);
    h = must_step(h, SpecRule::Ret, t42);
    EXPECT_EQ(h.base.value(t42), 1u);
    EXPECT_TRUE(h.delta.empty());
}

}  // namespace
}  // namespace inspectre
