#include <gtest/gtest.h>
#include <json.hpp>

#include "inspectre/errors.hpp"
#include "inspectre/predictors.hpp"
#include "inspectre/security.hpp"

namespace inspectre {
namespace {

Scenario corpus(const std::string& file) { return Scenario::from_isa(load_isa_file(INSPECTRE_CORPUS_DIR "/" + file)); }

NiOptions at_depth(std::size_t depth) {
    NiOptions o;
    o.limits.depth = depth;
    return o;
}

TEST(Policy, AssignmentsAreTheCandidateProduct) {
    const IsaProgram prog = parse_isa(".reg r1 0\n.secret r1 1 2\n.secret [0x40] 5 6 7\na: halt\n");
    const SecurityPolicy pol = policy_of(prog);
    EXPECT_TRUE(pol.is_high(Location{Resource::Reg, 1}));
    EXPECT_FALSE(pol.is_high(Location{Resource::Reg, 2}));
    const auto all = pol.assignments();
    ASSERT_EQ(all.size(), 6u);
    EXPECT_EQ(all.front().at(Location{Resource::Reg, 1}), 1u);
    EXPECT_EQ(all.front().at(Location{Resource::Mem, 0x40}), 5u);
}

TEST(Policy, LowEquivalenceIgnoresSecrets) {
    const Scenario sc = corpus("spectre_pht.isa");
    const auto all = sc.policy.assignments();
    ASSERT_EQ(all.size(), 2u);
    EXPECT_TRUE(low_equivalent(sc.initial(all[0]), sc.initial(all[1]), sc.policy));
    EXPECT_TRUE(low_equivalent(sc.initial(all[0]), sc.initial(all[0]), sc.policy));
    EXPECT_FALSE(low_equivalent(sc.initial(all[0]), sc.initial(all[1]), SecurityPolicy{}));
}

TEST(Noninterference, BoundsCheckBypassLeaksUnderBranchPrediction) {
    const Scenario sc = corpus("spectre_pht.isa");
    const Verdict v = check_conditional_ni(sc, Semantics::speculative(make_config({"br"}, {})), at_depth(14));
    EXPECT_FALSE(v.secure());
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_EQ(v.witness->back().kind, Observation::Kind::DL);
    EXPECT_TRUE(v.secrets1.has_value());
    EXPECT_TRUE(v.secrets2.has_value());
}

TEST(Noninterference, OutOfOrderAloneDoesNotLeak) {
    const Verdict v = check_conditional_ni(corpus("spectre_pht.isa"), Semantics::out_of_order(), at_depth(30));
    EXPECT_TRUE(v.secure());
    EXPECT_EQ(v.verdict_name(), "Secure-up-to-depth");
}

TEST(Noninterference, FenceBlocksTheLeak) {
    const Scenario sc = corpus("spectre_pht_lfence.isa");
    const Verdict v =
        check_conditional_ni(sc, Semantics::speculative(make_config({"br"}, {"lfence"})), at_depth(40));
    EXPECT_TRUE(v.secure());
}

TEST(Noninterference, ConditionalMoveLeaksOutOfOrder) {
    const Verdict v = check_conditional_ni(corpus("spectre_ooo_cmov.isa"), Semantics::out_of_order(), at_depth(16));
    EXPECT_FALSE(v.secure());
    const Verdict sel = check_conditional_ni(corpus("spectre_ooo_csel.isa"), Semantics::out_of_order(), at_depth(30));
    EXPECT_TRUE(sel.secure());
}

TEST(Noninterference, BudgetExceededPropagates) {
    NiOptions o = at_depth(40);
    o.limits.max_nodes = 5;
    EXPECT_THROW(check_conditional_ni(corpus("spectre_pht.isa"), Semantics::out_of_order(), o),
                 ExplosionBudgetExceeded);
}

TEST(ConstantTime, ConditionalStoreIsOnlyIsaConstantTime) {
    const Scenario sc = corpus("spectre_ooo_cmov.isa");
    EXPECT_TRUE(check_isa_constant_time(sc, 400).secure());
    const Verdict mil = check_mil_constant_time(sc, 400);
    EXPECT_FALSE(mil.secure());
    EXPECT_TRUE(mil.step.has_value());
}

TEST(ConstantTime, RegisterSelectIsMilConstantTime) {
    const Scenario sc = corpus("spectre_ooo_csel.isa");
    EXPECT_TRUE(check_isa_constant_time(sc, 400).secure());
    EXPECT_TRUE(check_mil_constant_time(sc, 400).secure());
}

TEST(ConstantTime, SecretIndexedLoadIsNotConstantTime) {
    const IsaProgram prog = parse_isa(".array D 0x40 4\n.reg r1 0\n.secret r1 0 1\na: load r2, [D + r1]\nb: halt\n");
    const Scenario sc = Scenario::from_isa(prog);
    EXPECT_FALSE(check_isa_constant_time(sc, 400).secure());
    EXPECT_FALSE(check_mil_constant_time(sc, 400).secure());
}

TEST(ConstantTime, LockstepRelations) {
    const Scenario sc = corpus("spectre_ooo_csel.isa");
    const auto all = sc.policy.assignments();
    EXPECT_TRUE(isa_ct_equiv(sc.initial(all[0]), sc.initial(all[1])));
    EXPECT_TRUE(mil_ct_equiv(sc.initial(all[0]), sc.initial(all[0])));
}

TEST(Verdict, JsonCarriesTheWitness) {
    const Verdict v = check_conditional_ni(corpus("spectre_pht.isa"),
                                           Semantics::speculative(make_config({"br"}, {})), at_depth(14));
    const auto j = nlohmann::json::parse(v.to_json());
    EXPECT_EQ(j.at("verdict"), "Insecure");
    EXPECT_EQ(j.at("schema"), 1);
    EXPECT_TRUE(j.at("witness_trace").is_array());
    EXPECT_TRUE(j.at("pair").at("secrets1").is_object());
}

}  // namespace
}  // namespace inspectre
