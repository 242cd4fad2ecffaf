#include "test_support.hpp"

#include <gtest/gtest.h>

#include "inspectre/machine.hpp"
#include "inspectre/mil_text.hpp"

namespace inspectre::testing {

OooState ooo_from_mil(std::string_view text) {
    MilProgram prog = parse_mil(text);
    return initial_state(make_machine(prog), boot_image(prog));
}

SpecState spec_from_mil(std::string_view text) { return spec_initial(ooo_from_mil(text)); }

NameSet names(std::initializer_list<Name> list) { return NameSet(list.begin(), list.end()); }

Name boot_reg_store(const OooState& st, Word reg) {
    for (const auto& m : st.instrs[0].block->micros) {
        if (m.is_store(Resource::Reg) && m.addr.is_lit() && m.addr.literal() == reg) return m.name;
    }
    ADD_FAILURE() << "no boot store for register " << reg;
    return Name{};
}

SpecState must_step(const SpecState& h, SpecRule rule, Name t, Word value) {
    SpecStep p{rule, t, value};
    EXPECT_TRUE(spec_premise(h, p)) << to_string(p) << " not enabled in\n" << dump_state(h);
    return apply_spec_step(h, p).state;
}

}  // namespace inspectre::testing
