#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inspectre/explore.hpp"
#include "inspectre/isa.hpp"
#include "inspectre/machine.hpp"
#include "inspectre/mil_text.hpp"

namespace inspectre {

// Values chosen for the high locations of an initial state.
using Assignment = std::map<Location, Word>;

std::string to_string(const Assignment& a);

// Low/high split of the initial state.  High locations are exactly those
// with secret candidates; everything else in the footprint is low.
struct SecurityPolicy {
    std::vector<SecretDecl> secrets;

    bool is_high(const Location& loc) const;
    // Cross product of the candidate values, in lexicographic order.
    std::vector<Assignment> assignments() const;
};

SecurityPolicy policy_of(const IsaProgram& prog);

// A program together with its boot image and policy.
struct Scenario {
    MachinePtr machine;
    BootImage image;
    SecurityPolicy policy;

    static Scenario from_isa(const IsaProgram& prog);
    static Scenario from_mil(const MilProgram& prog, SecurityPolicy policy = {});

    OooState initial(const Assignment& a = {}) const;
    // Boot values of the low locations.
    std::map<Location, Word> low_state() const;
};

// Bootstrap values agree on every low location and both states hold the
// same decoded instructions.  Throws FootprintMismatch when the
// bootstrap instructions initialise different locations.
bool low_equivalent(const OooState& a, const OooState& b, const SecurityPolicy& pol);

// Lockstep relations of the constant-time definitions.  The MIL variant
// also compares register accesses.
bool isa_ct_equiv(const OooState& a, const OooState& b);
bool mil_ct_equiv(const OooState& a, const OooState& b);

struct Verdict {
    enum class Kind { Secure, Insecure };
    Kind kind = Kind::Secure;
    std::string property;
    std::string semantics;
    std::size_t depth = 0;
    // The pair of initial states that violates the property.
    std::optional<Assignment> secrets1;
    std::optional<Assignment> secrets2;
    std::map<Location, Word> low_state;
    // Observations of the first state that the second cannot match, or
    // the lockstep step index for constant-time checks.
    std::optional<Trace> witness;
    std::optional<std::size_t> step;
    std::string note;
    std::size_t pairs_checked = 0;
    bool truncated = false;

    bool secure() const { return kind == Kind::Secure; }
    std::string verdict_name() const;
    std::string to_json() const;
};

struct NiOptions {
    ExploreLimits limits;
    // Extra transitions granted when looking for a matching execution.
    std::size_t match_slack = 10;
    // Fuel of the in-order runs that decide whether a pair is comparable.
    std::size_t inorder_fuel = 400;
};

// Conditional noninterference against the in-order semantics, up to the
// configured depth.  Throws ExplosionBudgetExceeded.
Verdict check_conditional_ni(const Scenario& sc, const Semantics& target, const NiOptions& opts = {});

Verdict check_isa_constant_time(const Scenario& sc, std::size_t fuel);
Verdict check_mil_constant_time(const Scenario& sc, std::size_t fuel);

}  // namespace inspectre
