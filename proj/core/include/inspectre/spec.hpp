#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inspectre/ooo.hpp"

namespace inspectre {

using SnapshotMap = boost::container::flat_map<Name, Storage>;

// (σ, δ, P): an OoO state, per-name snapshots of the storage a result was
// computed from, and the names holding predicted values.
struct SpecState {
    OooState base;
    SnapshotMap delta;
    NameSet predicted;

    bool retired(Name t) const { return delta.find(t) == delta.end(); }

    std::size_t hash() const;
    friend bool operator==(const SpecState& a, const SpecState& b);
};

SpecState spec_initial(OooState base);

// Names of the active stores of a load; empty for other micros.
NameSet asn(const OooState& st, Name t);
NameSet asn(const OooState& st, const Storage& over, Name t);
// Guard and address names of same-resource stores from the earliest
// active store up to the load.
NameSet srcs(const OooState& st, Name t);
NameSet srcs(const OooState& st, const Storage& over, Name t);
NameSet deps_x(const OooState& st, Name t);
NameSet deps_x(const OooState& st, const Storage& over, Name t);
NameSet deps(const OooState& st, Name t);
NameSet deps(const OooState& st, const Storage& over, Name t);

// σ1 ~_t σ2.  The micro at t must be the same in both states.
bool t_equivalent(const OooState& a, const OooState& b, Name t);
// (I, s1, C, F) ~_t (I, s2, C, F) over the micros of `st`.
bool t_equivalent(const OooState& st, const Storage& s1, const Storage& s2, Name t);

enum class SpecRule : std::uint8_t { Prd, Exe, Pexe, Cmt, Ftc, Ret, Rbk };

const char* spec_rule_name(SpecRule r);

struct SpecStep {
    SpecRule rule = SpecRule::Exe;
    Name name;
    // Prd: the predicted value.
    Word value = 0;

    auto operator<=>(const SpecStep&) const = default;
};

std::string to_string(const SpecStep& p);

using PredictionMap = boost::container::flat_map<Name, boost::container::flat_set<Word>>;

void merge_into(PredictionMap& into, const PredictionMap& from);

class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string name() const = 0;
    virtual PredictionMap predict(const OooState& st) const = 0;
};

// Filters speculative transitions.
class Constraint {
public:
    virtual ~Constraint() = default;
    virtual std::string name() const = 0;
    virtual bool allows(const SpecState& h, const SpecStep& p) const = 0;
};

struct SpecConfig {
    std::vector<std::shared_ptr<const Predictor>> predictors;
    std::vector<std::shared_ptr<const Constraint>> constraints;

    PredictionMap predictions(const OooState& st) const;
    std::string describe() const;
};

// Rule instances whose premises hold, before constraints are applied.
std::vector<SpecStep> spec_enabled_unconstrained(const SpecState& h, const SpecConfig& cfg);
std::vector<SpecStep> spec_enabled(const SpecState& h, const SpecConfig& cfg);

// Premise of a single rule instance, independent of predictors for Prd.
bool spec_premise(const SpecState& h, const SpecStep& p);

struct SpecResult {
    SpecState state;
    Observation obs;
};

// Checks the rule premise (not predictor membership); throws RuleNotEnabled.
SpecResult spec_step(const SpecState& h, const SpecStep& p);
// Additionally requires p ∈ spec_enabled(h, cfg).
SpecResult spec_step(const SpecState& h, const SpecStep& p, const SpecConfig& cfg);
// Applies a step whose premise has already been established.
SpecResult apply_spec_step(const SpecState& h, const SpecStep& p);

// Names that transitively reference t through snapshots or through the
// block a fetch of t produced, excluding t.
NameSet delta_plus(const SpecState& h, Name t);

struct Partitioning {
    // Leading instructions whose names are all retired.
    std::uint32_t retired_blocks = 0;
    // For every later instruction, the PC store whose fetch produced it.
    std::vector<Name> producers;
};

std::optional<Partitioning> wellformed_partition(const SpecState& h);

std::string dump_state(const SpecState& h);

}  // namespace inspectre

template <>
struct std::hash<inspectre::SpecState> {
    std::size_t operator()(const inspectre::SpecState& s) const noexcept { return s.hash(); }
};
