#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "inspectre/explore.hpp"
#include "inspectre/ooo.hpp"
#include "inspectre/spec.hpp"

namespace inspectre {

// Seed taken from INSPECTRE_SEED when set, otherwise `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

// Values committed per memory address, in commit order.
using CommitLog = std::map<Word, std::vector<Word>>;

CommitLog commit_log(const std::vector<StepParam>& params);

struct OooRun {
    std::vector<OooState> states;
    std::vector<StepParam> steps;
    std::vector<Observation> obs;
};

struct SpecRun {
    std::vector<SpecState> states;
    std::vector<SpecStep> steps;
    std::vector<Observation> obs;
    CommitLog commits;
};

// Uniformly random schedules of at most `max_steps` steps, stopping early
// when nothing is enabled.
OooRun random_ooo_run(const OooState& init, std::size_t max_steps, std::mt19937_64& rng);
SpecRun random_spec_run(const SpecState& init, const SpecConfig& cfg, std::size_t max_steps, std::mt19937_64& rng);

// Outcome of a sampled property check.
struct PropertyVerdict {
    std::string property;
    bool ok = true;
    std::uint64_t seed = 0;
    // Runs, step pairs or states examined.
    std::size_t cases = 0;
    // Non-fatal findings, such as deps entries no mutation was sensitive to.
    std::size_t advisories = 0;
    std::string counterexample;

    void fail(std::string what);
    void merge(const PropertyVerdict& other);
    std::string to_json() const;
};

struct ConsistencyOptions {
    std::size_t depth = 200;
    std::size_t samples = 500;
    std::uint64_t seed = 1;
};

// Per-address commit sequences of sampled target runs must be prefixes of
// the in-order run's.  `target` must be OutOfOrder or Speculative.
PropertyVerdict check_memory_consistency(const OooState& init, const Semantics& target, const ConsistencyOptions& opts);

struct CommutationWitness {
    OooState start;
    StepParam first, second;
    OooState end;
    // State after taking `second` first; absent when no reordering exists.
    std::optional<OooState> midpoint;
    // Both steps commit to the same address, which a legal run never does
    // out of program order.
    bool colliding_commits = false;
    // The reordered load no longer observes memory (forwarded instead).
    bool weakened_observation = false;

    bool holds() const { return midpoint.has_value() && !colliding_commits; }
};

// Takes `first` then `second` from `start` and searches for the same
// (rule, name) steps in the opposite order reaching the same state.
// Throws PreconditionViolated unless both steps apply in sequence and
// second.name < first.name.
CommutationWitness check_commute(const OooState& start, const StepParam& first, const StepParam& second);

// Every adjacent out-of-name-order step pair of sampled OoO runs commutes.
PropertyVerdict check_commutation(const OooState& init, const ConsistencyOptions& opts);

// Along the run, str_may and str_act of every memory operation never grow,
// and steps on names at or above it leave them unchanged.
PropertyVerdict check_strmay_lemmas(const std::vector<OooState>& run, const std::vector<StepParam>& steps);

// Mutates storage outside deps(st, t) and checks the load's value, deps and
// active stores are unchanged.  Single-name mutations inside deps that
// never change the outcome are counted as advisories.  Throws
// PreconditionViolated unless t is a load whose address is resolved.
PropertyVerdict check_deps_oracle(const OooState& st, Name t, std::mt19937_64& rng, std::size_t mutations = 32);

}  // namespace inspectre
