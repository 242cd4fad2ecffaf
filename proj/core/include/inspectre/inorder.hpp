#pragma once

#include <optional>
#include <vector>

#include "inspectre/ooo.hpp"

namespace inspectre {

// Discarded (guard false), executed and not a memory or PC store, or
// committed/fetched.
bool completed(const OooState& st, Name t);

// The OoO steps whose name is preceded only by completed micros.  The
// sequential model allows at most one.
std::vector<StepParam> inorder_enabled(const OooState& st);

std::optional<StepResult> inorder_step(const OooState& st);

enum class RunEnd : std::uint8_t { Halted, Stuck, OutOfFuel };

const char* run_end_name(RunEnd e);

struct InOrderRun {
    // states[0] is the start state; without `keep_states` only the start
    // and the final state are kept.
    std::vector<OooState> states;
    std::vector<StepParam> params;
    std::vector<Observation> obs;
    RunEnd end = RunEnd::OutOfFuel;

    Trace trace() const;
    const OooState& last() const { return states.back(); }
};

InOrderRun run_inorder(const OooState& start, std::size_t fuel, bool keep_states = true);

// Values committed to address `a`, in order.
std::vector<Word> commits(const std::vector<StepParam>& params, Word a);
// Same, recovering the step parameters from consecutive states.
std::vector<Word> commits(const std::vector<OooState>& run, Word a);

}  // namespace inspectre
