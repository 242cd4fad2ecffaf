#include "inspectre/inorder.hpp"

namespace inspectre {

bool completed(const OooState& st, Name t) {
    const Micro& m = st.at(t);
    if (st.guard(m) == std::optional<bool>(false)) return true;
    if (!defined(st.s, t)) return false;
    if (m.is_store(Resource::Mem)) return st.committed.count(t) != 0;
    if (m.is_store(Resource::Pc)) return st.fetched.count(t) != 0;
    return true;
}

namespace {

std::optional<Name> first_incomplete(const OooState& st) {
    for (const auto& slot : st.instrs) {
        for (const auto& m : slot.block->micros) {
            if (!completed(st, m.name)) return m.name;
        }
    }
    return std::nullopt;
}

std::optional<StepParam> premise_for(const OooState& st, Name t) {
    if (auto p = exe_premise(st, t)) return p;
    if (auto p = cmt_premise(st, t)) return p;
    return ftc_premise(st, t);
}

}  // namespace

std::vector<StepParam> inorder_enabled(const OooState& st) {
    std::vector<StepParam> out;
    for (auto& p : enabled(st)) {
        bool ordered = true;
        for (const auto& slot : st.instrs) {
            for (const auto& m : slot.block->micros) {
                if (!(m.name < p.name)) break;
                if (!completed(st, m.name)) {
                    ordered = false;
                    break;
                }
            }
            if (!ordered || slot.block->instr >= p.name.instr) break;
        }
        if (ordered) out.push_back(std::move(p));
    }
    return out;
}

std::optional<StepResult> inorder_step(const OooState& st) {
    auto t = first_incomplete(st);
    if (!t) return std::nullopt;
    auto p = premise_for(st, *t);
    if (!p) return std::nullopt;
    return apply_step(st, *p);
}

const char* run_end_name(RunEnd e) {
    switch (e) {
    case RunEnd::Halted: return "halted";
    case RunEnd::Stuck: return "stuck";
    case RunEnd::OutOfFuel: return "out-of-fuel";
    }
    return "?";
}

Trace InOrderRun::trace() const {
    Trace t;
    for (const auto& o : obs) {
        if (!o.is_silent()) t.push_back(o);
    }
    return t;
}

InOrderRun run_inorder(const OooState& start, std::size_t fuel, bool keep_states) {
    InOrderRun run;
    run.states.push_back(start);
    for (std::size_t i = 0;; ++i) {
        const OooState& cur = run.states.back();
        auto t = first_incomplete(cur);
        if (!t) {
            run.end = RunEnd::Halted;
            break;
        }
        if (i == fuel) {
            run.end = RunEnd::OutOfFuel;
            break;
        }
        auto p = premise_for(cur, *t);
        if (!p) {
            run.end = RunEnd::Stuck;
            break;
        }
        StepResult r = apply_step(cur, *p);
        run.params.push_back(r.param);
        run.obs.push_back(r.obs);
        if (keep_states || run.states.size() == 1) {
            run.states.push_back(std::move(r.state));
        } else {
            run.states.back() = std::move(r.state);
        }
    }
    return run;
}

std::vector<Word> commits(const std::vector<StepParam>& params, Word a) {
    std::vector<Word> out;
    for (const auto& p : params) {
        if (p.rule == Rule::Cmt && p.addr == a) out.push_back(p.value);
    }
    return out;
}

std::vector<Word> commits(const std::vector<OooState>& run, Word a) {
    std::vector<StepParam> params;
    for (std::size_t i = 1; i < run.size(); ++i) params.push_back(step_param(run[i - 1], run[i]));
    return commits(params, a);
}

}  // namespace inspectre
