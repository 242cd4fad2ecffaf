#include "inspectre/security.hpp"

#include <algorithm>
#include <json.hpp>

#include "inspectre/errors.hpp"
#include "inspectre/inorder.hpp"

namespace inspectre {

std::string to_string(const Assignment& a) {
    std::string out = "{";
    bool first = true;
    for (const auto& [loc, v] : a) {
        out += (first ? "" : ", ") + to_string(loc) + "=" + std::to_string(v);
        first = false;
    }
    return out + "}";
}

bool SecurityPolicy::is_high(const Location& loc) const {
    return std::any_of(secrets.begin(), secrets.end(), [&](const SecretDecl& s) { return s.loc == loc; });
}

std::vector<Assignment> SecurityPolicy::assignments() const {
    std::vector<Assignment> out{Assignment{}};
    for (const auto& s : secrets) {
        std::vector<Assignment> next;
        for (const auto& partial : out) {
            for (Word v : s.candidates) {
                Assignment a = partial;
                a[s.loc] = v;
                next.push_back(std::move(a));
            }
        }
        out = std::move(next);
    }
    return out;
}

SecurityPolicy policy_of(const IsaProgram& prog) { return SecurityPolicy{prog.secrets}; }

Scenario Scenario::from_isa(const IsaProgram& prog) {
    return Scenario{make_machine(prog), boot_image(prog), policy_of(prog)};
}

Scenario Scenario::from_mil(const MilProgram& prog, SecurityPolicy policy) {
    return Scenario{make_machine(prog), boot_image(prog), std::move(policy)};
}

OooState Scenario::initial(const Assignment& a) const {
    BootImage img = image;
    for (const auto& [loc, v] : a) {
        if (loc.res == Resource::Reg) {
            img.regs[loc.where] = v;
        } else {
            img.mem[loc.where] = v;
        }
    }
    return initial_state(machine, img);
}

std::map<Location, Word> Scenario::low_state() const {
    std::map<Location, Word> out;
    for (const auto& [r, v] : image.regs) {
        Location loc{Resource::Reg, r};
        if (!policy.is_high(loc)) out[loc] = v;
    }
    for (const auto& [a, v] : image.mem) {
        Location loc{Resource::Mem, a};
        if (!policy.is_high(loc)) out[loc] = v;
    }
    return out;
}

namespace {

std::map<Location, Word> boot_values(const OooState& st) {
    std::map<Location, Word> out;
    for (const auto& m : st.instrs.at(0).block->micros) {
        if (!m.is_store() || m.res == Resource::Pc || !m.addr.is_lit() || !m.value.is_lit()) continue;
        out[Location{m.res, m.addr.literal()}] = m.value.literal();
    }
    return out;
}

// Same decoded instructions; the bootstrap may differ in stored values.
bool same_instructions(const OooState& a, const OooState& b) {
    if (a.instrs.size() != b.instrs.size()) return false;
    const auto& boot_a = a.instrs[0].block->micros;
    const auto& boot_b = b.instrs[0].block->micros;
    if (boot_a.size() != boot_b.size()) return false;
    for (std::size_t i = 0; i < boot_a.size(); ++i) {
        const Micro& x = boot_a[i];
        const Micro& y = boot_b[i];
        if (x.name != y.name || x.kind != y.kind || x.res != y.res || !(x.addr == y.addr)) return false;
    }
    for (std::size_t i = 1; i < a.instrs.size(); ++i) {
        if (a.instrs[i].block->micros != b.instrs[i].block->micros) return false;
    }
    return true;
}

bool ct_equiv(const OooState& a, const OooState& b, bool registers) {
    if (!same_instructions(a, b) || a.committed != b.committed || a.fetched != b.fetched) return false;
    bool ok = true;
    a.for_each_micro([&](const Micro& m) {
        if (!ok || m.is_internal()) return;
        const bool pc_store = m.is_store(Resource::Pc);
        const bool mem = m.res == Resource::Mem;
        const bool reg = registers && m.res == Resource::Reg;
        if (!pc_store && !mem && !reg) return;
        const auto g1 = a.guard(m);
        if (g1 != b.guard(m) || defined(a.s, m.name) != defined(b.s, m.name)) {
            ok = false;
            return;
        }
        if (!g1.value_or(false)) return;
        if (pc_store) {
            ok = a.eval(m.value) == b.eval(m.value);
        } else {
            ok = a.eval(m.addr) == b.eval(m.addr);
        }
    });
    return ok;
}

// MIL constant time compares after every micro step.  ISA constant time
// compares at instruction boundaries: the start, after each fetch and at
// the end of a halted run.  Counting micro steps there would misalign runs
// whose guards skip a different number of micros inside one instruction.
std::vector<std::size_t> comparison_points(const InOrderRun& run, bool micro_steps) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < run.states.size(); ++k) {
        if (micro_steps || k == 0 || run.params[k - 1].rule == Rule::Ftc) out.push_back(k);
    }
    if (!micro_steps && run.end == RunEnd::Halted && out.back() + 1 != run.states.size()) {
        out.push_back(run.states.size() - 1);
    }
    return out;
}

Verdict check_constant_time(const Scenario& sc, std::size_t fuel, bool registers) {
    Verdict v;
    v.property = registers ? "mil-ct" : "isa-ct";
    v.semantics = "inorder";
    v.depth = fuel;
    v.low_state = sc.low_state();
    const auto assignments = sc.policy.assignments();
    std::vector<InOrderRun> runs;
    runs.reserve(assignments.size());
    std::vector<std::vector<std::size_t>> points;
    for (const auto& a : assignments) {
        runs.push_back(run_inorder(sc.initial(a), fuel));
        points.push_back(comparison_points(runs.back(), registers));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            ++v.pairs_checked;
            const auto& pi = points[i];
            const auto& pj = points[j];
            const std::size_t n = std::min(pi.size(), pj.size());
            for (std::size_t k = 0; k < n; ++k) {
                if (ct_equiv(runs[i].states[pi[k]], runs[j].states[pj[k]], registers)) continue;
                v.kind = Verdict::Kind::Insecure;
                v.secrets1 = assignments[i];
                v.secrets2 = assignments[j];
                v.step = k;
                v.note = "states after " + std::to_string(k) + (registers ? " in-order steps" : " instructions") +
                         " are distinguishable";
                return v;
            }
        }
    }
    return v;
}

}  // namespace

bool low_equivalent(const OooState& a, const OooState& b, const SecurityPolicy& pol) {
    const auto va = boot_values(a);
    const auto vb = boot_values(b);
    if (va.size() != vb.size() ||
        !std::equal(va.begin(), va.end(), vb.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
        throw FootprintMismatch("initial states initialise different locations");
    }
    for (const auto& [loc, value] : va) {
        if (!pol.is_high(loc) && vb.at(loc) != value) return false;
    }
    return same_instructions(a, b);
}

bool isa_ct_equiv(const OooState& a, const OooState& b) { return ct_equiv(a, b, false); }

bool mil_ct_equiv(const OooState& a, const OooState& b) { return ct_equiv(a, b, true); }

Verdict check_isa_constant_time(const Scenario& sc, std::size_t fuel) { return check_constant_time(sc, fuel, false); }

Verdict check_mil_constant_time(const Scenario& sc, std::size_t fuel) { return check_constant_time(sc, fuel, true); }

Verdict check_conditional_ni(const Scenario& sc, const Semantics& target, const NiOptions& opts) {
    Verdict v;
    v.property = "ni";
    v.semantics = target.describe();
    v.depth = opts.limits.depth;
    v.low_state = sc.low_state();
    const auto assignments = sc.policy.assignments();
    std::vector<OooState> inits;
    std::vector<Trace> reference;
    for (const auto& a : assignments) {
        inits.push_back(sc.initial(a));
        reference.push_back(run_inorder(inits.back(), opts.inorder_fuel, false).trace());
    }
    ExploreLimits match = opts.limits;
    match.depth += opts.match_slack;
    std::vector<std::optional<TraceTrie>> sets(assignments.size());
    auto traces_of = [&](std::size_t i) -> const TraceTrie& {
        if (!sets[i]) {
            ExploreStats stats;
            sets[i] = trace_set(inits[i], target, opts.limits, &stats);
            v.truncated |= stats.truncated;
        }
        return *sets[i];
    };
    for (std::size_t i = 0; i < inits.size(); ++i) {
        for (std::size_t j = i + 1; j < inits.size(); ++j) {
            if (reference[i] != reference[j]) continue;
            ++v.pairs_checked;
            for (auto [x, y] : {std::pair{i, j}, std::pair{j, i}}) {
                auto missing = first_unmatched(traces_of(x), inits[y], target, match);
                if (!missing) continue;
                v.kind = Verdict::Kind::Insecure;
                v.secrets1 = assignments[x];
                v.secrets2 = assignments[y];
                v.witness = std::move(missing);
                v.note = "the first state produces the witness trace; the second cannot";
                return v;
            }
        }
    }
    return v;
}

std::string Verdict::verdict_name() const {
    if (kind == Kind::Insecure) return "Insecure";
    return property == "ni" ? "Secure-up-to-depth" : "Secure";
}

std::string Verdict::to_json() const {
    using nlohmann::json;
    auto locations = [](const std::map<Location, Word>& m) {
        json j = json::object();
        for (const auto& [loc, v] : m) j[to_string(loc)] = v;
        return j;
    };
    json j;
    j["schema"] = 1;
    j["verdict"] = verdict_name();
    j["property"] = property;
    j["semantics"] = semantics;
    j["depth"] = depth;
    j["pairs_checked"] = pairs_checked;
    j["truncated"] = truncated;
    json pair;
    pair["low_state"] = locations(low_state);
    pair["secrets1"] = secrets1 ? locations(*secrets1) : json(nullptr);
    pair["secrets2"] = secrets2 ? locations(*secrets2) : json(nullptr);
    j["pair"] = pair;
    if (witness) {
        json w = json::array();
        for (Observation o : *witness) w.push_back(to_string(o));
        j["witness_trace"] = w;
    } else {
        j["witness_trace"] = nullptr;
    }
    if (step) j["step"] = *step;
    if (!note.empty()) j["note"] = note;
    return j.dump();
}

}  // namespace inspectre
