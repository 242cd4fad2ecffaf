#include "inspectre/spec.hpp"

#include <boost/container_hash/hash.hpp>
#include <map>
#include <sstream>
#include <stdexcept>

#include "inspectre/errors.hpp"

namespace inspectre {

std::size_t SpecState::hash() const {
    std::size_t h = base.hash();
    for (const auto& [t, snap] : delta) {
        boost::hash_combine(h, t.key());
        for (const auto& [n, v] : snap) {
            boost::hash_combine(h, n.key());
            boost::hash_combine(h, v);
        }
        boost::hash_combine(h, 0x51u);
    }
    for (Name n : predicted) boost::hash_combine(h, n.key() ^ 0x5555);
    return h;
}

bool operator==(const SpecState& a, const SpecState& b) {
    return a.delta == b.delta && a.predicted == b.predicted && a.base == b.base;
}

SpecState spec_initial(OooState base) { return SpecState{std::move(base), {}, {}}; }

NameSet asn(const OooState& st, Name t) { return asn(st, st.s, t); }

NameSet asn(const OooState& st, const Storage& over, Name t) {
    const Micro& m = st.at(t);
    if (!m.is_load()) return {};
    return bound_names(str_act(st, over, t));
}

NameSet srcs(const OooState& st, Name t) { return srcs(st, st.s, t); }

NameSet srcs(const OooState& st, const Storage& over, Name t) {
    const Micro& m = st.at(t);
    if (!m.is_load()) return {};
    NameSet active = asn(st, over, t);
    NameSet out;
    if (active.empty()) return out;
    const Name lo = *active.begin();
    for (std::uint32_t i = lo.instr; i <= t.instr; ++i) {
        for (const auto& other : st.instrs[i].block->micros) {
            if (other.name < lo) continue;
            if (!(other.name < t)) break;
            if (!other.is_store(m.res)) continue;
            other.guard.collect_names(out);
            if (other.has_addr()) other.addr.collect_names(out);
        }
    }
    return out;
}

NameSet deps_x(const OooState& st, Name t) { return deps_x(st, st.s, t); }

NameSet deps_x(const OooState& st, const Storage& over, Name t) {
    NameSet out = asn(st, over, t);
    NameSet sources = srcs(st, over, t);
    out.insert(sources.begin(), sources.end());
    return out;
}

NameSet deps(const OooState& st, Name t) { return deps(st, st.s, t); }

NameSet deps(const OooState& st, const Storage& over, Name t) {
    NameSet out = st.at(t).free_names();
    NameSet cross = deps_x(st, over, t);
    out.insert(cross.begin(), cross.end());
    return out;
}

namespace {

bool equivalent_at(const OooState& a, const Storage& s1, const OooState& b, const Storage& s2, Name t) {
    const Micro* m1 = a.find(t);
    const Micro* m2 = b.find(t);
    if (!m1 || !m2 || !(*m1 == *m2)) return false;
    const NameSet fn = m1->free_names();
    if (restrict_to(s1, fn) != restrict_to(s2, fn)) return false;
    if (!m1->is_load()) return true;
    const Storage r1 = restrict_to(s1, deps(a, s1, t));
    const Storage r2 = restrict_to(s2, deps(b, s2, t));
    const NameSet sa1 = bound_names(str_act(a, r1, t));
    const NameSet sa2 = bound_names(str_act(b, r2, t));
    if (sa1 != sa2) return false;
    return restrict_to(s1, sa1) == restrict_to(s2, sa2);
}

}  // namespace

bool t_equivalent(const OooState& a, const OooState& b, Name t) { return equivalent_at(a, a.s, b, b.s, t); }

bool t_equivalent(const OooState& st, const Storage& s1, const Storage& s2, Name t) {
    return equivalent_at(st, s1, st, s2, t);
}

const char* spec_rule_name(SpecRule r) {
    switch (r) {
    case SpecRule::Prd: return "Prd";
    case SpecRule::Exe: return "Exe";
    case SpecRule::Pexe: return "Pexe";
    case SpecRule::Cmt: return "Cmt";
    case SpecRule::Ftc: return "Ftc";
    case SpecRule::Ret: return "Ret";
    case SpecRule::Rbk: return "Rbk";
    }
    return "?";
}

std::string to_string(const SpecStep& p) {
    std::string out = std::string(spec_rule_name(p.rule)) + " " + to_string(p.name);
    if (p.rule == SpecRule::Prd) out += " := " + std::to_string(p.value);
    return out;
}

void merge_into(PredictionMap& into, const PredictionMap& from) {
    for (const auto& [t, values] : from) into[t].insert(values.begin(), values.end());
}

PredictionMap SpecConfig::predictions(const OooState& st) const {
    PredictionMap out;
    for (const auto& p : predictors) merge_into(out, p->predict(st));
    return out;
}

std::string SpecConfig::describe() const {
    std::string out = "predictors=";
    for (std::size_t i = 0; i < predictors.size(); ++i) out += (i ? "," : "") + predictors[i]->name();
    out += " constraints=";
    for (std::size_t i = 0; i < constraints.size(); ++i) out += (i ? "," : "") + constraints[i]->name();
    return out;
}

namespace {

bool is_predicted(const SpecState& h, Name t) { return h.predicted.count(t) != 0; }

bool prd_premise(const SpecState& h, Name t) {
    const Micro* m = h.base.find(t);
    return m && m->is_internal() && !defined(h.base.s, t);
}

bool pexe_premise(const SpecState& h, Name t) {
    if (!is_predicted(h, t)) return false;
    OooState without = h.base;
    without.s.erase(t);
    return exe_premise(without, t).has_value();
}

bool sibling_fetched(const SpecState& h, Name t) {
    for (const auto& m : h.base.instrs[t.instr].block->micros) {
        if (m.name != t && m.is_store(Resource::Pc) && h.base.fetched.count(m.name)) return true;
    }
    return false;
}

bool spec_ftc_premise(const SpecState& h, Name t) {
    if (!ftc_premise(h.base, t, /*ignore_siblings=*/true)) return false;
    return !sibling_fetched(h, t);
}

bool snapshot_retired(const SpecState& h, const Storage& snap) {
    for (const auto& [n, v] : snap) {
        if (!h.retired(n)) return false;
    }
    return true;
}

// A retired store may commit only when the older memory stores that
// str_may kept or dropped were judged on retired guards and addresses.
bool commit_premise(const SpecState& h, Name t) {
    if (!h.retired(t) || !cmt_premise(h.base, t)) return false;
    bool settled = true;
    h.base.for_each_micro([&](const Micro& older) {
        if (!settled || !(older.name < t) || !older.is_store(Resource::Mem)) return;
        for (Name n : older.guard.free_names()) settled &= h.retired(n);
        for (Name n : older.addr.free_names()) settled &= h.retired(n);
    });
    return settled;
}

// Ret and Rbk share the comparison of the snapshot with the storage.
// Returns nullopt when neither rule applies to t.
std::optional<bool> snapshot_matches(const SpecState& h, Name t) {
    auto it = h.delta.find(t);
    if (it == h.delta.end() || !defined(h.base.s, t) || is_predicted(h, t)) return std::nullopt;
    return t_equivalent(h.base, h.base.s, it->second, t);
}

// Snapshot a name falls back to when its result is discarded: the link
// to the still speculative fetch that decoded it, if any.
std::optional<Storage> decode_snapshot(const SpecState& h, Name t) {
    const auto& slot = h.base.instrs[t.instr];
    if (!slot.producer || h.retired(*slot.producer)) return std::nullopt;
    auto v = h.base.value(*slot.producer);
    if (!v) return std::nullopt;
    Storage snap;
    snap.emplace(*slot.producer, *v);
    return snap;
}

StepParam exe_param(Name t) {
    StepParam p;
    p.rule = Rule::Exe;
    p.name = t;
    return p;
}

void record_snapshot(SpecState& h, Name t, const Storage& deps_values) {
    Storage& snap = h.delta[t];
    for (const auto& [n, v] : deps_values) snap.insert_or_assign(n, v);
}

}  // namespace

bool spec_premise(const SpecState& h, const SpecStep& p) {
    const Name t = p.name;
    if (!h.base.contains(t)) return false;
    switch (p.rule) {
    case SpecRule::Prd: return prd_premise(h, t);
    case SpecRule::Exe: return !is_predicted(h, t) && exe_premise(h.base, t).has_value();
    case SpecRule::Pexe: return pexe_premise(h, t);
    case SpecRule::Cmt: return commit_premise(h, t);
    case SpecRule::Ftc: return spec_ftc_premise(h, t);
    case SpecRule::Ret: {
        auto eq = snapshot_matches(h, t);
        return eq && *eq && snapshot_retired(h, h.delta.find(t)->second);
    }
    case SpecRule::Rbk: {
        auto eq = snapshot_matches(h, t);
        return eq && !*eq;
    }
    }
    return false;
}

std::vector<SpecStep> spec_enabled_unconstrained(const SpecState& h, const SpecConfig& cfg) {
    std::vector<SpecStep> by_rule[7];
    auto push = [&](SpecRule r, Name t, Word v = 0) {
        by_rule[static_cast<std::size_t>(r)].push_back(SpecStep{r, t, v});
    };
    for (const auto& [t, values] : cfg.predictions(h.base)) {
        if (!prd_premise(h, t)) continue;
        for (Word v : values) push(SpecRule::Prd, t, v);
    }
    const OooState& st = h.base;
    st.for_each_micro([&](const Micro& m) {
        const Name t = m.name;
        if (is_predicted(h, t)) {
            if (pexe_premise(h, t)) push(SpecRule::Pexe, t);
        } else if (!defined(st.s, t)) {
            if (exe_premise(st, t)) push(SpecRule::Exe, t);
        }
        if (m.is_store(Resource::Mem) && commit_premise(h, t)) push(SpecRule::Cmt, t);
        if (m.is_store(Resource::Pc) && spec_ftc_premise(h, t)) push(SpecRule::Ftc, t);
        if (auto eq = snapshot_matches(h, t)) {
            if (!*eq) {
                push(SpecRule::Rbk, t);
            } else if (snapshot_retired(h, h.delta.find(t)->second)) {
                push(SpecRule::Ret, t);
            }
        }
    });
    std::vector<SpecStep> out;
    for (auto& v : by_rule) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<SpecStep> spec_enabled(const SpecState& h, const SpecConfig& cfg) {
    std::vector<SpecStep> all = spec_enabled_unconstrained(h, cfg);
    if (cfg.constraints.empty()) return all;
    std::vector<SpecStep> out;
    for (const auto& p : all) {
        bool ok = true;
        for (const auto& c : cfg.constraints) {
            if (!c->allows(h, p)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(p);
    }
    return out;
}

NameSet delta_plus(const SpecState& h, Name t) {
    std::map<Name, std::vector<Name>> referrers;
    for (const auto& [n, snap] : h.delta) {
        for (const auto& [dep, v] : snap) referrers[dep].push_back(n);
    }
    for (const auto& slot : h.base.instrs) {
        if (!slot.producer) continue;
        for (const auto& m : slot.block->micros) referrers[*slot.producer].push_back(m.name);
    }
    NameSet out;
    std::vector<Name> work{t};
    while (!work.empty()) {
        Name cur = work.back();
        work.pop_back();
        auto it = referrers.find(cur);
        if (it == referrers.end()) continue;
        for (Name r : it->second) {
            if (r != t && out.insert(r).second) work.push_back(r);
        }
    }
    return out;
}

SpecResult apply_spec_step(const SpecState& h, const SpecStep& p) {
    const Name t = p.name;
    switch (p.rule) {
    case SpecRule::Prd: {
        SpecResult r{h, Observation::silent()};
        r.state.base.s.insert_or_assign(t, p.value & h.base.mask());
        r.state.delta.try_emplace(t);
        r.state.predicted.insert(t);
        return r;
    }
    case SpecRule::Exe: {
        StepResult o = apply_step(h.base, exe_param(t));
        SpecResult r{SpecState{std::move(o.state), h.delta, h.predicted}, o.obs};
        record_snapshot(r.state, t, restrict_to(h.base.s, deps(h.base, t)));
        return r;
    }
    case SpecRule::Pexe: {
        OooState without = h.base;
        without.s.erase(t);
        StepResult o = apply_step(without, exe_param(t));
        SpecResult r{SpecState{std::move(o.state), h.delta, h.predicted}, o.obs};
        record_snapshot(r.state, t, restrict_to(h.base.s, deps(h.base, t)));
        r.state.predicted.erase(t);
        return r;
    }
    case SpecRule::Cmt: {
        auto param = cmt_premise(h.base, t);
        StepResult o = apply_step(h.base, *param);
        return SpecResult{SpecState{std::move(o.state), h.delta, h.predicted}, o.obs};
    }
    case SpecRule::Ftc: {
        auto param = ftc_premise(h.base, t, true);
        StepResult o = apply_step(h.base, *param);
        SpecResult r{SpecState{std::move(o.state), h.delta, h.predicted}, o.obs};
        Storage link;
        link.emplace(t, *h.base.value(t));
        for (const auto& m : r.state.base.instrs.back().block->micros) r.state.delta[m.name] = link;
        return r;
    }
    case SpecRule::Ret: {
        SpecResult r{h, Observation::silent()};
        r.state.delta.erase(t);
        return r;
    }
    case SpecRule::Rbk: {
        SpecResult r{h, Observation::silent()};
        SpecState& out = r.state;
        if (h.base.fetched.count(t)) {
            const NameSet plus = delta_plus(h, t);
            NameSet later;
            for (std::size_t i = t.instr + 1; i < h.base.instrs.size(); ++i) {
                for (const auto& m : h.base.instrs[i].block->micros) later.insert(m.name);
            }
            if (plus != later) {
                throw std::logic_error("rollback of " + to_string(t) +
                                       " does not cover exactly the instructions it produced");
            }
            for (Name n : plus) {
                if (h.base.committed.count(n)) {
                    throw std::logic_error("rollback of " + to_string(t) + " reaches committed " + to_string(n));
                }
                out.base.s.erase(n);
                out.base.fetched.erase(n);
                out.delta.erase(n);
                out.predicted.erase(n);
            }
            out.base.instrs.resize(t.instr + 1);
            out.base.fetched.erase(t);
            out.predicted.erase(t);
        }
        out.base.s.erase(t);
        out.delta.erase(t);
        if (auto snap = decode_snapshot(out, t)) out.delta.emplace(t, std::move(*snap));
        return r;
    }
    }
    throw RuleNotEnabled("unknown rule");
}

SpecResult spec_step(const SpecState& h, const SpecStep& p) {
    if (!spec_premise(h, p)) throw RuleNotEnabled(to_string(p) + " is not enabled");
    return apply_spec_step(h, p);
}

SpecResult spec_step(const SpecState& h, const SpecStep& p, const SpecConfig& cfg) {
    const auto en = spec_enabled(h, cfg);
    if (std::find(en.begin(), en.end(), p) == en.end()) {
        throw RuleNotEnabled(to_string(p) + " is not enabled under " + cfg.describe());
    }
    return apply_spec_step(h, p);
}

std::optional<Partitioning> wellformed_partition(const SpecState& h) {
    const auto& instrs = h.base.instrs;
    Partitioning part;
    std::size_t i = 0;
    for (; i < instrs.size(); ++i) {
        bool all_retired = true;
        for (const auto& m : instrs[i].block->micros) {
            if (!h.retired(m.name)) {
                all_retired = false;
                break;
            }
        }
        if (!all_retired) break;
    }
    part.retired_blocks = static_cast<std::uint32_t>(i);
    for (std::size_t k = std::max<std::size_t>(i, 1); k < instrs.size(); ++k) {
        const auto& slot = instrs[k];
        if (!slot.producer) {
            // Instructions listed in a hand-written boot image have no producer.
            part.producers.push_back(Name{});
            continue;
        }
        const Name p = *slot.producer;
        if (p.instr >= k || !h.base.fetched.count(p)) return std::nullopt;
        if (h.base.value(p) != std::optional<Word>(slot.block->pc)) return std::nullopt;
        if (!h.retired(p)) {
            for (const auto& m : slot.block->micros) {
                auto it = h.delta.find(m.name);
                if (it == h.delta.end() || it->second.find(p) == it->second.end()) return std::nullopt;
            }
        }
        part.producers.push_back(p);
    }
    // Snapshots only reference older names, so the reference relation is
    // well founded.
    for (const auto& [t, snap] : h.delta) {
        for (const auto& [n, v] : snap) {
            if (!(n < t)) return std::nullopt;
        }
    }
    return part;
}

std::string dump_state(const SpecState& h) {
    std::ostringstream out;
    out << dump_state(h.base);
    out << "delta:";
    for (const auto& [t, snap] : h.delta) {
        out << " " << to_string(t) << "{";
        bool first = true;
        for (const auto& [n, v] : snap) {
            out << (first ? "" : ", ") << to_string(n) << "=" << v;
            first = false;
        }
        out << "}";
    }
    out << "\npredicted:";
    for (Name n : h.predicted) out << " " << to_string(n);
    out << "\n";
    return out.str();
}

}  // namespace inspectre
