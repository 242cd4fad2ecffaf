#include "inspectre/predictors.hpp"

#include <algorithm>
#include <stdexcept>

namespace inspectre {

namespace {

// The name an operand reads when it is a bare reference to an internal
// operation that has not produced a value yet.
std::optional<Name> unresolved_internal(const OooState& st, const Expr& operand) {
    if (!operand.is_ref()) return std::nullopt;
    const Micro* m = st.find(operand.name());
    if (!m || !m->is_internal() || defined(st.s, m->name)) return std::nullopt;
    return m->name;
}

void add_all(PredictionMap& out, Name t, const std::vector<Word>& values) {
    auto& slot = out[t];
    slot.insert(values.begin(), values.end());
}

}  // namespace

PredictionMap BranchPredictor::predict(const OooState& st) const {
    PredictionMap out;
    st.for_each_micro([&](const Micro& m) {
        if (!m.is_store(Resource::Pc) || !st.eval(m.value)) return;
        for (Name g : m.guard.free_names()) {
            const Micro* gm = st.find(g);
            if (gm && gm->is_internal() && !defined(st.s, g)) add_all(out, g, {0, 1});
        }
    });
    return out;
}

std::vector<Word> BtbPredictor::candidates(const OooState& st) const {
    if (candidates_) return *candidates_;
    return st.machine->code_labels();
}

PredictionMap BtbPredictor::predict(const OooState& st) const {
    PredictionMap out;
    std::vector<Word> targets;
    bool loaded = false;
    st.for_each_micro([&](const Micro& m) {
        if (!m.is_store(Resource::Pc) || !m.has_tag(kTagIndirectJump)) return;
        auto ta = unresolved_internal(st, m.value);
        if (!ta) return;
        if (!loaded) {
            targets = candidates(st);
            loaded = true;
        }
        add_all(out, *ta, targets);
    });
    return out;
}

std::set<long> rsb_depths(const OooState& st, Name call, Name ret) {
    std::set<long> out;
    long depth = 0;
    st.for_each_micro([&](const Micro& m) {
        if (m.name < call || !(m.name < ret)) return;
        if (m.is_store(Resource::Pc)) {
            if (m.has_tag(kTagCall)) ++depth;
            if (m.has_tag(kTagReturn)) --depth;
        }
        out.insert(depth);
    });
    return out;
}

PredictionMap RsbPredictor::predict(const OooState& st) const {
    PredictionMap out;
    std::vector<const Micro*> calls;
    std::vector<const Micro*> rets;
    st.for_each_micro([&](const Micro& m) {
        if (!m.is_store(Resource::Pc)) return;
        if (m.has_tag(kTagCall)) calls.push_back(&m);
        if (m.has_tag(kTagReturn)) rets.push_back(&m);
    });
    for (const Micro* ret : rets) {
        auto ta = unresolved_internal(st, ret->value);
        if (!ta) continue;
        for (const Micro* call : calls) {
            if (!(call->name < ret->name)) break;
            const std::set<long> depths = rsb_depths(st, call->name, ret->name);
            const long lo = *depths.begin();
            const long hi = *depths.rbegin();
            if (lo >= 1 && hi <= static_cast<long>(capacity_)) {
                if (auto v = st.value(call->link)) out[*ta].insert(*v);
            } else if (fallback_ && lo == 1 && hi > static_cast<long>(capacity_) &&
                       depths.size() == static_cast<std::size_t>(hi)) {
                add_all(out, *ta, btb_.candidates(st));
            }
        }
    }
    return out;
}

PredictionMap StorePredictor::predict(const OooState& st) const {
    PredictionMap out;
    st.for_each_micro([&](const Micro& load) {
        if (!load.is_load(Resource::Mem)) return;
        auto addr = st.eval(load.addr);
        if (!addr) return;
        for (const Micro* store : str_act(st, load.name)) {
            auto ta = unresolved_internal(st, store->addr);
            if (!ta) continue;
            if (mode_ == Mode::Dependency) {
                out[*ta].insert(*addr);
                continue;
            }
            auto& slot = out[*ta];
            for (Word a : st.machine->footprint()) {
                if (a != *addr) slot.insert(a);
            }
            if (slot.empty()) out.erase(*ta);
        }
    });
    return out;
}

bool FetchOnlyConstraint::allows(const SpecState& h, const SpecStep& p) const {
    if (p.rule != SpecRule::Exe) return true;
    const Micro& m = h.base.at(p.name);
    if (m.is_internal() || m.res == Resource::Pc) return true;
    return h.delta.empty() || !(h.delta.begin()->first < p.name);
}

bool LfenceConstraint::allows(const SpecState& h, const SpecStep& p) const {
    if (p.rule != SpecRule::Exe) return true;
    const OooState& st = h.base;
    const Micro& m = st.at(p.name);
    const auto settled = [&](Name n) { return defined(st.s, n) && h.retired(n); };
    bool ok = true;
    if (m.has_tag(kTagFence)) {
        st.for_each_micro([&](const Micro& older) {
            if (!ok || !(older.name < m.name) || !older.is_load(Resource::Mem)) return;
            for (Name g : older.guard.free_names()) ok &= settled(g);
            if (ok && st.guard(older).value_or(false)) ok = settled(older.name);
        });
        return ok;
    }
    const bool ordered = m.is_load(Resource::Mem) || m.is_store(Resource::Mem) || m.is_store(Resource::Reg);
    if (!ordered) return true;
    st.for_each_micro([&](const Micro& fence) {
        if (ok && fence.name < m.name && fence.has_tag(kTagFence)) ok = settled(fence.name);
    });
    return ok;
}

bool SsbsConstraint::allows(const SpecState& h, const SpecStep& p) const {
    if (p.rule != SpecRule::Exe) return true;
    const OooState& st = h.base;
    const Micro& m = st.at(p.name);
    if (!m.is_load() || !m.has_addr()) return true;
    auto addr = st.eval(m.addr);
    for (Name src : srcs(st, p.name)) {
        if (h.predicted.count(src) && st.value(src) != addr) return false;
    }
    return true;
}

const std::vector<std::string>& predictor_names() {
    static const std::vector<std::string> names{"br", "btb", "rsb", "rsb_btb", "stl", "stld"};
    return names;
}

const std::vector<std::string>& constraint_names() {
    static const std::vector<std::string> names{"fetch_only", "lfence", "ssbs"};
    return names;
}

std::shared_ptr<const Predictor> make_predictor(const std::string& name, const PredictorOptions& opts) {
    if (name == "br") return std::make_shared<BranchPredictor>();
    if (name == "btb") return std::make_shared<BtbPredictor>(opts.btb_candidates);
    if (name == "rsb") return std::make_shared<RsbPredictor>(opts.rsb_capacity, false, opts.btb_candidates);
    if (name == "rsb_btb") return std::make_shared<RsbPredictor>(opts.rsb_capacity, true, opts.btb_candidates);
    if (name == "stl") return std::make_shared<StorePredictor>(StorePredictor::Mode::Bypass);
    if (name == "stld") return std::make_shared<StorePredictor>(StorePredictor::Mode::Dependency);
    throw std::invalid_argument("unknown predictor '" + name + "'");
}

std::shared_ptr<const Constraint> make_constraint(const std::string& name) {
    if (name == "fetch_only") return std::make_shared<FetchOnlyConstraint>();
    if (name == "lfence") return std::make_shared<LfenceConstraint>();
    if (name == "ssbs") return std::make_shared<SsbsConstraint>();
    throw std::invalid_argument("unknown constraint '" + name + "'");
}

SpecConfig make_config(const std::vector<std::string>& predictors, const std::vector<std::string>& constraints,
                       const PredictorOptions& opts) {
    SpecConfig cfg;
    for (const auto& p : predictors) cfg.predictors.push_back(make_predictor(p, opts));
    for (const auto& c : constraints) cfg.constraints.push_back(make_constraint(c));
    return cfg;
}

}  // namespace inspectre
