#include "inspectre/consistency.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "inspectre/errors.hpp"
#include "inspectre/inorder.hpp"

namespace inspectre {

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* env = std::getenv("INSPECTRE_SEED");
    if (!env || !*env) return fallback;
    try {
        return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
        throw Error(std::string("INSPECTRE_SEED is not a number: ") + env);
    }
}

CommitLog commit_log(const std::vector<StepParam>& params) {
    CommitLog log;
    for (const auto& p : params) {
        if (p.rule == Rule::Cmt) log[p.addr].push_back(p.value);
    }
    return log;
}

namespace {

template <class T>
const T& choose(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::string names_text(const NameSet& names) {
    std::string out = "{";
    for (Name n : names) out += (out.size() > 1 ? ", " : "") + to_string(n);
    return out + "}";
}

std::string words_text(const std::vector<Word>& ws) {
    std::string out = "[";
    for (Word w : ws) out += (out.size() > 1 ? ", " : "") + std::to_string(w);
    return out + "]";
}

// In-order commits, extended on demand when a target run commits further
// than the reference got within its fuel.
class InOrderReference {
public:
    InOrderReference(const OooState& init, std::size_t fuel) : init_(init), fuel_(fuel) { run(); }

    // Address whose target commits are not a prefix of the reference.
    std::optional<Word> mismatch(const CommitLog& target) {
        for (;;) {
            bool short_reference = false;
            for (const auto& [addr, values] : target) {
                auto it = log_.find(addr);
                static const std::vector<Word> none;
                const std::vector<Word>& have = it == log_.end() ? none : it->second;
                const bool prefix =
                    values.size() <= have.size() && std::equal(values.begin(), values.end(), have.begin());
                if (prefix) continue;
                const bool agrees_so_far = std::equal(have.begin(), have.end(), values.begin());
                if (exhausted_ || !agrees_so_far) return addr;
                short_reference = true;
            }
            if (!short_reference) return std::nullopt;
            fuel_ *= 2;
            run();
        }
    }

    const CommitLog& log() const { return log_; }

private:
    void run() {
        auto r = run_inorder(init_, fuel_, false);
        log_ = commit_log(r.params);
        exhausted_ = r.end != RunEnd::OutOfFuel || fuel_ > (std::size_t{1} << 20);
    }

    OooState init_;
    std::size_t fuel_;
    CommitLog log_;
    bool exhausted_ = false;
};

}  // namespace

OooRun random_ooo_run(const OooState& init, std::size_t max_steps, std::mt19937_64& rng) {
    OooRun run;
    run.states.push_back(init);
    for (std::size_t i = 0; i < max_steps; ++i) {
        auto options = enabled(run.states.back());
        if (options.empty()) break;
        auto r = apply_step(run.states.back(), choose(options, rng));
        run.steps.push_back(std::move(r.param));
        run.obs.push_back(r.obs);
        run.states.push_back(std::move(r.state));
    }
    return run;
}

SpecRun random_spec_run(const SpecState& init, const SpecConfig& cfg, std::size_t max_steps, std::mt19937_64& rng) {
    SpecRun run;
    run.states.push_back(init);
    for (std::size_t i = 0; i < max_steps; ++i) {
        const SpecState& cur = run.states.back();
        auto options = spec_enabled(cur, cfg);
        if (options.empty()) break;
        const SpecStep p = choose(options, rng);
        if (p.rule == SpecRule::Cmt) {
            auto c = cmt_premise(cur.base, p.name);
            run.commits[c->addr].push_back(c->value);
        }
        auto r = apply_spec_step(cur, p);
        run.steps.push_back(p);
        run.obs.push_back(r.obs);
        run.states.push_back(std::move(r.state));
    }
    return run;
}

void PropertyVerdict::fail(std::string what) {
    if (ok) counterexample = std::move(what);
    ok = false;
}

void PropertyVerdict::merge(const PropertyVerdict& other) {
    cases += other.cases;
    advisories += other.advisories;
    if (!other.ok) fail(other.counterexample);
}

std::string PropertyVerdict::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["property"] = property;
    j["verdict"] = ok ? "Consistent" : "Violated";
    j["seed"] = seed;
    j["cases"] = cases;
    j["advisories"] = advisories;
    j["counterexample"] = ok ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(counterexample);
    return j.dump();
}

PropertyVerdict check_memory_consistency(const OooState& init, const Semantics& target, const ConsistencyOptions& opts) {
    if (target.kind == SemanticsKind::InOrder) throw PreconditionViolated("consistency target must be ooo or spec");
    PropertyVerdict v;
    v.property = "memory-consistency";
    v.seed = opts.seed;
    std::mt19937_64 rng(opts.seed);
    InOrderReference reference(init, 4 * opts.depth + 64);
    const SpecState spec_init = spec_initial(init);
    for (std::size_t i = 0; i < opts.samples && v.ok; ++i) {
        CommitLog log;
        if (target.kind == SemanticsKind::OutOfOrder) {
            log = commit_log(random_ooo_run(init, opts.depth, rng).steps);
        } else {
            log = random_spec_run(spec_init, target.spec, opts.depth, rng).commits;
        }
        ++v.cases;
        if (auto addr = reference.mismatch(log)) {
            auto it = reference.log().find(*addr);
            v.fail("sample " + std::to_string(i) + " under " + target.describe() + ": commits to address " +
                   std::to_string(*addr) + " were " + words_text(log[*addr]) + ", in-order commits " +
                   words_text(it == reference.log().end() ? std::vector<Word>{} : it->second));
        }
    }
    return v;
}

CommutationWitness check_commute(const OooState& start, const StepParam& first, const StepParam& second) {
    if (!(second.name < first.name)) {
        throw PreconditionViolated("the second step " + to_string(second.name) + " must be older than the first " +
                                   to_string(first.name));
    }
    CommutationWitness w{start, first, second, start, std::nullopt};
    StepResult r1, r2;
    try {
        r1 = step(start, first);
        r2 = step(r1.state, second);
    } catch (const RuleNotEnabled& e) {
        throw PreconditionViolated(std::string("steps are not consecutive: ") + e.what());
    }
    w.first = r1.param;
    w.second = r2.param;
    w.end = r2.state;
    w.colliding_commits = w.first.rule == Rule::Cmt && w.second.rule == Rule::Cmt && w.first.addr == w.second.addr;
    for (const auto& q2 : enabled(start)) {
        if (q2.rule != second.rule || q2.name != second.name) continue;
        auto mid = apply_step(start, q2);
        for (const auto& q1 : enabled(mid.state)) {
            if (q1.rule != first.rule || q1.name != first.name) continue;
            auto fin = apply_step(mid.state, q1);
            if (!(fin.state == w.end)) continue;
            w.weakened_observation = mid.obs != r2.obs || fin.obs != r1.obs;
            w.midpoint = std::move(mid.state);
            return w;
        }
    }
    return w;
}

PropertyVerdict check_commutation(const OooState& init, const ConsistencyOptions& opts) {
    PropertyVerdict v;
    v.property = "commutation";
    v.seed = opts.seed;
    std::mt19937_64 rng(opts.seed);
    for (std::size_t i = 0; i < opts.samples && v.ok; ++i) {
        auto run = random_ooo_run(init, opts.depth, rng);
        for (std::size_t k = 0; k + 1 < run.steps.size() && v.ok; ++k) {
            const StepParam& p1 = run.steps[k];
            const StepParam& p2 = run.steps[k + 1];
            if (!(p2.name < p1.name)) continue;
            ++v.cases;
            auto w = check_commute(run.states[k], p1, p2);
            if (w.holds()) continue;
            v.fail("sample " + std::to_string(i) + " steps " + std::to_string(k) + ", " + std::to_string(k + 1) + ": " +
                   to_string(p1) + " then " + to_string(p2) +
                   (w.colliding_commits ? " commit to the same address" : " do not commute"));
        }
    }
    return v;
}

PropertyVerdict check_strmay_lemmas(const std::vector<OooState>& run, const std::vector<StepParam>& steps) {
    PropertyVerdict v;
    v.property = "str-may-lemmas";
    for (std::size_t k = 0; k + 1 < run.size() && k < steps.size() && v.ok; ++k) {
        const OooState& before = run[k];
        const OooState& after = run[k + 1];
        const Name stepped = steps[k].name;
        before.for_each_micro([&](const Micro& m) {
            if (!v.ok || m.is_internal()) return;
            ++v.cases;
            const NameSet may0 = bound_names(str_may(before, m.name));
            const NameSet may1 = bound_names(str_may(after, m.name));
            const NameSet act0 = bound_names(str_act(before, m.name));
            const NameSet act1 = bound_names(str_act(after, m.name));
            const auto where = "step " + std::to_string(k) + " (" + to_string(steps[k]) + "), " + to_string(m.name);
            if (!std::includes(may0.begin(), may0.end(), may1.begin(), may1.end())) {
                v.fail(where + ": str_may grew from " + names_text(may0) + " to " + names_text(may1));
            } else if (!std::includes(act0.begin(), act0.end(), act1.begin(), act1.end())) {
                v.fail(where + ": str_act grew from " + names_text(act0) + " to " + names_text(act1));
            } else if (!(stepped < m.name) && (may0 != may1 || act0 != act1)) {
                v.fail(where + ": a step on a name at or above it changed str_may/str_act");
            }
        });
    }
    return v;
}

namespace {

struct LoadOutcome {
    std::optional<Word> value;
    NameSet deps;
    NameSet active;

    bool operator==(const LoadOutcome&) const = default;
};

LoadOutcome outcome(const OooState& st, Name t) {
    auto d = denote(st, t);
    return {d ? std::optional<Word>(d->value) : std::nullopt, deps(st, t), bound_names(str_act(st, t))};
}

std::string outcome_text(const LoadOutcome& o) {
    return "value " + (o.value ? std::to_string(*o.value) : std::string("undefined")) + ", deps " +
           names_text(o.deps) + ", str_act " + names_text(o.active);
}

}  // namespace

PropertyVerdict check_deps_oracle(const OooState& st, Name t, std::mt19937_64& rng, std::size_t mutations) {
    PropertyVerdict v;
    v.property = "deps-oracle";
    if (!st.at(t).is_load()) throw PreconditionViolated(to_string(t) + " is not a load");
    if (st.at(t).has_addr() && !st.eval(st.at(t).addr)) {
        throw PreconditionViolated("the address of " + to_string(t) + " is unresolved");
    }
    const LoadOutcome base = outcome(st, t);

    std::vector<Word> pool{0, 1, 2, 3};
    for (const auto& [n, w] : st.s) pool.push_back(w);
    st.for_each_micro([&](const Micro& m) {
        if (m.has_addr()) {
            if (auto a = st.eval(m.addr)) pool.push_back(*a);
        }
    });
    std::vector<Name> outside;
    std::vector<Name> inside;
    st.for_each_micro([&](const Micro& m) { (base.deps.count(m.name) ? inside : outside).push_back(m.name); });

    auto mutate = [&](OooState& copy, Name n) {
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
            copy.s.erase(n);
        } else {
            copy.s[n] = choose(pool, rng) & st.mask();
        }
    };

    for (std::size_t i = 0; i < mutations && v.ok; ++i) {
        OooState copy = st;
        for (Name n : outside) {
            if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) mutate(copy, n);
        }
        ++v.cases;
        const LoadOutcome got = outcome(copy, t);
        if (!(got == base)) {
            v.fail("load " + to_string(t) + ": mutating names outside deps changed the outcome from " +
                   outcome_text(base) + " to " + outcome_text(got));
        }
    }
    for (Name d : inside) {
        bool sensitive = false;
        for (std::size_t i = 0; i < 8 && !sensitive; ++i) {
            OooState copy = st;
            mutate(copy, d);
            sensitive = !(outcome(copy, t) == base);
        }
        if (!sensitive) ++v.advisories;
    }
    return v;
}

}  // namespace inspectre
