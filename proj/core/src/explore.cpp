#include "inspectre/explore.hpp"

#include <deque>
#include <unordered_set>

#include "inspectre/errors.hpp"
#include "inspectre/inorder.hpp"

namespace inspectre {

std::string Semantics::describe() const {
    switch (kind) {
    case SemanticsKind::InOrder: return "inorder";
    case SemanticsKind::OutOfOrder: return "ooo";
    case SemanticsKind::Speculative: return "spec(" + spec.describe() + ")";
    }
    return "?";
}

TraceTrie::TraceTrie() { nodes_.emplace_back(); }

TraceTrie::NodeId TraceTrie::extend(NodeId n, Observation o) {
    auto it = nodes_[n].children.find(o);
    if (it != nodes_[n].children.end()) return it->second;
    const auto id = static_cast<NodeId>(nodes_.size());
    Node node;
    node.parent = n;
    node.obs = o;
    node.length = nodes_[n].length + 1;
    nodes_.push_back(std::move(node));
    nodes_[n].children.emplace(o, id);
    return id;
}

std::optional<TraceTrie::NodeId> TraceTrie::child(NodeId n, Observation o) const {
    auto it = nodes_[n].children.find(o);
    if (it == nodes_[n].children.end()) return std::nullopt;
    return it->second;
}

TraceTrie::NodeId TraceTrie::insert(const Trace& t) {
    NodeId n = root();
    for (Observation o : t) {
        if (!o.is_silent()) n = extend(n, o);
    }
    return n;
}

bool TraceTrie::contains(const Trace& t) const {
    NodeId n = root();
    for (Observation o : t) {
        if (o.is_silent()) continue;
        auto c = child(n, o);
        if (!c) return false;
        n = *c;
    }
    return true;
}

Trace TraceTrie::trace(NodeId n) const {
    Trace out(nodes_[n].length);
    for (std::size_t i = out.size(); i > 0; --i) {
        out[i - 1] = nodes_[n].obs;
        n = nodes_[n].parent;
    }
    return out;
}

std::vector<Trace> TraceTrie::maximal() const {
    std::vector<Trace> out;
    std::vector<NodeId> stack{root()};
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (nodes_[n].children.empty()) {
            out.push_back(trace(n));
            continue;
        }
        for (auto it = nodes_[n].children.rbegin(); it != nodes_[n].children.rend(); ++it) stack.push_back(it->second);
    }
    return out;
}

std::vector<TraceTrie::NodeId> TraceTrie::breadth_first() const {
    std::vector<NodeId> order{root()};
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& [o, c] : nodes_[order[i]].children) order.push_back(c);
    }
    return order;
}

std::optional<Trace> TraceTrie::find(const std::function<bool(const Trace&)>& pred) const {
    for (NodeId n : breadth_first()) {
        Trace t = trace(n);
        if (pred(t)) return t;
    }
    return std::nullopt;
}

std::vector<StepResult> ooo_successors(const OooState& st) {
    std::vector<StepResult> out;
    for (const auto& p : enabled(st)) out.push_back(apply_step(st, p));
    return out;
}

std::vector<SpecResult> spec_successors(const SpecState& h, const SpecConfig& cfg) {
    std::vector<SpecResult> out;
    for (const auto& p : spec_enabled(h, cfg)) out.push_back(apply_spec_step(h, p));
    return out;
}

SpecState retire_all(const SpecState& h, const SpecConfig& cfg) {
    SpecState cur = h;
    for (bool progress = true; progress;) {
        progress = false;
        std::vector<Name> pending;
        for (const auto& [t, snap] : cur.delta) pending.push_back(t);
        for (Name t : pending) {
            SpecStep ret{SpecRule::Ret, t, 0};
            if (!spec_premise(cur, ret)) continue;
            bool allowed = true;
            for (const auto& c : cfg.constraints) allowed &= c->allows(cur, ret);
            if (!allowed) continue;
            cur = apply_spec_step(cur, ret).state;
            progress = true;
        }
    }
    return cur;
}

namespace {

using NodeId = TraceTrie::NodeId;

// States reachable within the depth bound, each expanded once.
template <class State>
struct StateGraph {
    struct Edge {
        Observation obs;
        std::uint32_t to;
    };
    std::deque<State> states;
    std::vector<std::vector<Edge>> edges;
    bool truncated = false;
    std::size_t transitions = 0;
};

template <class State, class Successors>
StateGraph<State> build_graph(State init, Successors&& successors, const ExploreLimits& limits) {
    StateGraph<State> g;
    struct Ref {
        const std::deque<State>* states;
        std::uint32_t idx;
        std::size_t hash;
    };
    struct RefHash {
        std::size_t operator()(const Ref& r) const { return r.hash; }
    };
    struct RefEq {
        bool operator()(const Ref& a, const Ref& b) const {
            return a.hash == b.hash && (*a.states)[a.idx] == (*b.states)[b.idx];
        }
    };
    std::unordered_set<Ref, RefHash, RefEq> seen;
    auto intern = [&](State&& st) -> std::uint32_t {
        const std::size_t h = st.hash();
        g.states.push_back(std::move(st));
        const auto idx = static_cast<std::uint32_t>(g.states.size() - 1);
        auto [it, fresh] = seen.insert(Ref{&g.states, idx, h});
        if (!fresh) {
            g.states.pop_back();
            return it->idx;
        }
        if (g.states.size() > limits.max_nodes) throw ExplosionBudgetExceeded(limits.max_nodes);
        g.edges.emplace_back();
        return idx;
    };
    intern(std::move(init));
    std::size_t layer_begin = 0;
    for (std::size_t depth = 0; layer_begin < g.states.size(); ++depth) {
        const std::size_t layer_end = g.states.size();
        for (std::size_t i = layer_begin; i < layer_end; ++i) {
            auto next = successors(g.states[i]);
            if (depth == limits.depth) {
                g.truncated |= !next.empty();
                continue;
            }
            std::vector<typename StateGraph<State>::Edge> out;
            out.reserve(next.size());
            for (auto& r : next) {
                ++g.transitions;
                const Observation obs = r.obs;
                out.push_back({obs, intern(std::move(r.state))});
            }
            g.edges[i] = std::move(out);
        }
        layer_begin = layer_end;
        if (depth == limits.depth) break;
    }
    return g;
}

// Breadth-first walk of the graph in lockstep with a trace position.
// `advance` maps a position and a visible observation to the next
// position, or rejects the transition.
template <class State, class Advance>
std::size_t walk(const StateGraph<State>& g, Advance&& advance, std::size_t depth_bound) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint64_t> layer{0};
    seen.insert(0);
    for (std::size_t depth = 0; depth < depth_bound && !layer.empty(); ++depth) {
        std::vector<std::uint64_t> next;
        for (std::uint64_t key : layer) {
            const auto state = static_cast<std::uint32_t>(key >> 32);
            const auto pos = static_cast<NodeId>(key & 0xffffffffu);
            for (const auto& e : g.edges[state]) {
                std::optional<NodeId> np = e.obs.is_silent() ? std::optional<NodeId>(pos) : advance(pos, e.obs);
                if (!np) continue;
                const std::uint64_t k = (std::uint64_t{e.to} << 32) | *np;
                if (seen.insert(k).second) next.push_back(k);
            }
        }
        layer = std::move(next);
    }
    return seen.size();
}

template <class Advance>
void search_semantics(const OooState& init, const Semantics& sem, Advance&& advance, const ExploreLimits& limits,
                      ExploreStats& stats) {
    auto run = [&](const auto& g) {
        stats.nodes = g.states.size();
        stats.transitions = g.transitions;
        stats.truncated = g.truncated;
        stats.product_nodes = walk(g, advance, limits.depth);
    };
    switch (sem.kind) {
    case SemanticsKind::InOrder:
        run(build_graph(
            init,
            [](const OooState& st) {
                std::vector<StepResult> out;
                if (auto r = inorder_step(st)) out.push_back(std::move(*r));
                return out;
            },
            limits));
        return;
    case SemanticsKind::OutOfOrder:
        run(build_graph(init, ooo_successors, limits));
        return;
    case SemanticsKind::Speculative:
        run(build_graph(
            retire_all(spec_initial(init), sem.spec),
            [&](const SpecState& h) {
                auto next = spec_successors(h, sem.spec);
                std::vector<SpecResult> out;
                for (auto& r : next) {
                    r.state = retire_all(r.state, sem.spec);
                    out.push_back(std::move(r));
                }
                return out;
            },
            limits));
        return;
    }
}

}  // namespace

TraceTrie trace_set(const OooState& init, const Semantics& sem, const ExploreLimits& limits, ExploreStats* stats) {
    TraceTrie trie;
    ExploreStats local;
    search_semantics(
        init, sem, [&](NodeId pos, Observation o) -> std::optional<NodeId> { return trie.extend(pos, o); }, limits,
        local);
    if (stats) *stats = local;
    return trie;
}

std::optional<Trace> first_unmatched(const TraceTrie& reference, const OooState& init, const Semantics& sem,
                                     const ExploreLimits& limits, ExploreStats* stats) {
    std::vector<bool> matched(reference.size(), false);
    matched[reference.root()] = true;
    ExploreStats local;
    search_semantics(
        init, sem,
        [&](NodeId pos, Observation o) -> std::optional<NodeId> {
            auto c = reference.child(pos, o);
            if (c) matched[*c] = true;
            return c;
        },
        limits, local);
    if (stats) *stats = local;
    for (NodeId n : reference.breadth_first()) {
        if (!matched[n]) return reference.trace(n);
    }
    return std::nullopt;
}

bool reaches_trace(const OooState& init, const Semantics& sem, const Trace& t, const ExploreLimits& limits) {
    TraceTrie target;
    target.insert(t);
    return !first_unmatched(target, init, sem, limits).has_value();
}

}  // namespace inspectre
