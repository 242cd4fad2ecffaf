#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/container/flat_map.hpp>

#include "inspectre/ooo.hpp"
#include "inspectre/spec.hpp"

namespace inspectre {

enum class SemanticsKind : std::uint8_t { InOrder, OutOfOrder, Speculative };

struct Semantics {
    SemanticsKind kind = SemanticsKind::InOrder;
    // Predictors and constraints; only used by the speculative semantics.
    SpecConfig spec;

    static Semantics inorder() { return {SemanticsKind::InOrder, {}}; }
    static Semantics out_of_order() { return {SemanticsKind::OutOfOrder, {}}; }
    static Semantics speculative(SpecConfig cfg) { return {SemanticsKind::Speculative, std::move(cfg)}; }

    std::string describe() const;
};

struct ExploreLimits {
    // Maximum number of transitions in an execution.  Retirements are
    // not counted: the speculative exploration performs them eagerly.
    std::size_t depth = 40;
    // Maximum number of distinct states visited.
    std::size_t max_nodes = 2'000'000;
};

// Prefix-closed set of observation traces stored as a trie.  Node 0 is the
// empty trace.
class TraceTrie {
public:
    using NodeId = std::uint32_t;

    TraceTrie();

    NodeId root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }
    // Child of `n` along `o`, created when missing.
    NodeId extend(NodeId n, Observation o);
    std::optional<NodeId> child(NodeId n, Observation o) const;
    NodeId insert(const Trace& t);
    bool contains(const Trace& t) const;
    Trace trace(NodeId n) const;
    std::size_t length(NodeId n) const { return nodes_[n].length; }
    bool is_leaf(NodeId n) const { return nodes_[n].children.empty(); }
    // Traces not a proper prefix of another member, in lexicographic order.
    std::vector<Trace> maximal() const;
    // First trace, shortest first, satisfying `pred`.
    std::optional<Trace> find(const std::function<bool(const Trace&)>& pred) const;
    // Breadth-first order of node ids (shortest traces first).
    std::vector<NodeId> breadth_first() const;

private:
    struct Node {
        NodeId parent = 0;
        Observation obs;
        std::size_t length = 0;
        boost::container::flat_map<Observation, NodeId> children;
    };
    std::vector<Node> nodes_;
};

struct ExploreStats {
    // Distinct states and (state, trace) pairs visited.
    std::size_t nodes = 0;
    std::size_t product_nodes = 0;
    std::size_t transitions = 0;
    // Whether some execution was cut off by the depth bound.
    bool truncated = false;
};

// Traces of every execution of at most `limits.depth` transitions.
// Throws ExplosionBudgetExceeded.
TraceTrie trace_set(const OooState& init, const Semantics& sem, const ExploreLimits& limits,
                    ExploreStats* stats = nullptr);

// Shortest member of `reference` that no execution from `init` of at most
// `limits.depth` transitions produces, if any.
std::optional<Trace> first_unmatched(const TraceTrie& reference, const OooState& init, const Semantics& sem,
                                     const ExploreLimits& limits, ExploreStats* stats = nullptr);

// Whether some execution from `init` produces exactly `t` (possibly
// followed by further observations).
bool reaches_trace(const OooState& init, const Semantics& sem, const Trace& t, const ExploreLimits& limits);

// Applies every enabled retirement the constraints allow until none is
// left.  Retirement is silent and never disables another transition, so
// exploring only retired-closed states loses no trace.
SpecState retire_all(const SpecState& h, const SpecConfig& cfg);

// One-step successors under each semantics, in a deterministic order.
std::vector<StepResult> ooo_successors(const OooState& st);
std::vector<SpecResult> spec_successors(const SpecState& h, const SpecConfig& cfg);

}  // namespace inspectre
