#pragma once

// Maximal-parallel semantics of fuzzy symport/antiport systems and bounded
// breadth-first exploration of their computation trees.

#include "memfuzz/system_model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memfuzz {

/// Per-reactive grade distributions of one rule application: how many of the
/// entering (resp. exiting) copies of v are taken at each grade.
struct Distribution {
    std::map<ReactiveId, std::map<Grade, std::uint64_t>> enter;
    std::map<ReactiveId, std::map<Grade, std::uint64_t>> exit;

    friend auto operator<=>(const Distribution&, const Distribution&) = default;
};

struct RuleRef {
    MembraneId membrane;
    std::size_t rule_index = 0;

    friend auto operator<=>(const RuleRef&, const RuleRef&) = default;
};

struct RuleInstance {
    MembraneId membrane;
    std::size_t rule_index = 0;
    Distribution distribution;

    [[nodiscard]] RuleRef rule() const { return {membrane, rule_index}; }
    friend auto operator<=>(const RuleInstance&, const RuleInstance&) = default;
};

/// A maximal family of rule instances; instances are kept sorted.
struct TransitionChoice {
    std::vector<RuleInstance> instances;

    /// The underlying multiset of rules, sorted.
    [[nodiscard]] std::vector<RuleRef> family() const;
    friend auto operator<=>(const TransitionChoice&, const TransitionChoice&) = default;
};

struct Transition {
    TransitionChoice choice;
    Configuration result;
};

struct TransitionOptions {
    /// Keep one transition per distinct resulting configuration.
    bool dedup_by_result = true;
    /// Upper bound on enumerated transition choices for one configuration.
    std::size_t max_transitions = 10000;
};

struct TransitionSet {
    std::vector<Transition> transitions;
    bool truncated = false;
};

struct ExplorationBounds {
    std::size_t max_depth = 64;
    std::size_t max_configs = 100000;
    std::size_t max_transitions_per_config = 10000;
};

struct ExploreOptions {
    ExplorationBounds bounds;
    bool dedup_by_result = true;
    /// Keep every explored edge (with its choice) in the result.
    bool record_edges = false;
    /// Check conservation and finiteness on every explored edge.
    bool check_invariants = true;
    /// Worker threads used to expand a BFS layer; results do not depend on it.
    unsigned threads = 1;
};

enum class TruncationReason { max_depth, max_configs, max_transitions };

std::string to_string(TruncationReason reason);

struct ExplorationEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    TransitionChoice choice;
};

struct ExplorationResult {
    /// Visited configurations in BFS discovery order; the index is the id.
    std::vector<Configuration> configurations;
    std::vector<std::size_t> depths;
    /// Ids of halting configurations, ascending.
    std::vector<std::size_t> halting;
    std::vector<ExplorationEdge> edges;
    bool exhausted = true;
    std::size_t visited_count = 0;
    std::size_t depth_reached = 0;
    std::optional<TruncationReason> truncation_reason;

    [[nodiscard]] std::vector<Configuration> halting_configurations() const;
};

/// A validated, pre-compiled system. All member functions are const and safe
/// to call concurrently.
class Engine {
public:
    /// Throws PreconditionError if the system does not validate.
    explicit Engine(PSystem system);
    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    [[nodiscard]] const PSystem& system() const;

    [[nodiscard]] bool can_trigger(const Configuration& c, RuleRef rule) const;
    [[nodiscard]] bool is_halting(const Configuration& c) const;
    /// All single-application distributions, duplicate-free and sorted.
    /// Throws PreconditionError if the rule cannot be triggered.
    [[nodiscard]] std::vector<Distribution> enumerate_applications(const Configuration& c, RuleRef rule) const;
    /// Throws PreconditionError if the instance is infeasible in c.
    [[nodiscard]] Configuration apply_one(const Configuration& c, const RuleInstance& instance) const;
    /// Simultaneous application of a whole choice (withdrawals, then deposits).
    [[nodiscard]] Configuration apply(const Configuration& c, const TransitionChoice& choice) const;

    /// Aggregate level-sum feasibility of a multiset of rules.
    [[nodiscard]] bool satisfies_condition_a(const Configuration& c, std::span<const RuleRef> family) const;
    /// Throws PreconditionError if the family itself is infeasible.
    [[nodiscard]] bool is_maximal(const Configuration& c, std::span<const RuleRef> family) const;
    /// Every maximal feasible family as a multiplicity vector over rules(), in
    /// lexicographic order.
    [[nodiscard]] std::vector<std::vector<std::uint64_t>> maximal_families(const Configuration& c) const;
    [[nodiscard]] TransitionSet enumerate_transitions(const Configuration& c, const TransitionOptions& options = {}) const;

    /// All rules in (membrane, index) order; positions match multiplicity vectors.
    [[nodiscard]] const std::vector<RuleRef>& rules() const;

    [[nodiscard]] ExplorationResult explore(const ExploreOptions& options = {}) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Free-function forms; each validates and compiles the system on every call.
bool can_trigger(const PSystem& system, const Configuration& c, MembraneId m, std::size_t rule_index);
std::vector<Distribution> enumerate_applications(const PSystem& system, const Configuration& c, MembraneId m,
                                                 std::size_t rule_index);
Configuration apply_one(const PSystem& system, const Configuration& c, const RuleInstance& instance);
TransitionSet enumerate_transitions(const PSystem& system, const Configuration& c, const TransitionOptions& options = {});
bool is_maximal(const PSystem& system, const Configuration& c, std::span<const RuleRef> family);
ExplorationResult explore(const PSystem& system, const ExploreOptions& options = {});

struct InvariantViolation {
    std::string message;
};

/// Per-(v,t) conservation across a transition plus finiteness of every
/// membrane region. (v,t) pairs with an infinite env supply must stay
/// infinite there; all others must keep their total count.
std::vector<InvariantViolation> check_transition_invariants(const PSystem& system, const Configuration& before,
                                                            const Configuration& after);

} // namespace memfuzz
