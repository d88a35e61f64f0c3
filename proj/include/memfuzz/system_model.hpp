#pragma once

// Static description of crisp and fuzzy symport/antiport P-systems.

#include "memfuzz/fuzzy_core.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace memfuzz {

/// Membrane label. Labels are naturals ≥ 1 with the skin labelled 1; the
/// environment is the reserved value 0 so that it sorts first.
struct MembraneId {
    std::uint32_t value = 0;

    static constexpr MembraneId env() { return MembraneId{0}; }
    static constexpr MembraneId skin() { return MembraneId{1}; }
    [[nodiscard]] constexpr bool is_env() const { return value == 0; }
    [[nodiscard]] std::string to_string() const { return is_env() ? "env" : std::to_string(value); }

    friend auto operator<=>(const MembraneId&, const MembraneId&) = default;
};

/// Interned reactive names. Ids are positions in the sorted name list, so two
/// systems declaring the same names get the same ids.
class ReactiveTable {
public:
    ReactiveTable() = default;
    /// Throws PreconditionError on duplicate or empty names.
    explicit ReactiveTable(std::vector<std::string> names);

    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] const std::string& name(ReactiveId id) const;
    [[nodiscard]] std::optional<ReactiveId> find(std::string_view name) const;
    /// Throws PreconditionError on unknown names.
    [[nodiscard]] ReactiveId id(std::string_view name) const;
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] std::vector<ReactiveId> ids() const;

    friend bool operator==(const ReactiveTable&, const ReactiveTable&) = default;

private:
    std::vector<std::string> names_;
};

/// The tree μ̄: every membrane points at its parent; the skin's parent is env.
class MembraneStructure {
public:
    void add(MembraneId membrane, MembraneId parent);

    /// M, ascending (env excluded).
    [[nodiscard]] std::vector<MembraneId> membranes() const;
    /// M̄ = env followed by M, ascending.
    [[nodiscard]] std::vector<MembraneId> regions() const;
    [[nodiscard]] bool contains(MembraneId m) const { return parent_.count(m) > 0; }
    /// ε(m). Throws PreconditionError for env or unknown labels.
    [[nodiscard]] MembraneId parent(MembraneId m) const;
    [[nodiscard]] std::vector<MembraneId> children(MembraneId m) const;
    [[nodiscard]] bool is_elementary(MembraneId m) const { return children(m).empty(); }
    [[nodiscard]] std::size_t size() const { return parent_.size(); }
    /// Empty when the parent map forms a tree rooted at env through membrane 1.
    [[nodiscard]] std::vector<std::string> problems() const;
    [[nodiscard]] const std::map<MembraneId, MembraneId>& parents() const { return parent_; }

    friend bool operator==(const MembraneStructure&, const MembraneStructure&) = default;

private:
    std::map<MembraneId, MembraneId> parent_;
};

/// A word of V* up to letter order: |w|_v for each letter with positive count.
struct RuleWord {
    std::map<ReactiveId, std::uint64_t> counts;

    RuleWord() = default;
    RuleWord(std::initializer_list<std::pair<const ReactiveId, std::uint64_t>> init);

    [[nodiscard]] std::uint64_t count(ReactiveId v) const;
    [[nodiscard]] bool empty() const { return counts.empty(); }
    [[nodiscard]] std::uint64_t length() const;

    friend auto operator<=>(const RuleWord&, const RuleWord&) = default;
};

enum class RuleKind { antiport, symport_in, symport_out };

/// ((a, in; b, out), τ_in, τ_out). Absent threshold entries mean grade 0.
struct Rule {
    RuleWord incoming;
    RuleWord outgoing;
    std::map<ReactiveId, Grade> tau_in;
    std::map<ReactiveId, Grade> tau_out;

    [[nodiscard]] Grade threshold_in(ReactiveId v) const;
    [[nodiscard]] Grade threshold_out(ReactiveId v) const;
    [[nodiscard]] RuleKind kind() const;

    friend auto operator<=>(const Rule&, const Rule&) = default;
};

/// The contents of every region of M̄.
class Configuration {
public:
    Configuration() = default;
    /// Creates an empty region for env and every membrane of the structure.
    explicit Configuration(const MembraneStructure& structure);

    [[nodiscard]] const FuzzyMultiset& region(MembraneId m) const;
    FuzzyMultiset& region(MembraneId m);
    [[nodiscard]] bool has_region(MembraneId m) const { return regions_.count(m) > 0; }
    [[nodiscard]] const std::map<MembraneId, FuzzyMultiset>& regions() const { return regions_; }

    /// Entries sorted by (membrane, reactive, grade); ∞ is written "inf".
    /// Equal configurations, and only those, share a key.
    [[nodiscard]] std::string canonical_key() const;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;

private:
    std::map<MembraneId, FuzzyMultiset> regions_;
};

enum class ReactiveRole { alpha, hash };

/// A fuzzy symport/antiport P-system. Rule lists are kept in canonical
/// (sorted) order; rule indices refer to that order.
struct PSystem {
    ReactiveTable reactives;
    std::set<ReactiveId> outputs;
    MembraneStructure structure;
    MembraneId output_membrane{1};
    GradeSet grades;
    Configuration initial;
    std::map<MembraneId, std::vector<Rule>> rules;
    std::map<ReactiveId, ReactiveRole> roles;

    [[nodiscard]] const std::vector<Rule>& rules_of(MembraneId m) const;
    /// Sorts each membrane's rule list.
    void canonicalize();

    friend bool operator==(const PSystem&, const PSystem&) = default;
};

struct CrispRule {
    RuleWord incoming;
    RuleWord outgoing;

    friend auto operator<=>(const CrispRule&, const CrispRule&) = default;
};

using CrispMultiset = std::map<ReactiveId, ExtNat>;

/// A crisp P-system: a fuzzy system whose every grade annotation is 1.
struct CrispPSystem {
    ReactiveTable reactives;
    std::set<ReactiveId> outputs;
    MembraneStructure structure;
    MembraneId output_membrane{1};
    std::map<MembraneId, CrispMultiset> initial;
    std::map<MembraneId, std::vector<CrispRule>> rules;
    std::map<ReactiveId, ReactiveRole> roles;

    [[nodiscard]] const std::vector<CrispRule>& rules_of(MembraneId m) const;
    [[nodiscard]] ExtNat initial_count(MembraneId m, ReactiveId v) const;
    void canonicalize();

    friend bool operator==(const CrispPSystem&, const CrispPSystem&) = default;
};

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] bool has(std::string_view code) const;
};

// Violation codes.
namespace violation {
inline constexpr std::string_view structure = "structure";
inline constexpr std::string_view output_membrane = "output-membrane";
inline constexpr std::string_view unknown_reactive = "unknown-reactive";
inline constexpr std::string_view grade_membership = "grade-membership";
inline constexpr std::string_view finite_membranes = "finite-membranes";
inline constexpr std::string_view env_homogeneity = "env-homogeneity";
inline constexpr std::string_view empty_rule = "empty-rule";
inline constexpr std::string_view threshold_positivity = "threshold-positivity";
inline constexpr std::string_view infinite_pull = "infinite-pull";
inline constexpr std::string_view misplaced_rules = "misplaced-rules";
} // namespace violation

ValidationReport validate(const PSystem& system);
ValidationReport validate(const CrispPSystem& system);

/// Reads a fuzzy system over I = {0,1} as a crisp one. Throws
/// PreconditionError if the grade set is not {0,1} or the system is invalid.
CrispPSystem to_crisp(const PSystem& system);

struct ShapeReport {
    bool conforms = false;
    std::vector<std::string> failures;
    std::optional<ReactiveId> alpha;
    std::optional<ReactiveId> hash;
    /// "alpha is the only reactive entering the output membrane in halting
    /// computations" is semantic and never decided here.
    bool alpha_sole_entrant_assumed = true;
};

/// Syntactic check of the universal two-membrane normal form: two membranes
/// with an elementary output membrane, symport rules only, every reactive an
/// output reactive, output-membrane rules exactly (α,in), (#,in), (#,out),
/// and no initial α in membranes 1 and 2. Role annotations, when present,
/// must agree with the inferred α and #.
ShapeReport check_normal_form(const CrispPSystem& system);

/// Over-approximates the grades at which each reactive can occur inside a
/// membrane (env excluded). Grades never change, so this is the initial
/// membrane grades plus the env grades some skin rule can pull.
std::map<ReactiveId, std::set<Grade>> reachable_reactive_grades(const PSystem& system);

} // namespace memfuzz
