#pragma once

// Dense region × reactive × grade tables used inside the engine.

#include "memfuzz/engine.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace memfuzz::detail {

class Table {
public:
    Table(std::size_t regions, std::size_t reactives, std::size_t grades)
        : reactives_(reactives), grades_(grades), cells_(regions * reactives * grades) {}

    [[nodiscard]] std::size_t index(std::size_t region, std::uint32_t v, std::size_t g) const {
        return (region * reactives_ + v) * grades_ + g;
    }
    [[nodiscard]] ExtNat at(std::size_t region, std::uint32_t v, std::size_t g) const { return cells_[index(region, v, g)]; }
    ExtNat& at(std::size_t region, std::uint32_t v, std::size_t g) { return cells_[index(region, v, g)]; }
    [[nodiscard]] std::size_t cells() const { return cells_.size(); }

    /// Entry g becomes Σ_{g' ≥ g} of the original entries.
    [[nodiscard]] Table suffix_sums() const {
        Table out = *this;
        for (std::size_t base = 0; base < cells_.size(); base += grades_) {
            for (std::size_t g = grades_ - 1; g-- > 0;) out.cells_[base + g] += out.cells_[base + g + 1];
        }
        return out;
    }

    [[nodiscard]] std::string key() const {
        std::string out;
        out.reserve(cells_.size() * 2);
        for (const ExtNat& n : cells_) {
            out += n.to_string();
            out += ',';
        }
        return out;
    }

private:
    std::size_t reactives_;
    std::size_t grades_;
    std::vector<ExtNat> cells_;
};

/// A word of one rule side drawing `count` copies of `reactive` from `region`
/// at grades of index ≥ min_grade.
struct Demand {
    std::size_t region = 0;
    std::uint32_t reactive = 0;
    std::uint64_t count = 0;
    std::size_t min_grade = 0;
};

struct CompiledRule {
    RuleRef ref;
    std::size_t own_region = 0;
    std::size_t parent_region = 0;
    std::vector<Demand> incoming;
    std::vector<Demand> outgoing;
};

/// Per-demand, per-grade amounts of one application (incoming demands first).
using AppVec = std::vector<std::uint64_t>;

} // namespace memfuzz::detail

namespace memfuzz {

struct Engine::Impl {
    explicit Impl(PSystem sys);

    PSystem system;
    std::vector<MembraneId> regions;
    std::map<MembraneId, std::size_t> region_index;
    std::size_t n_reactives = 0;
    std::size_t n_grades = 0;
    std::vector<detail::CompiledRule> rules;
    std::vector<RuleRef> refs;

    [[nodiscard]] std::size_t rule_position(RuleRef ref) const;
    [[nodiscard]] detail::Table to_table(const Configuration& c) const;
    [[nodiscard]] Configuration to_configuration(const detail::Table& table) const;

    [[nodiscard]] bool fits(const detail::Table& suffix, const std::vector<std::uint64_t>& demand,
                            const detail::CompiledRule& rule, std::uint64_t mult) const;
    void add_demand(std::vector<std::uint64_t>& demand, const detail::Table& shape, const detail::CompiledRule& rule,
                    std::int64_t mult) const;
    [[nodiscard]] bool condition_a(const detail::Table& suffix, const std::vector<std::uint64_t>& demand) const;
    [[nodiscard]] std::vector<std::vector<std::uint64_t>> maximal_families(const detail::Table& table) const;

    [[nodiscard]] std::vector<detail::AppVec> applications(const detail::Table& table,
                                                           const detail::CompiledRule& rule) const;
    [[nodiscard]] Distribution to_distribution(const detail::CompiledRule& rule, const detail::AppVec& app) const;
    [[nodiscard]] detail::AppVec from_distribution(const detail::CompiledRule& rule, const Distribution& dist) const;
    void move(detail::Table& table, const detail::CompiledRule& rule, const detail::AppVec& app, bool withdraw) const;
    [[nodiscard]] detail::Table apply(const detail::Table& table,
                                      const std::vector<std::pair<std::size_t, const detail::AppVec*>>& choice) const;
    [[nodiscard]] TransitionSet transitions(const detail::Table& table, const TransitionOptions& options) const;
};

} // namespace memfuzz
