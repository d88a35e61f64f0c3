#pragma once

// Independent oracles used by the unit and acceptance tests. Nothing here
// calls into the engine.

#include "memfuzz/engine.hpp"
#include "memfuzz/textio.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <vector>

namespace memfuzz::testing {

// Crisp reference semantics -------------------------------------------------

using CrispConfig = std::map<MembraneId, std::map<ReactiveId, ExtNat>>;

struct CrispGen {
    std::set<std::uint64_t> gen;
    bool exhausted = true;
    std::size_t visited = 0;
};

/// Plain maximal-parallel BFS over a crisp system.
CrispGen reference_crisp_gen(const CrispPSystem& system, std::size_t max_configs = 10000);

// Brute-force fuzzy oracle ---------------------------------------------------

using Multiplicities = std::vector<std::uint64_t>;

/// Rules in (membrane, index) order.
std::vector<RuleRef> rule_order(const PSystem& system);

/// Largest multiplicity any single rule can have in c.
std::uint64_t multiplicity_cap(const PSystem& system, const Configuration& c);

/// Every vector in [0, cap]^|rules|.
std::vector<Multiplicities> all_vectors(std::size_t rules, std::uint64_t cap);

/// The aggregate suffix-sum inequality, written out directly.
bool hall_inequalities(const PSystem& system, const Configuration& c, const Multiplicities& m);

/// Searches explicit grade allocations for every demanded copy.
bool allocation_exists(const PSystem& system, const Configuration& c, const Multiplicities& m);

/// Maximal vectors among those with an allocation, sorted.
std::vector<Multiplicities> brute_maximal_families(const PSystem& system, const Configuration& c);

/// Every transition choice (sorted instances) for every maximal family.
std::vector<TransitionChoice> brute_choices(const PSystem& system, const Configuration& c);

Configuration brute_apply(const PSystem& system, const Configuration& c, const TransitionChoice& choice);

/// Compares the engine with the brute-force oracle on one configuration.
/// Returns an empty string on agreement, otherwise what differed.
std::string compare_with_oracle(const PSystem& system, const Configuration& c);

// Random systems -------------------------------------------------------------

/// A valid system with at most 3 membranes, at most 4 rules, at most 4 copies
/// per region and |I⁺| at most 3.
PSystem random_system(std::mt19937_64& rng);

// Corpus ---------------------------------------------------------------------

std::filesystem::path corpus_dir();
std::vector<std::filesystem::path> corpus_files(const std::string& subdir);
SystemDocument load_corpus(const std::string& relative);

} // namespace memfuzz::testing
