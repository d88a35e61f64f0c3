#pragma once

// Reading results off halting configurations: H_C, Out and Gen.

#include "memfuzz/engine.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace memfuzz {

/// Copies of output reactives in the output membrane, per grade of I⁺.
/// Every grade of I⁺ is present, with count 0 where nothing sits.
struct OutputHistogram {
    std::map<Grade, std::uint64_t> counts;

    [[nodiscard]] std::uint64_t at(const Grade& t) const;
    friend bool operator==(const OutputHistogram&, const OutputHistogram&) = default;
};

struct GenReport {
    FuzzySubsetOfNat gen;
    /// False when exploration hit a bound; gen is then a pointwise lower bound.
    bool exhausted = true;
    /// (halting configuration id, histogram), ascending by id.
    std::vector<std::pair<std::size_t, OutputHistogram>> histograms;
    ExplorationResult exploration;
};

/// Throws InvariantError if the output membrane holds an infinite count.
OutputHistogram histogram(const PSystem& system, const Configuration& halting);

/// Out(n) = max{t ∈ I⁺ | h(t) = n}, with max ∅ = 0. n = 0 takes part.
FuzzySubsetOfNat output_fuzzy_set(const OutputHistogram& h, const GradeSet& grades);

/// Explores and joins Out over every collected halting configuration.
GenReport gen(const PSystem& system, const ExploreOptions& options = {});
GenReport gen(const Engine& engine, const ExploreOptions& options = {});

/// Summarizes an existing exploration.
GenReport summarize(const PSystem& system, ExplorationResult exploration);

/// Whether some collected histogram has h(t) = n for a t ≥ t0. Throws
/// PreconditionError unless t0 ∈ I⁺ of `grades`.
bool gen_level_query(const GenReport& report, std::uint64_t n, const Grade& t0, const GradeSet& grades);

} // namespace memfuzz
