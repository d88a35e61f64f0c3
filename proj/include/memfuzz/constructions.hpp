#pragma once

// System-to-system constructions: crisp embedding, grade slicing and the
// three-membrane composition of a family of crisp generators.

#include "memfuzz/error.hpp"
#include "memfuzz/system_model.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace memfuzz {

/// Lifts a crisp system to the grade set I: membrane contents and thresholds
/// sit at grade 1, and env supplies are replicated over all of I⁺.
/// Throws PreconditionError on an invalid crisp system.
PSystem embed(const CrispPSystem& crisp, const GradeSet& grades = GradeSet::crisp());

/// One crisp system per output grade t, all over the alphabet V × I⁺ (reactive
/// "v@t" stands for v at grade t). They differ only in their output reactives.
struct SliceFamily {
    std::map<Grade, CrispPSystem> slices;
};

struct SliceOptions {
    /// Upper bound on crisp rules produced from one fuzzy rule.
    std::size_t max_expansions_per_rule = 100000;
};

class ExpansionLimitError : public Error {
public:
    ExpansionLimitError(MembraneId membrane, std::size_t rule_index, std::size_t limit);
    MembraneId membrane;
    std::size_t rule_index;
};

/// Name of reactive v at grade t in sliced and composed systems.
std::string graded_name(std::string_view reactive, const Grade& t);

SliceFamily slice(const PSystem& system, const SliceOptions& options = {});

/// Reads a fuzzy configuration as a crisp one over V × I⁺ using the slice
/// alphabet `sliced`.
std::map<MembraneId, CrispMultiset> flatten_configuration(const PSystem& system, const Configuration& c,
                                                          const ReactiveTable& sliced);

struct Composition {
    PSystem system;
    /// α^(t) and #^(t) of every input slice, by grade.
    std::map<Grade, ReactiveId> alpha;
    std::map<Grade, ReactiveId> hash;
};

/// Builds the three-membrane fuzzy system from one two-membrane crisp
/// generator per t ∈ I⁺: reactives of slice t are renamed "name@t", α^(t)
/// gets threshold t, everything else threshold 1, and membrane 3 buries α^(t)
/// copies of grade ≥ s(t). Every input must pass check_normal_form and
/// carry role=alpha and role=hash annotations.
Composition compose_detailed(const std::map<Grade, CrispPSystem>& slices, const GradeSet& grades);
PSystem compose(const std::map<Grade, CrispPSystem>& slices, const GradeSet& grades);

/// Copies of some α^(t) with grade above t left in the output membrane.
/// Empty for every halting configuration of a composed system.
std::vector<std::string> overgraded_markers(const Composition& composition, const Configuration& c);

} // namespace memfuzz
