#include "memfuzz/error.hpp"
#include "memfuzz/outputs.hpp"

namespace memfuzz {

std::uint64_t OutputHistogram::at(const Grade& t) const {
    auto it = counts.find(t);
    return it == counts.end() ? 0 : it->second;
}

OutputHistogram histogram(const PSystem& system, const Configuration& halting) {
    OutputHistogram h;
    for (const Grade& t : system.grades.positive()) h.counts[t] = 0;
    for (const auto& [key, n] : halting.region(system.output_membrane).entries()) {
        if (system.outputs.count(key.first) == 0) continue;
        if (n.is_infinite()) {
            throw InvariantError("the output membrane holds infinitely many copies of " +
                                 system.reactives.name(key.first));
        }
        h.counts[key.second] += n.finite();
    }
    return h;
}

FuzzySubsetOfNat output_fuzzy_set(const OutputHistogram& h, const GradeSet& grades) {
    FuzzySubsetOfNat out;
    // Ascending grades, so the last assignment for each n is the maximum.
    for (const Grade& t : grades.positive()) out.assign(h.at(t), t);
    return out;
}

GenReport summarize(const PSystem& system, ExplorationResult exploration) {
    GenReport report;
    report.exhausted = exploration.exhausted;
    for (std::size_t id : exploration.halting) {
        OutputHistogram h = histogram(system, exploration.configurations[id]);
        report.gen = join(report.gen, output_fuzzy_set(h, system.grades));
        report.histograms.emplace_back(id, std::move(h));
    }
    report.exploration = std::move(exploration);
    return report;
}

GenReport gen(const Engine& engine, const ExploreOptions& options) {
    return summarize(engine.system(), engine.explore(options));
}

GenReport gen(const PSystem& system, const ExploreOptions& options) { return gen(Engine(system), options); }

bool gen_level_query(const GenReport& report, std::uint64_t n, const Grade& t0, const GradeSet& grades) {
    if (!grades.contains_positive(t0)) {
        throw PreconditionError("gen_level_query: " + t0.to_string() + " is not in I+");
    }
    for (const auto& [id, h] : report.histograms) {
        for (const auto& [t, count] : h.counts) {
            if (t >= t0 && count == n) return true;
        }
    }
    return false;
}

} // namespace memfuzz
