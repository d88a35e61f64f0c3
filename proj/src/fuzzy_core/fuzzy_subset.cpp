#include "memfuzz/error.hpp"
#include "memfuzz/fuzzy_core.hpp"

#include <algorithm>

namespace memfuzz {

FuzzySubsetOfNat::FuzzySubsetOfNat(std::initializer_list<std::pair<const std::uint64_t, Grade>> init) {
    for (const auto& [n, g] : init) assign(n, g);
}

Grade FuzzySubsetOfNat::at(std::uint64_t n) const {
    auto it = values_.find(n);
    return it == values_.end() ? Grade::zero() : it->second;
}

void FuzzySubsetOfNat::assign(std::uint64_t n, const Grade& g) {
    if (g.is_zero()) {
        values_.erase(n);
    } else {
        values_[n] = g;
    }
}

LevelSet t_level(const FuzzySubsetOfNat& phi, const Grade& t) {
    LevelSet out;
    if (t.is_zero()) {
        out.universal = true;
        return out;
    }
    for (const auto& [n, g] : phi.support()) {
        if (g >= t) out.members.insert(n);
    }
    return out;
}

bool levels_equal(const FuzzySubsetOfNat& phi, const FuzzySubsetOfNat& psi, const GradeSet& grades) {
    for (const auto* f : {&phi, &psi}) {
        for (const auto& [n, g] : f->support()) {
            if (!grades.contains(g)) {
                throw PreconditionError("value " + g.to_string() + " at " + std::to_string(n) +
                                        " lies outside the grade set");
            }
        }
    }
    return std::all_of(grades.positive().begin(), grades.positive().end(),
                       [&](const Grade& t) { return t_level(phi, t) == t_level(psi, t); });
}

FuzzySubsetOfNat join(const FuzzySubsetOfNat& phi, const FuzzySubsetOfNat& psi) {
    FuzzySubsetOfNat out = phi;
    for (const auto& [n, g] : psi.support()) {
        if (g > out.at(n)) out.assign(n, g);
    }
    return out;
}

FuzzySubsetOfNat restrict_positive(const FuzzySubsetOfNat& phi) {
    FuzzySubsetOfNat out = phi;
    out.assign(0, Grade::zero());
    return out;
}

std::string to_string(const FuzzySubsetOfNat& phi) {
    std::string out = "{";
    for (const auto& [n, g] : phi.support()) {
        if (out.size() > 1) out += ", ";
        out += std::to_string(n) + ":" + g.to_string();
    }
    return out + "}";
}

} // namespace memfuzz
