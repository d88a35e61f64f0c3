#include "memfuzz/constructions.hpp"

#include <algorithm>
#include <set>

namespace memfuzz {

ExpansionLimitError::ExpansionLimitError(MembraneId m, std::size_t index, std::size_t limit)
    : Error("rule " + std::to_string(index) + " of membrane " + m.to_string() + " expands to more than " +
            std::to_string(limit) + " crisp rules"),
      membrane(m),
      rule_index(index) {}

std::string graded_name(std::string_view reactive, const Grade& t) {
    return std::string(reactive) + "@" + t.to_string();
}

namespace {

void require_valid(const ValidationReport& report, std::string_view what) {
    if (!report.ok()) {
        throw PreconditionError(std::string(what) + " is invalid: " + report.violations.front().message);
    }
}

} // namespace

// Embedding

PSystem embed(const CrispPSystem& crisp, const GradeSet& grades) {
    require_valid(validate(crisp), "crisp system");
    PSystem out;
    out.reactives = crisp.reactives;
    out.outputs = crisp.outputs;
    out.structure = crisp.structure;
    out.output_membrane = crisp.output_membrane;
    out.grades = grades;
    out.roles = crisp.roles;
    out.initial = Configuration(crisp.structure);
    for (const auto& [m, region] : crisp.initial) {
        for (const auto& [v, n] : region) {
            if (m.is_env()) {
                for (const Grade& t : grades.positive()) out.initial.region(m).set(v, t, n);
            } else {
                out.initial.region(m).set(v, Grade::one(), n);
            }
        }
    }
    for (const auto& [m, list] : crisp.rules) {
        auto& target = out.rules[m];
        for (const CrispRule& r : list) {
            Rule rule{r.incoming, r.outgoing, {}, {}};
            for (const auto& [v, n] : r.incoming.counts) rule.tau_in[v] = Grade::one();
            for (const auto& [v, n] : r.outgoing.counts) rule.tau_out[v] = Grade::one();
            target.push_back(std::move(rule));
        }
    }
    out.canonicalize();
    return out;
}

// Slicing

namespace {

using GradedWord = std::map<std::pair<ReactiveId, std::size_t>, std::uint64_t>;

// Every way of spreading `count` copies over the allowed grade indices.
void spread(std::uint64_t count, const std::vector<std::size_t>& allowed, std::size_t from,
            std::vector<std::uint64_t>& current, std::vector<std::vector<std::uint64_t>>& out) {
    if (from + 1 == allowed.size()) {
        current[from] = count;
        out.push_back(current);
        current[from] = 0;
        return;
    }
    for (std::uint64_t take = 0; take <= count; ++take) {
        current[from] = take;
        spread(count - take, allowed, from + 1, current, out);
    }
    current[from] = 0;
}

// All graded versions of a word whose letters respect the thresholds.
std::vector<GradedWord> expand_word(const RuleWord& word, const std::map<ReactiveId, Grade>& tau,
                                    const GradeSet& grades) {
    std::vector<GradedWord> words{GradedWord{}};
    for (const auto& [v, n] : word.counts) {
        const Grade threshold = tau.count(v) ? tau.at(v) : Grade::zero();
        std::vector<std::size_t> allowed;
        for (std::size_t g = 0; g < grades.positive().size(); ++g) {
            if (grades.positive()[g] >= threshold) allowed.push_back(g);
        }
        std::vector<std::vector<std::uint64_t>> spreads;
        std::vector<std::uint64_t> current(allowed.size(), 0);
        if (!allowed.empty()) spread(n, allowed, 0, current, spreads);

        std::vector<GradedWord> next;
        for (const GradedWord& w : words) {
            for (const auto& s : spreads) {
                GradedWord extended = w;
                for (std::size_t k = 0; k < allowed.size(); ++k) {
                    if (s[k] > 0) extended[{v, allowed[k]}] = s[k];
                }
                next.push_back(std::move(extended));
            }
        }
        words = std::move(next);
    }
    return words;
}

} // namespace

SliceFamily slice(const PSystem& system, const SliceOptions& options) {
    require_valid(validate(system), "fuzzy system");
    const auto positive = system.grades.positive();

    std::vector<std::string> names;
    for (ReactiveId v : system.reactives.ids()) {
        for (const Grade& t : positive) names.push_back(graded_name(system.reactives.name(v), t));
    }
    ReactiveTable table(std::move(names));
    auto sliced_id = [&](ReactiveId v, std::size_t g) {
        return table.id(graded_name(system.reactives.name(v), positive[g]));
    };
    auto to_word = [&](const GradedWord& w) {
        RuleWord out;
        for (const auto& [key, n] : w) out.counts[sliced_id(key.first, key.second)] = n;
        return out;
    };

    CrispPSystem base;
    base.reactives = table;
    base.structure = system.structure;
    base.output_membrane = system.output_membrane;
    for (const auto& [m, f] : system.initial.regions()) {
        auto& region = base.initial[m];
        for (const auto& [key, n] : f.entries()) {
            region[sliced_id(key.first, *system.grades.positive_index(key.second))] = n;
        }
    }
    for (const auto& [m, list] : system.rules) {
        std::set<CrispRule> expanded;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Rule& rule = list[i];
            const auto ins = expand_word(rule.incoming, rule.tau_in, system.grades);
            const auto outs = expand_word(rule.outgoing, rule.tau_out, system.grades);
            if (ins.size() * outs.size() > options.max_expansions_per_rule) {
                throw ExpansionLimitError(m, i, options.max_expansions_per_rule);
            }
            for (const auto& a : ins) {
                for (const auto& b : outs) expanded.insert(CrispRule{to_word(a), to_word(b)});
            }
        }
        base.rules[m].assign(expanded.begin(), expanded.end());
    }

    SliceFamily family;
    for (std::size_t g = 0; g < positive.size(); ++g) {
        CrispPSystem s = base;
        for (ReactiveId v : system.outputs) s.outputs.insert(sliced_id(v, g));
        family.slices.emplace(positive[g], std::move(s));
    }
    return family;
}

std::map<MembraneId, CrispMultiset> flatten_configuration(const PSystem& system, const Configuration& c,
                                                          const ReactiveTable& sliced) {
    std::map<MembraneId, CrispMultiset> out;
    for (const auto& [m, f] : c.regions()) {
        auto& region = out[m];
        for (const auto& [key, n] : f.entries()) {
            region[sliced.id(graded_name(system.reactives.name(key.first), key.second))] = n;
        }
    }
    return out;
}

// Composition

namespace {

ReactiveId role_of(const CrispPSystem& s, ReactiveRole role, const Grade& t) {
    std::optional<ReactiveId> found;
    for (const auto& [v, r] : s.roles) {
        if (r != role) continue;
        if (found) {
            throw PreconditionError("slice " + t.to_string() + " annotates more than one reactive with role=" +
                                    (role == ReactiveRole::alpha ? "alpha" : "hash"));
        }
        found = v;
    }
    if (!found) {
        throw PreconditionError("slice " + t.to_string() + " lacks a role=" +
                                std::string(role == ReactiveRole::alpha ? "alpha" : "hash") + " annotation");
    }
    return *found;
}

} // namespace

Composition compose_detailed(const std::map<Grade, CrispPSystem>& slices, const GradeSet& grades) {
    const auto positive = grades.positive();
    for (const Grade& t : positive) {
        if (!slices.count(t)) throw PreconditionError("no slice given for grade " + t.to_string());
    }
    for (const auto& [t, s] : slices) {
        if (!grades.contains_positive(t)) {
            throw PreconditionError("slice grade " + t.to_string() + " is not in I+");
        }
        require_valid(validate(s), "slice " + t.to_string());
        ShapeReport shape = check_normal_form(s);
        if (!shape.conforms) {
            throw PreconditionError("slice " + t.to_string() + " is not in two-membrane normal form: " +
                                    shape.failures.front());
        }
        if (role_of(s, ReactiveRole::alpha, t) != *shape.alpha || role_of(s, ReactiveRole::hash, t) != *shape.hash) {
            throw PreconditionError("slice " + t.to_string() + ": role annotations disagree with the rule shape");
        }
    }

    // V = disjoint union of the tagged slice alphabets.
    std::vector<std::string> names;
    for (const auto& [t, s] : slices) {
        for (const std::string& n : s.reactives.names()) names.push_back(graded_name(n, t));
    }
    {
        std::vector<std::string> sorted = names;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw PreconditionError("slice alphabets collide after tagging");
        }
    }

    Composition out;
    PSystem& sys = out.system;
    sys.reactives = ReactiveTable(std::move(names));
    for (ReactiveId v : sys.reactives.ids()) sys.outputs.insert(v);
    const MembraneId skin = MembraneId::skin();
    const MembraneId output{2};
    const MembraneId burial{3};
    sys.structure.add(skin, MembraneId::env());
    sys.structure.add(output, skin);
    sys.structure.add(burial, output);
    sys.output_membrane = output;
    sys.grades = grades;
    sys.initial = Configuration(sys.structure);

    for (const auto& [t, s] : slices) {
        auto tagged = [&](ReactiveId v) { return sys.reactives.id(graded_name(s.reactives.name(v), t)); };
        const ReactiveId alpha = tagged(role_of(s, ReactiveRole::alpha, t));
        const ReactiveId hash = tagged(role_of(s, ReactiveRole::hash, t));
        out.alpha[t] = alpha;
        out.hash[t] = hash;
        sys.roles[alpha] = ReactiveRole::alpha;
        sys.roles[hash] = ReactiveRole::hash;

        // Slice membranes map onto 1 (skin) and 2 (its output membrane).
        auto target = [&](MembraneId m) {
            if (m.is_env()) return MembraneId::env();
            return m == s.output_membrane ? output : skin;
        };
        for (const auto& [m, region] : s.initial) {
            for (const auto& [v, n] : region) {
                if (m.is_env()) {
                    for (const Grade& g : positive) sys.initial.region(m).set(tagged(v), g, n);
                } else {
                    sys.initial.region(target(m)).add(tagged(v), Grade::one(), n);
                }
            }
        }
        auto threshold = [&](ReactiveId v) { return v == alpha ? t : Grade::one(); };
        for (const auto& [m, list] : s.rules) {
            for (const CrispRule& r : list) {
                Rule rule;
                for (const auto& [v, n] : r.incoming.counts) {
                    rule.incoming.counts[tagged(v)] = n;
                    rule.tau_in[tagged(v)] = threshold(tagged(v));
                }
                for (const auto& [v, n] : r.outgoing.counts) {
                    rule.outgoing.counts[tagged(v)] = n;
                    rule.tau_out[tagged(v)] = threshold(tagged(v));
                }
                sys.rules[target(m)].push_back(std::move(rule));
            }
        }
        if (!t.is_one()) {
            Rule bury;
            bury.incoming.counts[alpha] = 1;
            bury.tau_in[alpha] = grades.successor(t);
            sys.rules[burial].push_back(std::move(bury));
        }
    }
    sys.canonicalize();
    return out;
}

PSystem compose(const std::map<Grade, CrispPSystem>& slices, const GradeSet& grades) {
    return compose_detailed(slices, grades).system;
}

std::vector<std::string> overgraded_markers(const Composition& composition, const Configuration& c) {
    std::vector<std::string> out;
    const PSystem& sys = composition.system;
    for (const auto& [t, alpha] : composition.alpha) {
        for (const auto& [key, n] : c.region(sys.output_membrane).entries()) {
            if (key.first == alpha && key.second > t) {
                out.push_back(n.to_string() + " copies of " + sys.reactives.name(alpha) + " at grade " +
                              key.second.to_string());
            }
        }
    }
    return out;
}

} // namespace memfuzz
