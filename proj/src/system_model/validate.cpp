#include "memfuzz/error.hpp"
#include "memfuzz/system_model.hpp"

#include <algorithm>

namespace memfuzz {

namespace {

class Reporter {
public:
    explicit Reporter(ValidationReport& report) : report_(report) {}
    void operator()(std::string_view code, std::string message) {
        report_.violations.push_back(Violation{std::string(code), std::move(message)});
    }

private:
    ValidationReport& report_;
};

std::string rule_label(MembraneId m, std::size_t index) {
    return "rule " + std::to_string(index) + " of membrane " + m.to_string();
}

bool known(const ReactiveTable& table, ReactiveId v) { return v.value < table.size(); }

void check_rule(const PSystem& sys, MembraneId m, std::size_t index, const Rule& rule, Reporter& report) {
    const std::string label = rule_label(m, index);
    if (rule.incoming.empty() && rule.outgoing.empty()) report(violation::empty_rule, label + " moves nothing");

    auto check_side = [&](const RuleWord& word, const std::map<ReactiveId, Grade>& tau, std::string_view side) {
        for (const auto& [v, n] : word.counts) {
            if (!known(sys.reactives, v)) {
                report(violation::unknown_reactive, label + " uses an unknown reactive id");
                continue;
            }
            auto it = tau.find(v);
            if (it == tau.end() || it->second.is_zero()) {
                report(violation::threshold_positivity, label + ": tau_" + std::string(side) + "(" +
                                                             sys.reactives.name(v) + ") must be positive");
            }
        }
        for (const auto& [v, g] : tau) {
            if (!sys.grades.contains(g)) {
                report(violation::grade_membership, label + ": threshold " + g.to_string() + " is not in I");
            }
            if (!g.is_zero() && word.count(v) == 0) {
                const std::string name = known(sys.reactives, v) ? sys.reactives.name(v) : "?";
                report(violation::threshold_positivity, label + ": tau_" + std::string(side) + "(" + name +
                                                             ") is positive but the reactive is not moved");
            }
        }
    };
    check_side(rule.incoming, rule.tau_in, "in");
    check_side(rule.outgoing, rule.tau_out, "out");

    if (m == MembraneId::skin() && rule.outgoing.empty() && !rule.incoming.empty()) {
        const FuzzyMultiset& env = sys.initial.has_region(MembraneId::env())
                                       ? sys.initial.region(MembraneId::env())
                                       : FuzzyMultiset{};
        const bool unbounded = std::all_of(rule.incoming.counts.begin(), rule.incoming.counts.end(), [&](const auto& e) {
            const Grade tau = rule.threshold_in(e.first);
            return std::any_of(sys.grades.positive().begin(), sys.grades.positive().end(), [&](const Grade& t) {
                return t >= tau && env.count(e.first, t).is_infinite();
            });
        });
        if (unbounded) {
            report(violation::infinite_pull,
                   label + " pulls only reactives with unbounded env supply and could fire infinitely often");
        }
    }
}

} // namespace

ValidationReport validate(const PSystem& sys) {
    ValidationReport report;
    Reporter add(report);

    for (auto& problem : sys.structure.problems()) add(violation::structure, std::move(problem));
    if (sys.output_membrane.is_env() || !sys.structure.contains(sys.output_membrane)) {
        add(violation::output_membrane, "output membrane " + sys.output_membrane.to_string() + " is not in M");
    }
    for (ReactiveId v : sys.outputs) {
        if (!known(sys.reactives, v)) add(violation::unknown_reactive, "output reactive id out of range");
    }
    for (const auto& [v, role] : sys.roles) {
        if (!known(sys.reactives, v)) add(violation::unknown_reactive, "role annotation on unknown reactive id");
    }

    // Initial configuration.
    for (MembraneId m : sys.structure.regions()) {
        if (!sys.initial.has_region(m)) {
            add(violation::structure, "initial configuration lacks region " + m.to_string());
        }
    }
    for (const auto& [m, f] : sys.initial.regions()) {
        if (!m.is_env() && !sys.structure.contains(m)) {
            add(violation::structure, "initial configuration names unknown region " + m.to_string());
        }
        for (const auto& [key, n] : f.entries()) {
            const auto& [v, t] = key;
            if (!known(sys.reactives, v)) {
                add(violation::unknown_reactive, "initial content of region " + m.to_string() + " uses an unknown id");
                continue;
            }
            if (!sys.grades.contains_positive(t)) {
                add(violation::grade_membership, "initial content " + sys.reactives.name(v) + "@" + t.to_string() +
                                                     " in region " + m.to_string() + " uses a grade outside I+");
            }
            if (!m.is_env() && n.is_infinite()) {
                add(violation::finite_membranes,
                    "membrane " + m.to_string() + " holds infinitely many copies of " + sys.reactives.name(v));
            }
        }
    }
    if (sys.initial.has_region(MembraneId::env())) {
        const FuzzyMultiset& env = sys.initial.region(MembraneId::env());
        for (ReactiveId v : sys.reactives.ids()) {
            std::size_t infinite = 0;
            bool finite_positive = false;
            for (const Grade& t : sys.grades.positive()) {
                const ExtNat n = env.count(v, t);
                if (n.is_infinite()) {
                    ++infinite;
                } else if (!n.is_zero()) {
                    finite_positive = true;
                }
            }
            if (finite_positive || (infinite != 0 && infinite != sys.grades.positive().size())) {
                add(violation::env_homogeneity, "env supply of " + sys.reactives.name(v) +
                                                    " must be 0 at every grade of I+ or inf at every grade of I+");
            }
        }
    }

    for (const auto& [m, list] : sys.rules) {
        if (list.empty()) continue;
        if (m.is_env() || !sys.structure.contains(m)) {
            add(violation::misplaced_rules, "rules attached to " + m.to_string() + ", which is not a membrane");
            continue;
        }
        for (std::size_t i = 0; i < list.size(); ++i) check_rule(sys, m, i, list[i], add);
    }
    return report;
}

namespace {

// The crisp system read at grade 1 over I = {0,1}.
PSystem grade_one_view(const CrispPSystem& crisp) {
    PSystem out;
    out.reactives = crisp.reactives;
    out.outputs = crisp.outputs;
    out.structure = crisp.structure;
    out.output_membrane = crisp.output_membrane;
    out.roles = crisp.roles;
    out.initial = Configuration(crisp.structure);
    for (const auto& [m, region] : crisp.initial) {
        for (const auto& [v, n] : region) out.initial.region(m).set(v, Grade::one(), n);
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
    return out;
}

} // namespace

ValidationReport validate(const CrispPSystem& crisp) {
    ValidationReport report = validate(grade_one_view(crisp));
    for (const auto& [m, region] : crisp.initial) {
        if (!m.is_env() && !crisp.structure.contains(m)) {
            report.violations.push_back(
                {std::string(violation::structure), "initial content names unknown region " + m.to_string()});
        }
    }
    return report;
}

CrispPSystem to_crisp(const PSystem& sys) {
    if (sys.grades != GradeSet::crisp()) {
        throw PreconditionError("only systems over the grade set {0,1} are crisp; this one uses {" +
                                sys.grades.to_string() + "}");
    }
    ValidationReport report = validate(sys);
    if (!report.ok()) throw PreconditionError("invalid system: " + report.violations.front().message);

    CrispPSystem out;
    out.reactives = sys.reactives;
    out.outputs = sys.outputs;
    out.structure = sys.structure;
    out.output_membrane = sys.output_membrane;
    out.roles = sys.roles;
    for (const auto& [m, f] : sys.initial.regions()) {
        auto& region = out.initial[m];
        for (const auto& [key, n] : f.entries()) region[key.first] = n;
    }
    for (const auto& [m, list] : sys.rules) {
        auto& target = out.rules[m];
        for (const Rule& r : list) target.push_back(CrispRule{r.incoming, r.outgoing});
    }
    out.canonicalize();
    return out;
}

ShapeReport check_normal_form(const CrispPSystem& sys) {
    ShapeReport report;
    auto fail = [&](std::string msg) { report.failures.push_back(std::move(msg)); };

    const auto membranes = sys.structure.membranes();
    MembraneId inner{};
    if (membranes.size() != 2 || !sys.structure.contains(MembraneId::skin())) {
        fail("two-membranes: the structure must have exactly two membranes, skin 1 and the output membrane");
    } else {
        inner = membranes[0] == MembraneId::skin() ? membranes[1] : membranes[0];
        if (sys.structure.parent(inner) != MembraneId::skin()) {
            fail("two-membranes: membrane " + inner.to_string() + " must sit inside the skin");
        }
        if (sys.output_membrane != inner) {
            fail("two-membranes: the output membrane must be the elementary membrane " + inner.to_string());
        }
    }

    for (const auto& [m, list] : sys.rules) {
        for (const CrispRule& r : list) {
            if (!r.incoming.empty() && !r.outgoing.empty()) {
                fail("symport-only: membrane " + m.to_string() + " has an antiport rule");
                break;
            }
        }
    }

    if (sys.outputs.size() != sys.reactives.size()) {
        fail("all-outputs: every reactive must be an output reactive");
    }

    // Output membrane rules: exactly (α,in), (#,in), (#,out) on single letters.
    std::optional<ReactiveId> alpha;
    std::optional<ReactiveId> hash;
    const auto& out_rules = sys.rules_of(sys.output_membrane);
    std::set<ReactiveId> ins;
    std::set<ReactiveId> outs;
    bool singletons = out_rules.size() == 3;
    for (const CrispRule& r : out_rules) {
        const RuleWord& word = r.incoming.empty() ? r.outgoing : r.incoming;
        if (!(r.incoming.empty() != r.outgoing.empty()) || word.counts.size() != 1 || word.length() != 1) {
            singletons = false;
            break;
        }
        (r.incoming.empty() ? outs : ins).insert(word.counts.begin()->first);
    }
    if (singletons && ins.size() == 2 && outs.size() == 1 && ins.count(*outs.begin()) == 1) {
        hash = *outs.begin();
        for (ReactiveId v : ins) {
            if (v != *hash) alpha = v;
        }
    } else {
        fail("alpha-hash-rules: the output membrane's rules must be exactly (alpha,in), (#,in) and (#,out)");
    }
    for (const auto& [v, role] : sys.roles) {
        auto& inferred = role == ReactiveRole::alpha ? alpha : hash;
        const char* which = role == ReactiveRole::alpha ? "alpha" : "hash";
        if (inferred && *inferred != v) {
            fail(std::string("alpha-hash-rules: the reactive annotated role=") + which +
                 " does not play that role in the output membrane's rules");
        }
        if (!inferred) inferred = v;
    }
    report.alpha = alpha;
    report.hash = hash;

    if (alpha) {
        const bool in_skin = !sys.initial_count(MembraneId::skin(), *alpha).is_zero();
        const bool in_output =
            !sys.output_membrane.is_env() && !sys.initial_count(sys.output_membrane, *alpha).is_zero();
        if (in_skin || in_output) fail("no-initial-alpha: membranes 1 and 2 must start without alpha");
    }

    report.conforms = report.failures.empty();
    return report;
}

std::map<ReactiveId, std::set<Grade>> reachable_reactive_grades(const PSystem& sys) {
    std::map<ReactiveId, std::set<Grade>> out;
    for (ReactiveId v : sys.reactives.ids()) out[v];
    for (const auto& [m, f] : sys.initial.regions()) {
        if (m.is_env()) continue;
        for (const auto& [key, n] : f.entries()) out[key.first].insert(key.second);
    }
    if (!sys.initial.has_region(MembraneId::env())) return out;
    const FuzzyMultiset& env = sys.initial.region(MembraneId::env());
    for (const Rule& rule : sys.rules_of(MembraneId::skin())) {
        for (const auto& [v, n] : rule.incoming.counts) {
            const Grade tau = rule.threshold_in(v);
            for (const auto& [key, count] : env.entries()) {
                if (key.first == v && key.second >= tau) out[v].insert(key.second);
            }
        }
    }
    return out;
}

} // namespace memfuzz
