#include "memfuzz/engine.hpp"
#include "memfuzz/error.hpp"

#include "dense.hpp"

#include <algorithm>
#include <map>

namespace memfuzz {

using detail::AppVec;
using detail::CompiledRule;
using detail::Demand;
using detail::Table;

std::vector<RuleRef> TransitionChoice::family() const {
    std::vector<RuleRef> out;
    out.reserve(instances.size());
    for (const RuleInstance& i : instances) out.push_back(i.rule());
    std::sort(out.begin(), out.end());
    return out;
}

std::string to_string(TruncationReason reason) {
    switch (reason) {
    case TruncationReason::max_depth: return "max-depth";
    case TruncationReason::max_configs: return "max-configs";
    case TruncationReason::max_transitions: return "max-transitions";
    }
    return "unknown";
}

std::vector<Configuration> ExplorationResult::halting_configurations() const {
    std::vector<Configuration> out;
    out.reserve(halting.size());
    for (std::size_t id : halting) out.push_back(configurations[id]);
    return out;
}

// Engine::Impl

Engine::Impl::Impl(PSystem sys) : system(std::move(sys)) {
    ValidationReport report = validate(system);
    if (!report.ok()) {
        throw PreconditionError("invalid system: " + report.violations.front().message);
    }
    regions = system.structure.regions();
    for (std::size_t i = 0; i < regions.size(); ++i) region_index[regions[i]] = i;
    n_reactives = system.reactives.size();
    n_grades = system.grades.positive().size();

    const FuzzyMultiset& env = system.initial.region(MembraneId::env());
    for (MembraneId m : system.structure.membranes()) {
        const auto& list = system.rules_of(m);
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Rule& rule = list[i];
            CompiledRule compiled;
            compiled.ref = RuleRef{m, i};
            compiled.own_region = region_index.at(m);
            compiled.parent_region = region_index.at(system.structure.parent(m));
            bool bounded = false;
            for (const auto& [v, n] : rule.incoming.counts) {
                const std::size_t g = *system.grades.positive_index(rule.threshold_in(v));
                compiled.incoming.push_back(Demand{compiled.parent_region, v.value, n, g});
                if (compiled.parent_region != 0) {
                    bounded = true;
                } else {
                    bool infinite = false;
                    for (std::size_t t = g; t < n_grades; ++t) {
                        infinite = infinite || env.count(v, system.grades.positive()[t]).is_infinite();
                    }
                    bounded = bounded || !infinite;
                }
            }
            for (const auto& [v, n] : rule.outgoing.counts) {
                const std::size_t g = *system.grades.positive_index(rule.threshold_out(v));
                compiled.outgoing.push_back(Demand{compiled.own_region, v.value, n, g});
                bounded = true;
            }
            if (!bounded) {
                throw PreconditionError("rule " + std::to_string(i) + " of membrane " + m.to_string() +
                                        " can fire unboundedly often");
            }
            rules.push_back(std::move(compiled));
            refs.push_back(RuleRef{m, i});
        }
    }
}

std::size_t Engine::Impl::rule_position(RuleRef ref) const {
    auto it = std::lower_bound(refs.begin(), refs.end(), ref);
    if (it == refs.end() || *it != ref) {
        throw PreconditionError("unknown rule " + std::to_string(ref.rule_index) + " of membrane " +
                                ref.membrane.to_string());
    }
    return static_cast<std::size_t>(it - refs.begin());
}

Table Engine::Impl::to_table(const Configuration& c) const {
    Table table(regions.size(), n_reactives, n_grades);
    for (const auto& [m, f] : c.regions()) {
        auto it = region_index.find(m);
        if (it == region_index.end()) throw PreconditionError("configuration has unknown region " + m.to_string());
        for (const auto& [key, n] : f.entries()) {
            auto g = system.grades.positive_index(key.second);
            if (!g || key.first.value >= n_reactives) {
                throw PreconditionError("configuration entry outside V x I+ in region " + m.to_string());
            }
            table.at(it->second, key.first.value, *g) = n;
        }
    }
    for (std::size_t r = 0; r < regions.size(); ++r) {
        if (!c.has_region(regions[r])) {
            throw PreconditionError("configuration lacks region " + regions[r].to_string());
        }
    }
    return table;
}

Configuration Engine::Impl::to_configuration(const Table& table) const {
    Configuration c(system.structure);
    for (std::size_t r = 0; r < regions.size(); ++r) {
        FuzzyMultiset& f = c.region(regions[r]);
        for (std::uint32_t v = 0; v < n_reactives; ++v) {
            for (std::size_t g = 0; g < n_grades; ++g) {
                const ExtNat n = table.at(r, v, g);
                if (!n.is_zero()) f.set(ReactiveId{v}, system.grades.positive()[g], n);
            }
        }
    }
    return c;
}

bool Engine::Impl::fits(const Table& suffix, const std::vector<std::uint64_t>& demand, const CompiledRule& rule,
                        std::uint64_t mult) const {
    auto check = [&](const Demand& d) {
        std::uint64_t cumulative = 0;
        for (std::size_t g = n_grades; g-- > 0;) {
            cumulative += demand[suffix.index(d.region, d.reactive, g)];
            if (g == d.min_grade) cumulative += mult * d.count;
            const ExtNat supply = suffix.at(d.region, d.reactive, g);
            if (!supply.is_infinite() && cumulative > supply.finite()) return false;
        }
        return true;
    };
    return std::all_of(rule.incoming.begin(), rule.incoming.end(), check) &&
           std::all_of(rule.outgoing.begin(), rule.outgoing.end(), check);
}

void Engine::Impl::add_demand(std::vector<std::uint64_t>& demand, const Table& shape, const CompiledRule& rule,
                              std::int64_t mult) const {
    auto apply = [&](const Demand& d) {
        auto& slot = demand[shape.index(d.region, d.reactive, d.min_grade)];
        slot = static_cast<std::uint64_t>(static_cast<std::int64_t>(slot) + mult * static_cast<std::int64_t>(d.count));
    };
    std::for_each(rule.incoming.begin(), rule.incoming.end(), apply);
    std::for_each(rule.outgoing.begin(), rule.outgoing.end(), apply);
}

bool Engine::Impl::condition_a(const Table& suffix, const std::vector<std::uint64_t>& demand) const {
    for (std::size_t r = 0; r < regions.size(); ++r) {
        for (std::uint32_t v = 0; v < n_reactives; ++v) {
            std::uint64_t cumulative = 0;
            for (std::size_t g = n_grades; g-- > 0;) {
                cumulative += demand[suffix.index(r, v, g)];
                const ExtNat supply = suffix.at(r, v, g);
                if (!supply.is_infinite() && cumulative > supply.finite()) return false;
            }
        }
    }
    return true;
}

std::vector<std::vector<std::uint64_t>> Engine::Impl::maximal_families(const Table& table) const {
    const Table suffix = table.suffix_sums();
    std::vector<std::uint64_t> demand(table.cells(), 0);
    std::vector<std::uint64_t> mult(rules.size(), 0);
    std::vector<std::vector<std::uint64_t>> out;

    auto search = [&](auto&& self, std::size_t i) -> void {
        if (i == rules.size()) {
            const bool maximal = std::none_of(rules.begin(), rules.end(),
                                              [&](const CompiledRule& r) { return fits(suffix, demand, r, 1); });
            if (maximal) out.push_back(mult);
            return;
        }
        self(self, i + 1);
        std::uint64_t taken = 0;
        while (fits(suffix, demand, rules[i], 1)) {
            add_demand(demand, suffix, rules[i], 1);
            mult[i] = ++taken;
            self(self, i + 1);
        }
        add_demand(demand, suffix, rules[i], -static_cast<std::int64_t>(taken));
        mult[i] = 0;
    };
    search(search, 0);
    return out;
}

std::vector<AppVec> Engine::Impl::applications(const Table& table, const CompiledRule& rule) const {
    std::vector<const Demand*> demands;
    for (const Demand& d : rule.incoming) demands.push_back(&d);
    for (const Demand& d : rule.outgoing) demands.push_back(&d);

    std::vector<AppVec> out;
    AppVec current(demands.size() * n_grades, 0);

    // Fill demand k, grade g onward with `left` copies still to place.
    auto place = [&](auto&& self, std::size_t k, std::size_t g, std::uint64_t left) -> void {
        if (k == demands.size()) {
            out.push_back(current);
            return;
        }
        const Demand& d = *demands[k];
        if (g == n_grades) {
            if (left == 0) self(self, k + 1, k + 1 < demands.size() ? demands[k + 1]->min_grade : 0,
                                k + 1 < demands.size() ? demands[k + 1]->count : 0);
            return;
        }
        const ExtNat available = table.at(d.region, d.reactive, g);
        const std::uint64_t cap = available.is_infinite() ? left : std::min(left, available.finite());
        for (std::uint64_t take = 0; take <= cap; ++take) {
            current[k * n_grades + g] = take;
            self(self, k, g + 1, left - take);
        }
        current[k * n_grades + g] = 0;
    };
    if (demands.empty()) {
        out.push_back(current);
    } else {
        place(place, 0, demands[0]->min_grade, demands[0]->count);
    }
    return out;
}

Distribution Engine::Impl::to_distribution(const CompiledRule& rule, const AppVec& app) const {
    Distribution d;
    std::size_t k = 0;
    auto fill = [&](const std::vector<Demand>& demands, auto& target) {
        for (const Demand& dem : demands) {
            for (std::size_t g = 0; g < n_grades; ++g) {
                if (app[k * n_grades + g] > 0) {
                    target[ReactiveId{dem.reactive}][system.grades.positive()[g]] = app[k * n_grades + g];
                }
            }
            ++k;
        }
    };
    fill(rule.incoming, d.enter);
    fill(rule.outgoing, d.exit);
    return d;
}

AppVec Engine::Impl::from_distribution(const CompiledRule& rule, const Distribution& dist) const {
    AppVec app((rule.incoming.size() + rule.outgoing.size()) * n_grades, 0);
    std::size_t k = 0;
    auto read = [&](const std::vector<Demand>& demands, const auto& source, const char* side) {
        std::map<ReactiveId, bool> seen;
        for (const Demand& dem : demands) {
            std::uint64_t total = 0;
            auto it = source.find(ReactiveId{dem.reactive});
            if (it != source.end()) {
                for (const auto& [grade, n] : it->second) {
                    auto g = system.grades.positive_index(grade);
                    if (!g) throw PreconditionError(std::string(side) + " distribution uses a grade outside I+");
                    if (*g < dem.min_grade && n > 0) {
                        throw PreconditionError(std::string(side) + " distribution takes copies below the threshold");
                    }
                    app[k * n_grades + *g] = n;
                    total += n;
                }
            }
            if (total != dem.count) {
                throw PreconditionError(std::string(side) + " distribution does not move the rule's word");
            }
            seen[ReactiveId{dem.reactive}] = true;
            ++k;
        }
        for (const auto& [v, grades] : source) {
            std::uint64_t total = 0;
            for (const auto& [g, n] : grades) total += n;
            if (total > 0 && !seen.count(v)) {
                throw PreconditionError(std::string(side) + " distribution moves a reactive the rule does not");
            }
        }
    };
    read(rule.incoming, dist.enter, "enter");
    read(rule.outgoing, dist.exit, "exit");
    return app;
}

void Engine::Impl::move(Table& table, const CompiledRule& rule, const AppVec& app, bool withdraw) const {
    std::size_t k = 0;
    auto step = [&](const std::vector<Demand>& demands, std::size_t from, std::size_t to) {
        for (const Demand& d : demands) {
            for (std::size_t g = 0; g < n_grades; ++g) {
                const std::uint64_t n = app[k * n_grades + g];
                if (n == 0) continue;
                if (withdraw) {
                    table.at(from, d.reactive, g) -= ExtNat{n};
                } else {
                    table.at(to, d.reactive, g) += ExtNat{n};
                }
            }
            ++k;
        }
    };
    step(rule.incoming, rule.parent_region, rule.own_region);
    step(rule.outgoing, rule.own_region, rule.parent_region);
}

Table Engine::Impl::apply(const Table& table, const std::vector<std::pair<std::size_t, const AppVec*>>& choice) const {
    Table next = table;
    try {
        for (const auto& [pos, app] : choice) move(next, rules[pos], *app, true);
    } catch (const ArithmeticError&) {
        throw PreconditionError("the rule instances withdraw more copies than the regions hold");
    }
    for (const auto& [pos, app] : choice) move(next, rules[pos], *app, false);
    return next;
}

TransitionSet Engine::Impl::transitions(const Table& table, const TransitionOptions& options) const {
    TransitionSet out;
    std::vector<std::pair<TransitionChoice, Table>> found;
    std::map<std::string, std::size_t> by_result;
    std::size_t enumerated = 0;

    for (const auto& family : maximal_families(table)) {
        if (out.truncated) break;
        // The zero family is maximal only in a halting configuration.
        if (std::all_of(family.begin(), family.end(), [](std::uint64_t m) { return m == 0; })) continue;
        // Slot list: one entry per instance, grouped by rule.
        std::vector<std::size_t> slot_rule;
        std::map<std::size_t, std::vector<AppVec>> apps;
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (family[i] == 0) continue;
            apps[i] = applications(table, rules[i]);
            for (std::uint64_t j = 0; j < family[i]; ++j) slot_rule.push_back(i);
        }
        std::vector<std::uint64_t> used(table.cells(), 0);
        std::vector<std::size_t> pick(slot_rule.size(), 0);

        auto charge = [&](const CompiledRule& rule, const AppVec& app, bool add) {
            std::size_t k = 0;
            bool ok = true;
            auto step = [&](const std::vector<Demand>& demands) {
                for (const Demand& d : demands) {
                    for (std::size_t g = 0; g < n_grades; ++g) {
                        const std::uint64_t n = app[k * n_grades + g];
                        if (n == 0) continue;
                        auto& slot = used[table.index(d.region, d.reactive, g)];
                        if (add) {
                            slot += n;
                            const ExtNat cap = table.at(d.region, d.reactive, g);
                            if (!cap.is_infinite() && slot > cap.finite()) ok = false;
                        } else {
                            slot -= n;
                        }
                    }
                    ++k;
                }
            };
            step(rule.incoming);
            step(rule.outgoing);
            return ok;
        };

        auto assign = [&](auto&& self, std::size_t s) -> void {
            if (out.truncated) return;
            if (s == slot_rule.size()) {
                if (enumerated == options.max_transitions) {
                    out.truncated = true;
                    return;
                }
                ++enumerated;
                std::vector<std::pair<std::size_t, const AppVec*>> choice;
                TransitionChoice tc;
                for (std::size_t k = 0; k < slot_rule.size(); ++k) {
                    const std::size_t i = slot_rule[k];
                    const AppVec& app = apps[i][pick[k]];
                    choice.emplace_back(i, &app);
                    tc.instances.push_back(RuleInstance{rules[i].ref.membrane, rules[i].ref.rule_index,
                                                        to_distribution(rules[i], app)});
                }
                std::sort(tc.instances.begin(), tc.instances.end());
                Table result = apply(table, choice);
                if (options.dedup_by_result) {
                    std::string key = result.key();
                    auto [it, inserted] = by_result.emplace(std::move(key), found.size());
                    if (!inserted) {
                        if (tc < found[it->second].first) found[it->second].first = std::move(tc);
                        return;
                    }
                }
                found.emplace_back(std::move(tc), std::move(result));
                return;
            }
            const std::size_t i = slot_rule[s];
            const std::size_t start = (s > 0 && slot_rule[s - 1] == i) ? pick[s - 1] : 0;
            for (std::size_t j = start; j < apps[i].size(); ++j) {
                pick[s] = j;
                if (charge(rules[i], apps[i][j], true)) self(self, s + 1);
                charge(rules[i], apps[i][j], false);
                if (out.truncated) return;
            }
        };
        assign(assign, 0);
    }

    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out.transitions.reserve(found.size());
    for (auto& [choice, result] : found) {
        out.transitions.push_back(Transition{std::move(choice), to_configuration(result)});
    }
    return out;
}

// Engine

Engine::Engine(PSystem system) : impl_(std::make_unique<Impl>(std::move(system))) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

const PSystem& Engine::system() const { return impl_->system; }
const std::vector<RuleRef>& Engine::rules() const { return impl_->refs; }

bool Engine::can_trigger(const Configuration& c, RuleRef rule) const {
    const CompiledRule& r = impl_->rules[impl_->rule_position(rule)];
    const Table suffix = impl_->to_table(c).suffix_sums();
    std::vector<std::uint64_t> demand(suffix.cells(), 0);
    return impl_->fits(suffix, demand, r, 1);
}

bool Engine::is_halting(const Configuration& c) const {
    const Table suffix = impl_->to_table(c).suffix_sums();
    std::vector<std::uint64_t> demand(suffix.cells(), 0);
    return std::none_of(impl_->rules.begin(), impl_->rules.end(),
                        [&](const CompiledRule& r) { return impl_->fits(suffix, demand, r, 1); });
}

std::vector<Distribution> Engine::enumerate_applications(const Configuration& c, RuleRef rule) const {
    if (!can_trigger(c, rule)) {
        throw PreconditionError("rule " + std::to_string(rule.rule_index) + " of membrane " +
                                rule.membrane.to_string() + " cannot be triggered");
    }
    const CompiledRule& r = impl_->rules[impl_->rule_position(rule)];
    std::vector<Distribution> out;
    for (const AppVec& app : impl_->applications(impl_->to_table(c), r)) out.push_back(impl_->to_distribution(r, app));
    std::sort(out.begin(), out.end());
    return out;
}

Configuration Engine::apply_one(const Configuration& c, const RuleInstance& instance) const {
    return apply(c, TransitionChoice{{instance}});
}

Configuration Engine::apply(const Configuration& c, const TransitionChoice& choice) const {
    const Table table = impl_->to_table(c);
    std::vector<AppVec> apps;
    std::vector<std::size_t> positions;
    apps.reserve(choice.instances.size());
    for (const RuleInstance& inst : choice.instances) {
        positions.push_back(impl_->rule_position(inst.rule()));
        apps.push_back(impl_->from_distribution(impl_->rules[positions.back()], inst.distribution));
    }
    std::vector<std::pair<std::size_t, const AppVec*>> refs;
    for (std::size_t k = 0; k < apps.size(); ++k) refs.emplace_back(positions[k], &apps[k]);
    return impl_->to_configuration(impl_->apply(table, refs));
}

bool Engine::satisfies_condition_a(const Configuration& c, std::span<const RuleRef> family) const {
    const Table suffix = impl_->to_table(c).suffix_sums();
    std::vector<std::uint64_t> demand(suffix.cells(), 0);
    for (const RuleRef& ref : family) impl_->add_demand(demand, suffix, impl_->rules[impl_->rule_position(ref)], 1);
    return impl_->condition_a(suffix, demand);
}

bool Engine::is_maximal(const Configuration& c, std::span<const RuleRef> family) const {
    const Table suffix = impl_->to_table(c).suffix_sums();
    std::vector<std::uint64_t> demand(suffix.cells(), 0);
    for (const RuleRef& ref : family) impl_->add_demand(demand, suffix, impl_->rules[impl_->rule_position(ref)], 1);
    if (!impl_->condition_a(suffix, demand)) {
        throw PreconditionError("is_maximal: the family already violates the level-sum condition");
    }
    return std::none_of(impl_->rules.begin(), impl_->rules.end(),
                        [&](const CompiledRule& r) { return impl_->fits(suffix, demand, r, 1); });
}

std::vector<std::vector<std::uint64_t>> Engine::maximal_families(const Configuration& c) const {
    return impl_->maximal_families(impl_->to_table(c));
}

TransitionSet Engine::enumerate_transitions(const Configuration& c, const TransitionOptions& options) const {
    return impl_->transitions(impl_->to_table(c), options);
}

// Free functions

bool can_trigger(const PSystem& system, const Configuration& c, MembraneId m, std::size_t rule_index) {
    return Engine(system).can_trigger(c, RuleRef{m, rule_index});
}

std::vector<Distribution> enumerate_applications(const PSystem& system, const Configuration& c, MembraneId m,
                                                 std::size_t rule_index) {
    return Engine(system).enumerate_applications(c, RuleRef{m, rule_index});
}

Configuration apply_one(const PSystem& system, const Configuration& c, const RuleInstance& instance) {
    return Engine(system).apply_one(c, instance);
}

TransitionSet enumerate_transitions(const PSystem& system, const Configuration& c, const TransitionOptions& options) {
    return Engine(system).enumerate_transitions(c, options);
}

bool is_maximal(const PSystem& system, const Configuration& c, std::span<const RuleRef> family) {
    return Engine(system).is_maximal(c, family);
}

ExplorationResult explore(const PSystem& system, const ExploreOptions& options) {
    return Engine(system).explore(options);
}

std::vector<InvariantViolation> check_transition_invariants(const PSystem& system, const Configuration& before,
                                                            const Configuration& after) {
    std::vector<InvariantViolation> out;
    const auto regions = system.structure.regions();
    for (MembraneId m : regions) {
        if (m.is_env()) continue;
        for (const Configuration* c : {&before, &after}) {
            if (!c->has_region(m)) continue;
            for (const auto& [key, n] : c->region(m).entries()) {
                if (n.is_infinite()) {
                    out.push_back({"membrane " + m.to_string() + " holds infinitely many copies of " +
                                   system.reactives.name(key.first)});
                }
            }
        }
    }
    for (ReactiveId v : system.reactives.ids()) {
        for (const Grade& t : system.grades.positive()) {
            const bool inf_before = before.region(MembraneId::env()).count(v, t).is_infinite();
            const bool inf_after = after.region(MembraneId::env()).count(v, t).is_infinite();
            const std::string what = system.reactives.name(v) + "@" + t.to_string();
            if (inf_before != inf_after) {
                out.push_back({"env supply of " + what + " changed between finite and infinite"});
                continue;
            }
            if (inf_before) continue;
            ExtNat total_before;
            ExtNat total_after;
            for (MembraneId m : regions) {
                total_before += before.region(m).count(v, t);
                total_after += after.region(m).count(v, t);
            }
            if (total_before != total_after) {
                out.push_back({"total count of " + what + " went from " + total_before.to_string() + " to " +
                               total_after.to_string()});
            }
        }
    }
    return out;
}

} // namespace memfuzz
