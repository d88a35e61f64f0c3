#include "memfuzz/constructions.hpp"
#include "memfuzz/textio.hpp"

#include "../support/reference.hpp"

#include <doctest.h>

using namespace memfuzz;

namespace {

const Grade half{1, 2};
const Grade one = Grade::one();
const GradeSet halves({Grade(0), Grade(1, 2), Grade(1)});

PSystem fuzzy(const std::string& body) {
    return parse_or_throw("system s\ngrades 0 1/2 1\nreactives v w\noutputs v\nmembrane 1 parent env output\n" + body)
        .system;
}

CrispPSystem crisp(const std::string& relative) { return to_crisp(testing::load_corpus(relative).system); }

std::size_t rule_count(const CrispPSystem& s) {
    std::size_t n = 0;
    for (const auto& [m, list] : s.rules) n += list.size();
    return n;
}

} // namespace

TEST_CASE("embed") {
    CrispPSystem c = to_crisp(parse_or_throw("system s\nreactives a b c\noutputs a\nmembrane 1 parent env output\n"
                                             "init 1 { a : 3 }\ninit env { c : inf }\n"
                                             "rule 1 antiport in { c : 1 } out { a : 1, b : 1 }\n")
                                  .system);
    PSystem f = embed(c, halves);
    const ReactiveId a = f.reactives.id("a");
    CHECK(f.initial.region(MembraneId{1}).count(a, one) == ExtNat(3));
    CHECK(f.initial.region(MembraneId{1}).entries().size() == 1);
    const ReactiveId cc = f.reactives.id("c");
    CHECK(f.initial.region(MembraneId::env()).count(cc, half).is_infinite());
    CHECK(f.initial.region(MembraneId::env()).count(cc, one).is_infinite());
    const Rule& r = f.rules_of(MembraneId{1}).front();
    CHECK(r.threshold_in(cc) == one);
    CHECK(r.threshold_out(a) == one);
    CHECK(r.threshold_out(f.reactives.id("b")) == one);
    CHECK(r.threshold_in(a) == Grade::zero());
    CHECK(validate(f).ok());
}

TEST_CASE("slice expansion") {
    SUBCASE("a threshold of 1/2 gives two rules") {
        SliceFamily s = slice(fuzzy("rule 1 symport-out out { v : 1 } tout { v : 1/2 }\n"));
        CHECK(s.slices.size() == 2);
        CHECK(rule_count(s.slices.at(one)) == 2);
    }
    SUBCASE("a threshold of 1 gives one rule") {
        SliceFamily s = slice(fuzzy("rule 1 symport-out out { v : 2 } tout { v : 1 }\n"));
        const CrispPSystem& c = s.slices.at(one);
        REQUIRE(rule_count(c) == 1);
        CHECK(c.rules_of(MembraneId{1}).front().outgoing.count(c.reactives.id("v@1")) == 2);
    }
    SUBCASE("antiport: 2 x 1 choices") {
        SliceFamily s = slice(fuzzy("init 1 { w@1 : 1 }\nrule 1 antiport in { v : 1 } out { w : 1 } tin { v : 1/2 }\n"));
        CHECK(rule_count(s.slices.at(half)) == 2);
    }
    SUBCASE("slices differ only in their outputs") {
        SliceFamily s = slice(testing::load_corpus("fuzzy/toy.psys").system);
        CrispPSystem a = s.slices.at(half);
        CrispPSystem b = s.slices.at(one);
        CHECK(a.outputs == std::set<ReactiveId>{a.reactives.id("v@1/2")});
        CHECK(b.outputs == std::set<ReactiveId>{b.reactives.id("v@1")});
        a.outputs = b.outputs;
        CHECK(a == b);
    }
    SUBCASE("expansion cap") {
        SliceOptions o;
        o.max_expansions_per_rule = 1;
        CHECK_THROWS_AS(slice(fuzzy("rule 1 symport-out out { v : 1 } tout { v : 1/2 }\n"), o), ExpansionLimitError);
    }
}

TEST_CASE("flatten_configuration uses the slice alphabet") {
    PSystem toy = testing::load_corpus("fuzzy/toy.psys").system;
    SliceFamily s = slice(toy);
    const CrispPSystem& c = s.slices.at(one);
    auto flat = flatten_configuration(toy, toy.initial, c.reactives);
    CHECK(flat.at(MembraneId{1}).at(c.reactives.id("w@1")) == ExtNat(2));
    CHECK(flat.at(MembraneId::env()).at(c.reactives.id("v@1/2")).is_infinite());
}

TEST_CASE("compose") {
    std::map<Grade, CrispPSystem> family{{half, crisp("slices/bucket_12.psys")}, {one, crisp("slices/bucket_1.psys")}};
    Composition comp = compose_detailed(family, halves);
    const PSystem& s = comp.system;
    CHECK(validate(s).ok());
    CHECK(s.structure.size() == 3);
    CHECK(s.output_membrane == MembraneId{2});

    SUBCASE("membrane 3 buries overgraded copies of the 1/2 marker only") {
        const auto& burial = s.rules_of(MembraneId{3});
        REQUIRE(burial.size() == 1);
        CHECK(burial[0].incoming.count(comp.alpha.at(half)) == 1);
        CHECK(burial[0].threshold_in(comp.alpha.at(half)) == one);
    }
    SUBCASE("markers start nowhere inside") {
        for (const auto& [t, alpha] : comp.alpha) {
            for (MembraneId m : s.structure.membranes()) {
                for (const Grade& g : halves.positive()) CHECK(s.initial.region(m).count(alpha, g).is_zero());
            }
        }
    }
    SUBCASE("thresholds") {
        for (const auto& [m, list] : s.rules) {
            for (const Rule& r : list) {
                for (const auto& [v, tau] : r.tau_in) {
                    if (v == comp.alpha.at(half)) {
                        CHECK((tau == half || m == MembraneId{3}));
                    } else {
                        CHECK(tau == one);
                    }
                }
            }
        }
    }
    SUBCASE("a single slice at 1") {
        std::map<Grade, CrispPSystem> single{{one, crisp("slices/bucket_2.psys")}};
        PSystem c = compose(single, GradeSet::crisp());
        CHECK(c.rules_of(MembraneId{3}).empty());
        CHECK(restrict_positive(gen(c).gen) == FuzzySubsetOfNat{{2, one}});
    }
}

TEST_CASE("compose preconditions") {
    std::map<Grade, CrispPSystem> missing{{one, crisp("slices/bucket_1.psys")}};
    CHECK_THROWS_AS(compose(missing, halves), PreconditionError);

    std::map<Grade, CrispPSystem> misshapen{{half, crisp("crisp/swap.psys")}, {one, crisp("slices/bucket_1.psys")}};
    CHECK_THROWS_AS(compose(misshapen, halves), PreconditionError);

    CrispPSystem unannotated = crisp("slices/bucket_1.psys");
    unannotated.roles.clear();
    std::map<Grade, CrispPSystem> bare{{half, unannotated}, {one, crisp("slices/bucket_1.psys")}};
    CHECK_THROWS_AS(compose(bare, halves), PreconditionError);
}

TEST_CASE("no overgraded markers at halting") {
    std::map<Grade, CrispPSystem> family{{half, crisp("slices/bucket_123.psys")}, {one, crisp("slices/bucket_2.psys")}};
    Composition comp = compose_detailed(family, halves);
    ExplorationResult r = explore(comp.system);
    REQUIRE(r.exhausted);
    REQUIRE_FALSE(r.halting.empty());
    for (std::size_t id : r.halting) CHECK(overgraded_markers(comp, r.configurations[id]).empty());

    // Before burial, grade-1 copies of the 1/2 marker do sit in membrane 2.
    bool seen = false;
    for (const auto& c : r.configurations) seen = seen || !overgraded_markers(comp, c).empty();
    CHECK(seen);
}
