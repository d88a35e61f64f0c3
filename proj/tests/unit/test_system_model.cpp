#include "memfuzz/system_model.hpp"
#include "memfuzz/textio.hpp"

#include "../support/reference.hpp"

#include <doctest.h>

using namespace memfuzz;

namespace {

PSystem sys(const std::string& text) { return parse_or_throw(text).system; }

const char* header = "system s\ngrades 0 1/2 1\nreactives v w\noutputs v\nmembrane 1 parent env output\n";

} // namespace

TEST_CASE("membrane structure") {
    MembraneStructure s;
    s.add(MembraneId{1}, MembraneId::env());
    s.add(MembraneId{2}, MembraneId{1});
    s.add(MembraneId{3}, MembraneId{1});
    CHECK(s.problems().empty());
    CHECK(s.children(MembraneId{1}) == std::vector<MembraneId>{MembraneId{2}, MembraneId{3}});
    CHECK(s.is_elementary(MembraneId{3}));
    CHECK(s.regions().front().is_env());

    MembraneStructure cyclic;
    cyclic.add(MembraneId{1}, MembraneId::env());
    cyclic.add(MembraneId{2}, MembraneId{3});
    cyclic.add(MembraneId{3}, MembraneId{2});
    CHECK_FALSE(cyclic.problems().empty());

    MembraneStructure skinless;
    skinless.add(MembraneId{2}, MembraneId::env());
    CHECK_FALSE(skinless.problems().empty());
}

TEST_CASE("canonical keys identify configurations") {
    PSystem s = sys(std::string(header) + "init 1 { v@1 : 2 }\n");
    Configuration c = s.initial;
    Configuration d(s.structure);
    d.region(MembraneId{1}).set(ReactiveId{0}, Grade::one(), 2);
    CHECK(c.canonical_key() == d.canonical_key());
    d.region(MembraneId{1}).set(ReactiveId{0}, Grade(1, 2), 1);
    CHECK(c.canonical_key() != d.canonical_key());
}

TEST_CASE("validator: clean corpus file") {
    CHECK(validate(testing::load_corpus("fuzzy/toy.psys").system).ok());
}

TEST_CASE("validator: threshold positivity") {
    PSystem s = sys(std::string(header) + "rule 1 symport-in in { v : 2 } tin { v : 0 }\n");
    CHECK(validate(s).has(violation::threshold_positivity));
}

TEST_CASE("validator: env homogeneity") {
    PSystem s = sys(std::string(header) + "init env { v@1/2 : inf }\nrule 1 symport-out out { v : 1 }\n");
    CHECK(validate(s).has(violation::env_homogeneity));
}

TEST_CASE("validator: finite membranes, unbounded pulls, output membrane") {
    CHECK(validate(sys(std::string(header) + "init 1 { v : inf }\n")).has(violation::finite_membranes));
    CHECK(validate(sys(std::string(header) + "init env { v : inf }\nrule 1 symport-in in { v : 1 }\n"))
              .has(violation::infinite_pull));
    PSystem s = sys(std::string(header));
    s.output_membrane = MembraneId{7};
    CHECK(validate(s).has(violation::output_membrane));
    s.output_membrane = MembraneId{1};
    s.outputs.insert(ReactiveId{9});
    CHECK(validate(s).has(violation::unknown_reactive));
}

TEST_CASE("validator: structure problems from the file") {
    PSystem s = sys("system s\nreactives v\noutputs v\nmembrane 1 parent env output\nmembrane 2 parent 5\n");
    CHECK(validate(s).has(violation::structure));
}

namespace {

CrispPSystem crisp(const std::string& relative) { return to_crisp(testing::load_corpus(relative).system); }

} // namespace

TEST_CASE("two-membrane normal form") {
    SUBCASE("hand-built generator of all positive naturals conforms") {
        ShapeReport r = check_normal_form(crisp("generators/positive.psys"));
        CHECK(r.conforms);
        CHECK(r.alpha_sole_entrant_assumed);
    }
    SUBCASE("bucket generators conform") {
        for (const auto& f : testing::corpus_files("slices")) {
            CHECK(check_normal_form(to_crisp(load_document(f).system)).conforms);
        }
    }
    SUBCASE("an antiport rule breaks the form") {
        ShapeReport r = check_normal_form(crisp("crisp/swap.psys"));
        CHECK_FALSE(r.conforms);
        bool cites = false;
        for (const auto& f : r.failures) cites = cites || f.find("symport-only") != std::string::npos;
        CHECK(cites);
    }
    SUBCASE("three membranes break the form") {
        CHECK_FALSE(check_normal_form(crisp("crisp/nested.psys")).conforms);
    }
}

TEST_CASE("to_crisp needs I = {0,1}") {
    CHECK_THROWS_AS(to_crisp(testing::load_corpus("fuzzy/toy.psys").system), PreconditionError);
}

TEST_CASE("reachable reactive grades") {
    const std::string base = "system s\ngrades 0 1/2 1\nreactives v w x\noutputs v\nmembrane 1 parent env output\n";
    PSystem s = sys(base + "init env { v : inf }\ninit 1 { w@1 : 1 }\nrule 1 antiport in { v : 1 } out { w : 1 } tin { v : 1/2 }\n");
    auto r = reachable_reactive_grades(s);
    CHECK(r[ReactiveId{0}] == std::set<Grade>{Grade(1, 2), Grade::one()});
    CHECK(r[ReactiveId{2}].empty());

    PSystem embedded = testing::load_corpus("crisp/bucket_24.psys").system;
    for (const auto& [v, grades] : reachable_reactive_grades(embedded)) {
        if (!grades.empty()) CHECK(grades == std::set<Grade>{Grade::one()});
    }
}
