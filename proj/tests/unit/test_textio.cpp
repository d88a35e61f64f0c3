#include "memfuzz/textio.hpp"

#include "../support/reference.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace memfuzz;

namespace {

std::vector<std::filesystem::path> whole_corpus() {
    std::vector<std::filesystem::path> out;
    for (const char* dir : {"crisp", "fuzzy", "slices", "generators", "limits", "invalid"}) {
        for (auto& f : testing::corpus_files(dir)) out.push_back(f);
    }
    return out;
}

std::string first_error(const std::string& text) {
    ParseResult r = parse(text);
    REQUIRE_FALSE(r.ok());
    return r.errors.front().to_string();
}

const std::string minimal = "system s\nreactives v\noutputs v\nmembrane 1 parent env output\n";

} // namespace

TEST_CASE("the documented example parses") {
    const std::string text = R"(system example
grades 0 1/2 1            # the set I
reactives v w alpha:role=alpha hash:role=hash
outputs v
membrane 1 parent env
membrane 2 parent 1 output
init 1 { w@1 : 2 }        # reactive@grade : count
init env { v : inf }
rule 1 antiport in { v:1 } out { w:1 } tin { v : 1/2 } tout { w : 1 }
rule 2 symport-in in { alpha:1 } tin { alpha : 1/2 }
)";
    ParseResult r = parse(text);
    REQUIRE(r.ok());
    const PSystem& s = r.document->system;
    CHECK(s.structure.size() == 2);
    CHECK(s.output_membrane == MembraneId{2});
    CHECK(s.roles.at(s.reactives.id("alpha")) == ReactiveRole::alpha);
    CHECK(s.initial.region(MembraneId::env()).count(s.reactives.id("v"), Grade(1, 2)).is_infinite());
    CHECK(s.rules_of(MembraneId{1}).front().threshold_in(s.reactives.id("v")) == Grade(1, 2));
}

TEST_CASE("parse errors carry positions") {
    CHECK(first_error("") == "1:1: missing system header");
    CHECK(first_error("# only a comment\n\n") == "1:1: missing system header");
    CHECK(first_error("grades 0 1\n") == "1:1: missing system header");
    CHECK(first_error(minimal + "rule 1 symport-in in { v : 1 } tin { v : 3/4 }\n") ==
          "5:42: grade 3/4 is not in the declared grade set");
    CHECK(first_error(minimal + "reactives v\n") == "5:11: reactive 'v' declared twice");
    CHECK(first_error(minimal + "membrane 1 parent env\n") == "5:10: membrane 1 declared twice");
    CHECK(first_error(minimal + "init 1 { x : 1 }\n") == "5:10: undeclared reactive 'x'");
    CHECK(first_error(minimal + "rule 1 symport-in in { v : 1 }\nrule 1 symport-in in { v : 1 }\n") ==
          "6:1: duplicate rule in membrane 1");
    CHECK(first_error(minimal + "rule 1 symport-in out { v : 1 }\n") ==
          "5:8: symport-in rule takes no 'out' clause");
    CHECK(first_error(minimal + "init 1 { v : 1 \n") == "5:15: unterminated '{'");
    CHECK(first_error(minimal + "frobnicate\n") == "5:1: unknown directive 'frobnicate'");
    CHECK(first_error("system s\nreactives v\noutputs v\nmembrane 1 parent env\n") == "5:1: no output membrane declared");
    CHECK(first_error("system s\ngrades 0 1 1/2\n") == "2:12: grades must be strictly ascending");
}

TEST_CASE("graded names in init") {
    SUBCASE("suffix split only for declared reactive and grade") {
        ParseResult r = parse("system s\ngrades 0 1/2 1\nreactives v v@x\noutputs v\nmembrane 1 parent env output\n"
                              "init 1 { v@1/2 : 1, v@x : 2 }\n");
        REQUIRE(r.ok());
        const PSystem& s = r.document->system;
        CHECK(s.initial.region(MembraneId{1}).count(s.reactives.id("v"), Grade(1, 2)) == ExtNat(1));
        CHECK(s.initial.region(MembraneId{1}).count(s.reactives.id("v@x"), Grade::one()) == ExtNat(2));
    }
    SUBCASE("a token that reads both ways is rejected") {
        CHECK(first_error("system s\ngrades 0 1/2 1\nreactives v v@1/2\noutputs v\nmembrane 1 parent env output\n"
                          "init 1 { v@1/2 : 1 }\n") == "6:10: 'v@1/2' is both a reactive and a graded reactive");
    }
}

TEST_CASE("round trips over the corpus") {
    for (const auto& f : whole_corpus()) {
        CAPTURE(f);
        SystemDocument d = load_document(f);
        const std::string once = render(d);
        SystemDocument again = parse_or_throw(once);
        CHECK(again == d);
        CHECK(render(again) == once);
    }
}

TEST_CASE("rendering is canonical") {
    const std::string a = minimal + "rule 1 symport-in in { v : 2 }\nrule 1 symport-in in { v : 1 }\n";
    const std::string b = minimal + "rule 1 symport-in in { v : 1 }\nrule 1 symport-in in { v : 2 }\n";
    CHECK(render(parse_or_throw(a)) == render(parse_or_throw(b)));
}

TEST_CASE("non-homogeneous env renders with grades") {
    SystemDocument d = testing::load_corpus("invalid/bad_env.psys");
    const std::string text = render(d);
    CHECK(text.find("init env { v@1/2 : inf }") != std::string::npos);
    CHECK(parse_or_throw(text) == d);
}

TEST_CASE("trace documents") {
    SystemDocument doc = testing::load_corpus("fuzzy/toy.psys");
    ExploreOptions o;
    o.record_edges = true;
    GenReport report = gen(doc.system, o);
    const std::string text = serialize(make_trace(doc, o, report));
    CHECK(text.find("\"schema\": \"memfuzz-trace/1\"") != std::string::npos);

    TraceDocument loaded = load_trace(text);
    CHECK(serialize(loaded) == text);
    CHECK(resummarize(loaded).gen == report.gen);
    CHECK(loaded.report.exploration.edges.size() == report.exploration.edges.size());
    CHECK(loaded.report.exploration.configurations == report.exploration.configurations);

    CHECK_THROWS_AS(load_trace("{}"), Error);
    CHECK_THROWS_AS(load_trace("not json"), Error);
}
