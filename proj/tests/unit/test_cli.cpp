#include "memfuzz/cli.hpp"
#include "memfuzz/textio.hpp"

#include "../support/reference.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace memfuzz;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string corpus(const std::string& relative) { return (testing::corpus_dir() / relative).string(); }

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "memfuzz-cli-tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("gen on the toy system") {
    Run r = cli({"gen", corpus("fuzzy/toy.psys")});
    CHECK(r.code == 0);
    CHECK(r.out.find("gen {0:1, 1:1, 2:1}") != std::string::npos);
    CHECK(r.out.find("exhausted true") != std::string::npos);

    Run pos = cli({"gen", corpus("fuzzy/toy.psys"), "--restrict-positive"});
    CHECK(pos.out.find("gen {1:1, 2:1}") != std::string::npos);
}

TEST_CASE("validate") {
    CHECK(cli({"validate", corpus("fuzzy/toy.psys")}).code == 0);
    Run bad = cli({"validate", corpus("invalid/bad_env.psys")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("env-homogeneity") != std::string::npos);
    Run missing = cli({"validate", corpus("does-not-exist.psys")});
    CHECK(missing.code == 1);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"gen"}).code == 2);
    CHECK(cli({"gen", corpus("fuzzy/toy.psys"), "--max-depth", "x"}).code == 2);
    CHECK(cli({"compose", corpus("slices/bucket_1.psys"), "--grades", "0,1/2,1"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("slice writes one file per grade") {
    auto dir = scratch("slice");
    Run r = cli({"slice", corpus("fuzzy/toy.psys"), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const std::string a = read(dir / "toy.t1_2.psys");
    const std::string b = read(dir / "toy.t1.psys");
    REQUIRE_FALSE(a.empty());
    REQUIRE_FALSE(b.empty());
    std::istringstream la(a), lb(b);
    std::string x, y;
    std::vector<std::string> differing;
    while (std::getline(la, x) && std::getline(lb, y)) {
        if (x != y) differing.push_back(x + " / " + y);
    }
    REQUIRE(differing.size() == 1);
    CHECK(differing[0] == "outputs v@1/2 / outputs v@1");
}

TEST_CASE("embed agrees with the crisp file on n >= 1") {
    auto dir = scratch("embed");
    for (const char* f : {"crisp/choice.psys", "crisp/bucket_24.psys"}) {
        Run lifted = cli({"embed", corpus(f), "--grades", "0,1/2,1"});
        REQUIRE(lifted.code == 0);
        const auto path = dir / "lifted.psys";
        std::ofstream(path) << lifted.out;
        Run crisp_gen = cli({"gen", corpus(f), "--restrict-positive"});
        Run fuzzy_gen = cli({"gen", path.string(), "--restrict-positive"});
        auto gen_line = [](const std::string& s) { return s.substr(s.find("gen "), s.find('\n', s.find("gen ")) - s.find("gen ")); };
        CHECK(gen_line(crisp_gen.out) == gen_line(fuzzy_gen.out));
    }
    CHECK(cli({"embed", corpus("fuzzy/toy.psys")}).code == 1);
}

TEST_CASE("compose and check-shape") {
    auto dir = scratch("compose");
    Run r = cli({"compose", corpus("slices/bucket_12.psys"), corpus("slices/bucket_1.psys"), "--grades", "0,1/2,1"});
    REQUIRE(r.code == 0);
    std::ofstream(dir / "c.psys") << r.out;
    Run g = cli({"gen", (dir / "c.psys").string(), "--restrict-positive"});
    CHECK(g.out.find("level 1/2 {1, 2}") != std::string::npos);
    CHECK(g.out.find("level 1 {1}") != std::string::npos);

    CHECK(cli({"check-shape", corpus("generators/positive.psys")}).code == 0);
    Run no = cli({"check-shape", corpus("crisp/swap.psys")});
    CHECK(no.code == 1);
    CHECK(no.out.find("symport-only") != std::string::npos);
}

TEST_CASE("step and explore") {
    Run s = cli({"step", corpus("fuzzy/toy.psys")});
    CHECK(s.code == 0);
    CHECK(s.out.find("layer 1") != std::string::npos);
    CHECK(s.out.find("0 -> 3") != std::string::npos);

    auto dir = scratch("explore");
    const auto trace = dir / "t.json";
    Run e = cli({"explore", corpus("fuzzy/toy.psys"), "--trace", trace.string()});
    CHECK(e.code == 0);
    TraceDocument t = load_trace(read(trace));
    CHECK(resummarize(t).gen == FuzzySubsetOfNat{{0, Grade::one()}, {1, Grade::one()}, {2, Grade::one()}});

    Run bounded = cli({"explore", corpus("generators/positive.psys"), "--max-depth", "5"});
    CHECK(bounded.out.find("truncated-by max-depth") != std::string::npos);
}

TEST_CASE("bounds from the environment") {
    ::setenv("MEMFUZZ_MAX_CONFIGS", "7", 1);
    Run r = cli({"explore", corpus("generators/positive.psys")});
    ::unsetenv("MEMFUZZ_MAX_CONFIGS");
    CHECK(r.out.find("visited 7") != std::string::npos);
    CHECK(r.out.find("truncated-by max-configs") != std::string::npos);

    ::setenv("MEMFUZZ_MAX_DEPTH", "nope", 1);
    CHECK(cli({"explore", corpus("fuzzy/toy.psys")}).code == 2);
    ::unsetenv("MEMFUZZ_MAX_DEPTH");
}
