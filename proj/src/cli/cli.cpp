#include "memfuzz/cli.hpp"

#include "memfuzz/constructions.hpp"
#include "memfuzz/outputs.hpp"
#include "memfuzz/textio.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace memfuzz {

namespace {

// Failures that map to exit status 1.
class Failure : public Error {
public:
    using Error::Error;
};

struct BoundFlags {
    std::size_t max_depth = 0;
    std::size_t max_configs = 0;
    std::size_t max_trans = 0;
    unsigned threads = 0;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--max-depth", max_depth, "BFS depth bound (env MEMFUZZ_MAX_DEPTH)");
        cmd.add_option("--max-configs", max_configs, "visited configuration bound (env MEMFUZZ_MAX_CONFIGS)");
        cmd.add_option("--max-trans", max_trans, "transitions per configuration bound (env MEMFUZZ_MAX_TRANS)");
        cmd.add_option("--threads", threads, "worker threads (env MEMFUZZ_THREADS)");
    }
};

std::size_t env_number(const char* name, std::size_t fallback) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') return fallback;
    try {
        std::size_t used = 0;
        unsigned long long n = std::stoull(value, &used);
        if (used != std::string(value).size()) throw std::invalid_argument(name);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(name), "not a number: " + std::string(value));
    }
}

ExploreOptions options_from(const BoundFlags& flags) {
    ExploreOptions o;
    ExplorationBounds& b = o.bounds;
    b.max_depth = flags.max_depth ? flags.max_depth : env_number("MEMFUZZ_MAX_DEPTH", b.max_depth);
    b.max_configs = flags.max_configs ? flags.max_configs : env_number("MEMFUZZ_MAX_CONFIGS", b.max_configs);
    b.max_transitions_per_config =
        flags.max_trans ? flags.max_trans : env_number("MEMFUZZ_MAX_TRANS", b.max_transitions_per_config);
    o.threads = flags.threads ? flags.threads : static_cast<unsigned>(env_number("MEMFUZZ_THREADS", 1));
    return o;
}

SystemDocument load_valid(const std::string& file) {
    SystemDocument doc;
    try {
        doc = load_document(file);
    } catch (const Error& e) {
        throw Failure(e.what());
    }
    ValidationReport report = validate(doc.system);
    if (!report.ok()) {
        std::string msg = file + ": invalid system";
        for (const Violation& v : report.violations) msg += "\n  " + v.code + ": " + v.message;
        throw Failure(msg);
    }
    return doc;
}

GradeSet parse_grade_list(const std::string& text) {
    std::vector<Grade> grades;
    std::string item;
    auto flush = [&] {
        if (!item.empty()) grades.push_back(Grade::parse(item));
        item.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ') flush();
        else item += c;
    }
    flush();
    std::sort(grades.begin(), grades.end());
    try {
        return GradeSet(std::move(grades));
    } catch (const Error& e) {
        throw CLI::ValidationError("--grades", e.what());
    }
}

std::string file_grade(const Grade& t) {
    std::string s = t.to_string();
    std::replace(s.begin(), s.end(), '/', '_');
    return s;
}

void print_summary(std::ostream& out, const SystemDocument& doc, const GenReport& report, bool restrict) {
    const ExplorationResult& ex = report.exploration;
    const FuzzySubsetOfNat gen = restrict ? restrict_positive(report.gen) : report.gen;
    out << "system " << doc.name << "\n";
    out << "gen " << to_string(gen) << "\n";
    for (const Grade& t : doc.system.grades.positive()) {
        LevelSet level = t_level(gen, t);
        out << "level " << t.to_string() << " {";
        bool first = true;
        for (auto n : level.members) {
            out << (first ? "" : ", ") << n;
            first = false;
        }
        out << "}\n";
    }
    out << "exhausted " << (report.exhausted ? "true" : "false") << "\n";
    if (ex.truncation_reason) out << "truncated-by " << to_string(*ex.truncation_reason) << "\n";
    out << "halting " << ex.halting.size() << "\n";
    out << "visited " << ex.visited_count << "\n";
    out << "depth " << ex.depth_reached << "\n";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Failure("cannot write " + path);
    f << text;
    if (!f) throw Failure("cannot write " + path);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fuzzy symport/antiport P-system simulator", "memfuzz"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    std::string file;
    std::vector<std::string> files;

    auto* validate_cmd = app.add_subcommand("validate", "parse and validate a system");
    validate_cmd->add_option("FILE", file)->required();

    std::size_t layers = 1;
    BoundFlags step_bounds;
    auto* step_cmd = app.add_subcommand("step", "print the first BFS layers of transitions");
    step_cmd->add_option("FILE", file)->required();
    step_cmd->add_option("--n", layers, "number of layers")->check(CLI::PositiveNumber);
    step_bounds.add_to(*step_cmd);

    BoundFlags explore_bounds;
    std::string trace_path;
    auto* explore_cmd = app.add_subcommand("explore", "explore the computation tree");
    explore_cmd->add_option("FILE", file)->required();
    explore_cmd->add_option("--trace", trace_path, "write a JSON trace");
    explore_bounds.add_to(*explore_cmd);

    BoundFlags gen_bounds;
    bool restrict_positive_flag = false;
    std::string gen_trace_path;
    auto* gen_cmd = app.add_subcommand("gen", "compute the generated fuzzy set");
    gen_cmd->add_option("FILE", file)->required();
    gen_cmd->add_flag("--restrict-positive", restrict_positive_flag, "report n >= 1 only");
    gen_cmd->add_option("--trace", gen_trace_path, "write a JSON trace");
    gen_bounds.add_to(*gen_cmd);

    std::string grades_text;
    auto* embed_cmd = app.add_subcommand("embed", "lift a crisp system to a grade set");
    embed_cmd->add_option("FILE", file)->required();
    embed_cmd->add_option("--grades", grades_text, "grade set, e.g. 0,1/2,1");

    std::string out_dir = ".";
    auto* slice_cmd = app.add_subcommand("slice", "write one crisp system per grade");
    slice_cmd->add_option("FILE", file)->required();
    slice_cmd->add_option("--out", out_dir, "output directory");

    std::string compose_name = "composed";
    auto* compose_cmd = app.add_subcommand("compose", "compose crisp generators, one per grade of I+ ascending");
    compose_cmd->add_option("FILE", files)->required();
    compose_cmd->add_option("--grades", grades_text, "grade set, e.g. 0,1/2,1")->required();
    compose_cmd->add_option("--name", compose_name, "system name of the result");

    auto* shape_cmd = app.add_subcommand("check-shape", "check the two-membrane normal form");
    shape_cmd->add_option("FILE", file)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) {
            SystemDocument doc = load_valid(file);
            out << "ok " << doc.name << "\n";
            return 0;
        }
        if (*step_cmd) {
            SystemDocument doc = load_valid(file);
            ExploreOptions o = options_from(step_bounds);
            o.bounds.max_depth = layers;
            o.record_edges = true;
            ExplorationResult ex = Engine(doc.system).explore(o);
            for (std::size_t d = 0; d < layers; ++d) {
                out << "layer " << d + 1 << "\n";
                for (const ExplorationEdge& e : ex.edges) {
                    if (ex.depths[e.from] != d) continue;
                    out << "  " << e.from << " -> " << e.to << " : " << describe(doc.system, e.choice) << "\n";
                }
            }
            for (std::size_t id = 0; id < ex.configurations.size(); ++id) {
                const bool halting = std::binary_search(ex.halting.begin(), ex.halting.end(), id);
                out << "config " << id << (halting ? " halting" : "") << " : " << describe(doc.system, ex.configurations[id])
                    << "\n";
            }
            return 0;
        }
        if (*explore_cmd || *gen_cmd) {
            const bool is_gen = gen_cmd->parsed();
            SystemDocument doc = load_valid(file);
            ExploreOptions o = options_from(is_gen ? gen_bounds : explore_bounds);
            const std::string& trace_out = is_gen ? gen_trace_path : trace_path;
            o.record_edges = !trace_out.empty();
            GenReport report = gen(doc.system, o);
            print_summary(out, doc, report, is_gen && restrict_positive_flag);
            if (!trace_out.empty()) write_file(trace_out, serialize(make_trace(doc, o, report)));
            return 0;
        }
        if (*embed_cmd) {
            SystemDocument doc = load_valid(file);
            if (!(doc.system.grades == GradeSet::crisp())) throw Failure(file + ": embed expects a crisp system (grades 0 1)");
            GradeSet target = grades_text.empty() ? GradeSet::crisp() : parse_grade_list(grades_text);
            out << render(SystemDocument{doc.name, embed(to_crisp(doc.system), target)});
            return 0;
        }
        if (*slice_cmd) {
            SystemDocument doc = load_valid(file);
            SliceFamily family = slice(doc.system);
            const std::string stem = std::filesystem::path(file).stem().string();
            std::filesystem::create_directories(out_dir);
            for (const auto& [t, crisp] : family.slices) {
                const auto path = std::filesystem::path(out_dir) / (stem + ".t" + file_grade(t) + ".psys");
                write_file(path.string(), render(crisp_document(doc.name, crisp)));
                out << path.string() << "\n";
            }
            return 0;
        }
        if (*compose_cmd) {
            GradeSet grades = parse_grade_list(grades_text);
            if (files.size() != grades.positive().size()) {
                err << "compose: " << files.size() << " files given for " << grades.positive().size()
                    << " positive grades\n";
                return 2;
            }
            std::map<Grade, CrispPSystem> slices;
            for (std::size_t i = 0; i < files.size(); ++i) {
                SystemDocument doc = load_valid(files[i]);
                if (!(doc.system.grades == GradeSet::crisp())) throw Failure(files[i] + ": expected a crisp system");
                slices.emplace(grades.positive()[i], to_crisp(doc.system));
            }
            out << render(SystemDocument{compose_name, compose(slices, grades)});
            return 0;
        }
        if (*shape_cmd) {
            SystemDocument doc = load_valid(file);
            if (!(doc.system.grades == GradeSet::crisp())) throw Failure(file + ": expected a crisp system");
            CrispPSystem crisp = to_crisp(doc.system);
            ShapeReport r = check_normal_form(crisp);
            if (!r.conforms) {
                out << "does not conform\n";
                for (const auto& f : r.failures) out << "  " << f << "\n";
                return 1;
            }
            out << "conforms\n";
            out << "alpha " << crisp.reactives.name(*r.alpha) << "\n";
            out << "hash " << crisp.reactives.name(*r.hash) << "\n";
            out << "assumed: alpha is the only reactive entering the output membrane in halting computations\n";
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace memfuzz
