#include "memfuzz/textio.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace memfuzz {

std::string ParseError::to_string() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

namespace {

std::string join_errors(const std::string& source, const std::vector<ParseError>& errors) {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) out += "\n";
        out += source + ":" + e.to_string();
    }
    return out;
}

} // namespace

ParseFailure::ParseFailure(std::string source, std::vector<ParseError> errs)
    : Error(join_errors(source, errs)), errors(std::move(errs)) {}

namespace {

struct Token {
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

using Line = std::vector<Token>;

bool is_punct(char c) { return c == '{' || c == '}' || c == ':' || c == ','; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view raw = text.substr(pos, end - pos);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line;
        for (std::size_t i = 0; i < raw.size();) {
            if (is_space(raw[i])) {
                ++i;
            } else if (is_punct(raw[i])) {
                line.push_back({std::string(1, raw[i]), line_no, i + 1});
                ++i;
            } else {
                std::size_t j = i;
                while (j < raw.size() && !is_space(raw[j]) && !is_punct(raw[j])) ++j;
                line.push_back({std::string(raw.substr(i, j - i)), line_no, i + 1});
                i = j;
            }
        }
        if (!line.empty()) lines.push_back(std::move(line));
        pos = end + 1;
    }
    return lines;
}

struct Entry {
    Token key;
    Token value;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lines_(tokenize(text)) {}

    ParseResult run();

private:
    void error(const Token& at, std::string message) { errors_.push_back({at.line, at.column, std::move(message)}); }
    void error_after(const Line& line, std::string message) {
        const Token& last = line.back();
        errors_.push_back({last.line, last.column + last.text.size(), std::move(message)});
    }

    std::optional<std::vector<Entry>> block(const Line& line, std::size_t& i);
    std::optional<Grade> grade(const Token& t);
    std::optional<MembraneId> membrane_label(const Token& t, bool allow_env);
    std::optional<std::uint64_t> positive_count(const Token& t);
    std::optional<ReactiveId> reactive(const Token& t);
    std::optional<std::pair<ReactiveId, std::optional<Grade>>> graded_reactive(const Token& t);

    void do_grades(const Line& line);
    void do_reactives(const Line& line);
    void do_outputs(const Line& line);
    void do_membrane(const Line& line);
    void do_init(const Line& line);
    void do_rule(const Line& line);

    std::vector<Line> lines_;
    std::vector<ParseError> errors_;

    std::string name_;
    std::optional<GradeSet> grades_;
    std::vector<std::string> reactive_names_;
    std::map<std::string, std::pair<ReactiveRole, Token>> role_names_;
    std::vector<Token> output_tokens_;
    bool outputs_seen_ = false;
    ReactiveTable table_;
    MembraneStructure structure_;
    std::optional<MembraneId> output_membrane_;
    std::map<MembraneId, std::map<std::pair<ReactiveId, Grade>, ExtNat>> init_;
    std::set<MembraneId> init_seen_;
    std::map<MembraneId, std::vector<Rule>> rules_;
};

std::optional<std::vector<Entry>> Parser::block(const Line& line, std::size_t& i) {
    if (i >= line.size() || line[i].text != "{") {
        if (i < line.size()) error(line[i], "expected '{'");
        else error_after(line, "expected '{'");
        return std::nullopt;
    }
    ++i;
    std::vector<Entry> entries;
    while (true) {
        if (i >= line.size()) {
            error_after(line, "unterminated '{'");
            return std::nullopt;
        }
        if (line[i].text == "}") {
            ++i;
            return entries;
        }
        if (line[i].text == ",") {
            ++i;
            continue;
        }
        if (is_punct(line[i].text[0])) {
            error(line[i], "expected a reactive name, found '" + line[i].text + "'");
            return std::nullopt;
        }
        if (i + 2 >= line.size() || line[i + 1].text != ":" || is_punct(line[i + 2].text[0])) {
            error(line[i], "expected 'name : value'");
            return std::nullopt;
        }
        entries.push_back({line[i], line[i + 2]});
        i += 3;
    }
}

std::optional<Grade> Parser::grade(const Token& t) {
    Grade g;
    try {
        g = Grade::parse(t.text);
    } catch (const Error& e) {
        error(t, e.what());
        return std::nullopt;
    }
    if (!grades_->contains(g)) {
        error(t, "grade " + t.text + " is not in the declared grade set");
        return std::nullopt;
    }
    return g;
}

std::optional<MembraneId> Parser::membrane_label(const Token& t, bool allow_env) {
    if (t.text == "env") {
        if (allow_env) return MembraneId::env();
        error(t, "env is not allowed here");
        return std::nullopt;
    }
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || value == 0) {
        error(t, "bad membrane label '" + t.text + "'");
        return std::nullopt;
    }
    return MembraneId{value};
}

std::optional<std::uint64_t> Parser::positive_count(const Token& t) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || value == 0) {
        error(t, "expected a positive count, found '" + t.text + "'");
        return std::nullopt;
    }
    return value;
}

std::optional<ReactiveId> Parser::reactive(const Token& t) {
    if (auto id = table_.find(t.text)) return id;
    error(t, "undeclared reactive '" + t.text + "'");
    return std::nullopt;
}

// "v@t" names v at grade t when v is declared and t is a declared grade;
// otherwise the whole token is a reactive name.
std::optional<std::pair<ReactiveId, std::optional<Grade>>> Parser::graded_reactive(const Token& t) {
    std::optional<std::pair<ReactiveId, Grade>> split;
    if (auto at = t.text.rfind('@'); at != std::string::npos) {
        auto prefix = table_.find(std::string_view(t.text).substr(0, at));
        if (prefix) {
            try {
                Grade g = Grade::parse(std::string_view(t.text).substr(at + 1));
                if (grades_->contains(g)) split.emplace(*prefix, g);
            } catch (const Error&) {
            }
        }
    }
    auto whole = table_.find(t.text);
    if (split && whole) {
        error(t, "'" + t.text + "' is both a reactive and a graded reactive");
        return std::nullopt;
    }
    if (split) return std::pair{split->first, std::optional<Grade>(split->second)};
    if (whole) return std::pair{*whole, std::optional<Grade>()};
    error(t, "undeclared reactive '" + t.text + "'");
    return std::nullopt;
}

void Parser::do_grades(const Line& line) {
    if (grades_) {
        error(line[0], "grades declared twice");
        return;
    }
    std::vector<Grade> gs;
    for (std::size_t i = 1; i < line.size(); ++i) {
        try {
            Grade g = Grade::parse(line[i].text);
            if (!gs.empty() && g <= gs.back()) {
                error(line[i], "grades must be strictly ascending");
                return;
            }
            gs.push_back(g);
        } catch (const Error& e) {
            error(line[i], e.what());
            return;
        }
    }
    try {
        grades_ = GradeSet(std::move(gs));
    } catch (const Error& e) {
        error(line[0], e.what());
    }
}

void Parser::do_reactives(const Line& line) {
    for (std::size_t i = 1; i < line.size(); ++i) {
        const Token& t = line[i];
        if (is_punct(t.text[0])) {
            error(t, "unexpected '" + t.text + "'");
            return;
        }
        if (t.text == "inf" || t.text == "env") {
            error(t, "'" + t.text + "' is reserved");
            return;
        }
        for (const auto& n : reactive_names_) {
            if (n == t.text) error(t, "reactive '" + t.text + "' declared twice");
        }
        reactive_names_.push_back(t.text);
        if (i + 1 < line.size() && line[i + 1].text == ":") {
            if (i + 2 >= line.size()) {
                error_after(line, "expected role=alpha or role=hash");
                return;
            }
            const Token& role = line[i + 2];
            if (role.text == "role=alpha") {
                role_names_.insert({t.text, {ReactiveRole::alpha, role}});
            } else if (role.text == "role=hash") {
                role_names_.insert({t.text, {ReactiveRole::hash, role}});
            } else {
                error(role, "expected role=alpha or role=hash");
                return;
            }
            i += 2;
        }
    }
}

void Parser::do_outputs(const Line& line) {
    if (outputs_seen_) {
        error(line[0], "outputs declared twice");
        return;
    }
    outputs_seen_ = true;
    for (std::size_t i = 1; i < line.size(); ++i) output_tokens_.push_back(line[i]);
}

void Parser::do_membrane(const Line& line) {
    if (line.size() < 4 || line.size() > 5 || line[2].text != "parent" ||
        (line.size() == 5 && line[4].text != "output")) {
        error(line[0], "expected 'membrane LABEL parent LABEL [output]'");
        return;
    }
    auto m = membrane_label(line[1], false);
    auto p = membrane_label(line[3], true);
    if (!m || !p) return;
    if (structure_.contains(*m)) {
        error(line[1], "membrane " + m->to_string() + " declared twice");
        return;
    }
    structure_.add(*m, *p);
    if (line.size() == 5) {
        if (output_membrane_) error(line[4], "more than one output membrane");
        output_membrane_ = *m;
    }
}

void Parser::do_init(const Line& line) {
    if (line.size() < 2) {
        error_after(line, "expected a region label");
        return;
    }
    auto m = membrane_label(line[1], true);
    if (!m) return;
    if (!m->is_env() && !structure_.contains(*m)) {
        error(line[1], "undeclared membrane " + m->to_string());
        return;
    }
    if (!init_seen_.insert(*m).second) {
        error(line[0], "region " + m->to_string() + " initialized twice");
        return;
    }
    std::size_t i = 2;
    auto entries = block(line, i);
    if (!entries) return;
    if (i != line.size()) {
        error(line[i], "unexpected '" + line[i].text + "'");
        return;
    }
    auto& region = init_[*m];
    for (const Entry& e : *entries) {
        auto r = graded_reactive(e.key);
        if (!r) continue;
        ExtNat n;
        try {
            n = ExtNat::parse(e.value.text);
        } catch (const Error& ex) {
            error(e.value, ex.what());
            continue;
        }
        if (n.is_zero()) {
            error(e.value, "zero count");
            continue;
        }
        std::vector<Grade> at;
        if (r->second) {
            if (r->second->is_zero()) {
                error(e.key, "grade 0 cannot hold copies");
                continue;
            }
            at.push_back(*r->second);
        } else if (m->is_env()) {
            at.assign(grades_->positive().begin(), grades_->positive().end());
        } else {
            at.push_back(Grade::one());
        }
        for (const Grade& g : at) {
            if (!region.emplace(std::pair{r->first, g}, n).second) {
                error(e.key, "duplicate entry for " + table_.name(r->first) + "@" + g.to_string());
                break;
            }
        }
    }
}

void Parser::do_rule(const Line& line) {
    if (line.size() < 3) {
        error(line[0], "expected 'rule LABEL KIND ...'");
        return;
    }
    auto m = membrane_label(line[1], false);
    if (!m) return;
    if (!structure_.contains(*m)) {
        error(line[1], "undeclared membrane " + m->to_string());
        return;
    }
    const std::string& kind = line[2].text;
    if (kind != "antiport" && kind != "symport-in" && kind != "symport-out") {
        error(line[2], "unknown rule kind '" + kind + "'");
        return;
    }
    std::map<std::string, std::vector<Entry>> clauses;
    for (std::size_t i = 3; i < line.size();) {
        const Token& clause = line[i];
        if (clause.text != "in" && clause.text != "out" && clause.text != "tin" && clause.text != "tout") {
            error(clause, "expected in, out, tin or tout");
            return;
        }
        if (clauses.count(clause.text)) {
            error(clause, "clause '" + clause.text + "' given twice");
            return;
        }
        ++i;
        auto entries = block(line, i);
        if (!entries) return;
        clauses[clause.text] = std::move(*entries);
    }

    const bool wants_in = kind != "symport-out";
    const bool wants_out = kind != "symport-in";
    Rule rule;
    bool ok = true;
    auto read_word = [&](const char* clause, RuleWord& word) {
        for (const Entry& e : clauses[clause]) {
            auto v = reactive(e.key);
            auto n = positive_count(e.value);
            if (!v || !n) {
                ok = false;
                continue;
            }
            if (!word.counts.emplace(*v, *n).second) {
                error(e.key, "reactive '" + e.key.text + "' repeated in one word");
                ok = false;
            }
        }
    };
    auto read_thresholds = [&](const char* clause, const RuleWord& word, std::map<ReactiveId, Grade>& tau) {
        for (const Entry& e : clauses[clause]) {
            auto v = reactive(e.key);
            auto g = grade(e.value);
            if (!v || !g) {
                ok = false;
                continue;
            }
            if (!word.counts.count(*v)) {
                error(e.key, "threshold for '" + e.key.text + "', which is not in the word");
                ok = false;
            } else if (!tau.emplace(*v, *g).second) {
                error(e.key, "threshold for '" + e.key.text + "' given twice");
                ok = false;
            }
        }
        for (const auto& [v, n] : word.counts) tau.emplace(v, Grade::one());
    };
    for (const char* clause : {"in", "tin"}) {
        if (!wants_in && clauses.count(clause)) {
            error(line[2], std::string(kind) + " rule takes no '" + clause + "' clause");
            return;
        }
    }
    for (const char* clause : {"out", "tout"}) {
        if (!wants_out && clauses.count(clause)) {
            error(line[2], std::string(kind) + " rule takes no '" + clause + "' clause");
            return;
        }
    }
    read_word("in", rule.incoming);
    read_word("out", rule.outgoing);
    if (!ok) return;
    if (wants_in && rule.incoming.empty()) {
        error(line[2], kind + " rule needs a non-empty in word");
        return;
    }
    if (wants_out && rule.outgoing.empty()) {
        error(line[2], kind + " rule needs a non-empty out word");
        return;
    }
    read_thresholds("tin", rule.incoming, rule.tau_in);
    read_thresholds("tout", rule.outgoing, rule.tau_out);
    if (!ok) return;
    auto& list = rules_[*m];
    for (const Rule& r : list) {
        if (r == rule) {
            error(line[0], "duplicate rule in membrane " + m->to_string());
            return;
        }
    }
    list.push_back(std::move(rule));
}

ParseResult Parser::run() {
    ParseResult result;
    if (lines_.empty() || lines_[0][0].text != "system") {
        if (lines_.empty()) {
            errors_.push_back({1, 1, "missing system header"});
        } else {
            error(lines_[0][0], "missing system header");
        }
        result.errors = std::move(errors_);
        return result;
    }
    if (lines_[0].size() != 2) {
        error(lines_[0][0], "expected 'system NAME'");
    } else {
        name_ = lines_[0][1].text;
    }

    std::map<std::string, std::vector<const Line*>> by_kind;
    static const std::set<std::string> known{"system", "grades", "reactives", "outputs", "membrane", "init", "rule"};
    for (std::size_t k = 1; k < lines_.size(); ++k) {
        const Line& line = lines_[k];
        if (!known.count(line[0].text)) {
            error(line[0], "unknown directive '" + line[0].text + "'");
        } else if (line[0].text == "system") {
            error(line[0], "system header repeated");
        } else {
            by_kind[line[0].text].push_back(&line);
        }
    }

    for (const Line* l : by_kind["grades"]) do_grades(*l);
    if (!grades_) grades_ = GradeSet::crisp();
    for (const Line* l : by_kind["reactives"]) do_reactives(*l);
    try {
        table_ = ReactiveTable(reactive_names_);
    } catch (const Error&) {
        // Duplicates were reported per token.
        std::set<std::string> unique(reactive_names_.begin(), reactive_names_.end());
        table_ = ReactiveTable(std::vector<std::string>(unique.begin(), unique.end()));
    }
    for (const Line* l : by_kind["outputs"]) do_outputs(*l);
    std::set<ReactiveId> outputs;
    for (const Token& t : output_tokens_) {
        if (auto v = reactive(t)) {
            if (!outputs.insert(*v).second) error(t, "output '" + t.text + "' listed twice");
        }
    }
    for (const Line* l : by_kind["membrane"]) do_membrane(*l);
    // Whole-file problems are reported just past the last line.
    const std::size_t end_line = lines_.back()[0].line + 1;
    if (structure_.size() == 0) errors_.push_back({end_line, 1, "no membranes declared"});
    if (!output_membrane_ && structure_.size() > 0) {
        errors_.push_back({end_line, 1, "no output membrane declared"});
    }
    for (const Line* l : by_kind["init"]) do_init(*l);
    for (const Line* l : by_kind["rule"]) do_rule(*l);

    if (!errors_.empty()) {
        std::stable_sort(errors_.begin(), errors_.end(), [](const ParseError& a, const ParseError& b) {
            return std::pair(a.line, a.column) < std::pair(b.line, b.column);
        });
        result.errors = std::move(errors_);
        return result;
    }

    SystemDocument doc;
    doc.name = name_;
    PSystem& sys = doc.system;
    sys.reactives = table_;
    sys.outputs = std::move(outputs);
    sys.structure = structure_;
    sys.output_membrane = *output_membrane_;
    sys.grades = *grades_;
    sys.initial = Configuration(structure_);
    for (const auto& [m, region] : init_) {
        for (const auto& [key, n] : region) sys.initial.region(m).set(key.first, key.second, n);
    }
    sys.rules = std::move(rules_);
    for (const auto& [name, role] : role_names_) sys.roles[table_.id(name)] = role.first;
    sys.canonicalize();
    result.document = std::move(doc);
    return result;
}

} // namespace

ParseResult parse(std::string_view text) { return Parser(text).run(); }

SystemDocument parse_or_throw(std::string_view text, const std::string& source) {
    ParseResult r = parse(text);
    if (!r.ok()) throw ParseFailure(source, std::move(r.errors));
    return std::move(*r.document);
}

SystemDocument load_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_or_throw(buffer.str(), path.string());
}

} // namespace memfuzz
