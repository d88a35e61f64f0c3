#include "memfuzz/constructions.hpp"
#include "memfuzz/textio.hpp"

#include <sstream>

namespace memfuzz {

namespace {

std::string word_block(const PSystem& sys, const RuleWord& w) {
    std::string out = "{ ";
    bool first = true;
    for (const auto& [v, n] : w.counts) {
        if (!first) out += ", ";
        first = false;
        out += sys.reactives.name(v) + " : " + std::to_string(n);
    }
    return out + (first ? "}" : " }");
}

std::string threshold_block(const PSystem& sys, const std::map<ReactiveId, Grade>& tau) {
    std::string out = "{ ";
    bool first = true;
    for (const auto& [v, g] : tau) {
        if (!first) out += ", ";
        first = false;
        out += sys.reactives.name(v) + " : " + g.to_string();
    }
    return out + (first ? "}" : " }");
}

// A bare env entry must not read back as a graded one.
bool bare_is_unambiguous(const PSystem& sys, const std::string& name) {
    auto at = name.rfind('@');
    if (at == std::string::npos) return true;
    if (!sys.reactives.find(std::string_view(name).substr(0, at))) return true;
    try {
        return !sys.grades.contains(Grade::parse(std::string_view(name).substr(at + 1)));
    } catch (const Error&) {
        return true;
    }
}

std::string region_block(const PSystem& sys, MembraneId m, const FuzzyMultiset& f) {
    std::map<ReactiveId, std::map<Grade, ExtNat>> by_reactive;
    for (const auto& [key, n] : f.entries()) by_reactive[key.first][key.second] = n;
    std::vector<std::string> items;
    for (const auto& [v, grades] : by_reactive) {
        const std::string& name = sys.reactives.name(v);
        bool homogeneous = m.is_env() && grades.size() == sys.grades.positive().size() && bare_is_unambiguous(sys, name);
        if (homogeneous) {
            for (const auto& [g, n] : grades) homogeneous = homogeneous && n == grades.begin()->second;
        }
        if (homogeneous) {
            items.push_back(name + " : " + grades.begin()->second.to_string());
        } else {
            for (const auto& [g, n] : grades) items.push_back(graded_name(name, g) + " : " + n.to_string());
        }
    }
    std::string out = "{ ";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
    return out + " }";
}

} // namespace

std::string render(const SystemDocument& doc) {
    const PSystem& sys = doc.system;
    std::ostringstream out;
    out << "system " << doc.name << "\n";
    out << "grades";
    for (const Grade& g : sys.grades.all()) out << " " << g.to_string();
    out << "\nreactives";
    for (ReactiveId v : sys.reactives.ids()) {
        out << " " << sys.reactives.name(v);
        if (auto it = sys.roles.find(v); it != sys.roles.end()) {
            out << (it->second == ReactiveRole::alpha ? ":role=alpha" : ":role=hash");
        }
    }
    out << "\noutputs";
    for (ReactiveId v : sys.outputs) out << " " << sys.reactives.name(v);
    out << "\n";
    for (const auto& [m, parent] : sys.structure.parents()) {
        out << "membrane " << m.to_string() << " parent " << parent.to_string();
        if (m == sys.output_membrane) out << " output";
        out << "\n";
    }
    for (const auto& [m, f] : sys.initial.regions()) {
        if (!f.empty()) out << "init " << m.to_string() << " " << region_block(sys, m, f) << "\n";
    }
    for (const auto& [m, list] : sys.rules) {
        for (const Rule& r : list) {
            out << "rule " << m.to_string() << " ";
            switch (r.kind()) {
            case RuleKind::antiport:
                out << "antiport in " << word_block(sys, r.incoming) << " out " << word_block(sys, r.outgoing)
                    << " tin " << threshold_block(sys, r.tau_in) << " tout " << threshold_block(sys, r.tau_out);
                break;
            case RuleKind::symport_in:
                out << "symport-in in " << word_block(sys, r.incoming) << " tin " << threshold_block(sys, r.tau_in);
                break;
            case RuleKind::symport_out:
                out << "symport-out out " << word_block(sys, r.outgoing) << " tout "
                    << threshold_block(sys, r.tau_out);
                break;
            }
            out << "\n";
        }
    }
    return out.str();
}

SystemDocument crisp_document(std::string name, const CrispPSystem& crisp) {
    return SystemDocument{std::move(name), embed(crisp, GradeSet::crisp())};
}

std::string describe(const PSystem& sys, const Configuration& c) {
    std::string out;
    for (const auto& [m, f] : c.regions()) {
        if (!out.empty()) out += " ";
        out += m.to_string() + "{";
        bool first = true;
        for (const auto& [key, n] : f.entries()) {
            if (!first) out += " ";
            first = false;
            out += graded_name(sys.reactives.name(key.first), key.second) + ":" + n.to_string();
        }
        out += "}";
    }
    return out;
}

std::string describe(const PSystem& sys, const TransitionChoice& choice) {
    auto side = [&](const std::map<ReactiveId, std::map<Grade, std::uint64_t>>& d) {
        std::string s;
        for (const auto& [v, per_grade] : d) {
            for (const auto& [g, n] : per_grade) {
                if (n == 0) continue;
                if (!s.empty()) s += " ";
                s += graded_name(sys.reactives.name(v), g) + ":" + std::to_string(n);
            }
        }
        return s;
    };
    std::string out;
    for (const RuleInstance& inst : choice.instances) {
        if (!out.empty()) out += "; ";
        out += "rule " + inst.membrane.to_string() + "." + std::to_string(inst.rule_index);
        out += " in[" + side(inst.distribution.enter) + "] out[" + side(inst.distribution.exit) + "]";
    }
    return out.empty() ? "(empty)" : out;
}

} // namespace memfuzz
