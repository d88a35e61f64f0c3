#include "memfuzz/textio.hpp"

#include <json.hpp>

namespace memfuzz {

using nlohmann::json;

namespace {

json region_json(const PSystem& sys, const FuzzyMultiset& f) {
    json out = json::array();
    for (const auto& [key, n] : f.entries()) {
        out.push_back(json::array({sys.reactives.name(key.first), key.second.to_string(), n.to_string()}));
    }
    return out;
}

json distribution_side(const PSystem& sys, const std::map<ReactiveId, std::map<Grade, std::uint64_t>>& side) {
    json out = json::object();
    for (const auto& [v, per_grade] : side) {
        json grades = json::object();
        for (const auto& [g, n] : per_grade) grades[g.to_string()] = n;
        out[sys.reactives.name(v)] = std::move(grades);
    }
    return out;
}

std::map<ReactiveId, std::map<Grade, std::uint64_t>> read_side(const PSystem& sys, const json& j) {
    std::map<ReactiveId, std::map<Grade, std::uint64_t>> out;
    for (const auto& [name, grades] : j.items()) {
        auto& target = out[sys.reactives.id(name)];
        for (const auto& [g, n] : grades.items()) target[Grade::parse(g)] = n.get<std::uint64_t>();
    }
    return out;
}

MembraneId read_membrane(const std::string& text) {
    if (text == "env") return MembraneId::env();
    return MembraneId{static_cast<std::uint32_t>(std::stoul(text))};
}

std::optional<TruncationReason> read_reason(const json& j) {
    if (j.is_null()) return std::nullopt;
    for (auto r : {TruncationReason::max_depth, TruncationReason::max_configs, TruncationReason::max_transitions}) {
        if (to_string(r) == j.get<std::string>()) return r;
    }
    throw Error("unknown truncation reason " + j.dump());
}

} // namespace

TraceDocument make_trace(const SystemDocument& system, const ExploreOptions& options, GenReport report) {
    TraceDocument t;
    t.system = system;
    t.bounds = options.bounds;
    t.dedup_by_result = options.dedup_by_result;
    t.report = std::move(report);
    return t;
}

std::string serialize(const TraceDocument& trace) {
    const PSystem& sys = trace.system.system;
    const ExplorationResult& ex = trace.report.exploration;
    json j;
    j["schema"] = trace_schema;
    j["tool"] = trace.tool;
    j["system"] = render(trace.system);
    j["bounds"] = {{"max_depth", trace.bounds.max_depth},
                   {"max_configs", trace.bounds.max_configs},
                   {"max_transitions", trace.bounds.max_transitions_per_config}};
    j["dedup_by_result"] = trace.dedup_by_result;
    j["exhausted"] = ex.exhausted;
    j["truncation_reason"] = ex.truncation_reason ? json(to_string(*ex.truncation_reason)) : json(nullptr);
    j["visited"] = ex.visited_count;
    j["depth_reached"] = ex.depth_reached;

    json configs = json::array();
    for (std::size_t id = 0; id < ex.configurations.size(); ++id) {
        json regions = json::object();
        for (const auto& [m, f] : ex.configurations[id].regions()) regions[m.to_string()] = region_json(sys, f);
        configs.push_back({{"id", id}, {"depth", ex.depths[id]}, {"regions", std::move(regions)}});
    }
    j["configurations"] = std::move(configs);
    j["halting"] = ex.halting;

    json edges = json::array();
    for (const ExplorationEdge& e : ex.edges) {
        json choice = json::array();
        for (const RuleInstance& inst : e.choice.instances) {
            choice.push_back({{"membrane", inst.membrane.to_string()},
                              {"rule", inst.rule_index},
                              {"enter", distribution_side(sys, inst.distribution.enter)},
                              {"exit", distribution_side(sys, inst.distribution.exit)}});
        }
        edges.push_back({{"from", e.from}, {"to", e.to}, {"choice", std::move(choice)}});
    }
    j["edges"] = std::move(edges);

    json hists = json::array();
    for (const auto& [id, h] : trace.report.histograms) {
        json counts = json::object();
        for (const auto& [g, n] : h.counts) counts[g.to_string()] = n;
        hists.push_back({{"configuration", id}, {"counts", std::move(counts)}});
    }
    j["histograms"] = std::move(hists);

    json gen = json::array();
    for (const auto& [n, g] : trace.report.gen.support()) gen.push_back(json::array({n, g.to_string()}));
    j["gen"] = std::move(gen);
    return j.dump(2) + "\n";
}

TraceDocument load_trace(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed trace: ") + e.what());
    }
    if (!j.is_object() || j.value("schema", "") != trace_schema) {
        throw Error("not a " + std::string(trace_schema) + " document");
    }
    try {
        TraceDocument t;
        t.tool = j.at("tool").get<std::string>();
        t.system = parse_or_throw(j.at("system").get<std::string>(), "<trace system>");
        const PSystem& sys = t.system.system;
        const json& b = j.at("bounds");
        t.bounds.max_depth = b.at("max_depth").get<std::size_t>();
        t.bounds.max_configs = b.at("max_configs").get<std::size_t>();
        t.bounds.max_transitions_per_config = b.at("max_transitions").get<std::size_t>();
        t.dedup_by_result = j.at("dedup_by_result").get<bool>();

        ExplorationResult& ex = t.report.exploration;
        ex.exhausted = j.at("exhausted").get<bool>();
        ex.truncation_reason = read_reason(j.at("truncation_reason"));
        ex.visited_count = j.at("visited").get<std::size_t>();
        ex.depth_reached = j.at("depth_reached").get<std::size_t>();
        for (const json& c : j.at("configurations")) {
            if (c.at("id").get<std::size_t>() != ex.configurations.size()) throw Error("configuration ids out of order");
            Configuration config(sys.structure);
            for (const auto& [m, entries] : c.at("regions").items()) {
                FuzzyMultiset& region = config.region(read_membrane(m));
                for (const json& e : entries) {
                    region.set(sys.reactives.id(e.at(0).get<std::string>()), Grade::parse(e.at(1).get<std::string>()),
                               ExtNat::parse(e.at(2).get<std::string>()));
                }
            }
            ex.configurations.push_back(std::move(config));
            ex.depths.push_back(c.at("depth").get<std::size_t>());
        }
        ex.halting = j.at("halting").get<std::vector<std::size_t>>();
        for (const json& e : j.at("edges")) {
            ExplorationEdge edge;
            edge.from = e.at("from").get<std::size_t>();
            edge.to = e.at("to").get<std::size_t>();
            for (const json& inst : e.at("choice")) {
                RuleInstance ri;
                ri.membrane = read_membrane(inst.at("membrane").get<std::string>());
                ri.rule_index = inst.at("rule").get<std::size_t>();
                ri.distribution.enter = read_side(sys, inst.at("enter"));
                ri.distribution.exit = read_side(sys, inst.at("exit"));
                edge.choice.instances.push_back(std::move(ri));
            }
            ex.edges.push_back(std::move(edge));
        }
        t.report.exhausted = ex.exhausted;
        for (const json& h : j.at("histograms")) {
            OutputHistogram hist;
            for (const auto& [g, n] : h.at("counts").items()) hist.counts[Grade::parse(g)] = n.get<std::uint64_t>();
            t.report.histograms.emplace_back(h.at("configuration").get<std::size_t>(), std::move(hist));
        }
        for (const json& entry : j.at("gen")) {
            t.report.gen.assign(entry.at(0).get<std::uint64_t>(), Grade::parse(entry.at(1).get<std::string>()));
        }
        return t;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed trace: ") + e.what());
    }
}

GenReport resummarize(const TraceDocument& trace) { return summarize(trace.system.system, trace.report.exploration); }

} // namespace memfuzz
