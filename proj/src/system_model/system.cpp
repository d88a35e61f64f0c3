#include "memfuzz/error.hpp"
#include "memfuzz/system_model.hpp"

#include <algorithm>

namespace memfuzz {

// ReactiveTable

ReactiveTable::ReactiveTable(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    if (auto dup = std::adjacent_find(names_.begin(), names_.end()); dup != names_.end()) {
        throw PreconditionError("reactive '" + *dup + "' declared twice");
    }
    if (!names_.empty() && names_.front().empty()) throw PreconditionError("empty reactive name");
}

const std::string& ReactiveTable::name(ReactiveId id) const {
    if (id.value >= names_.size()) throw PreconditionError("unknown reactive id " + std::to_string(id.value));
    return names_[id.value];
}

std::optional<ReactiveId> ReactiveTable::find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return ReactiveId{static_cast<std::uint32_t>(it - names_.begin())};
}

ReactiveId ReactiveTable::id(std::string_view name) const {
    if (auto found = find(name)) return *found;
    throw PreconditionError("unknown reactive '" + std::string(name) + "'");
}

std::vector<ReactiveId> ReactiveTable::ids() const {
    std::vector<ReactiveId> out;
    out.reserve(names_.size());
    for (std::uint32_t i = 0; i < names_.size(); ++i) out.push_back(ReactiveId{i});
    return out;
}

// MembraneStructure

void MembraneStructure::add(MembraneId membrane, MembraneId parent) {
    if (membrane.is_env()) throw PreconditionError("env cannot be declared as a membrane");
    if (!parent_.emplace(membrane, parent).second) {
        throw PreconditionError("membrane " + membrane.to_string() + " declared twice");
    }
}

std::vector<MembraneId> MembraneStructure::membranes() const {
    std::vector<MembraneId> out;
    out.reserve(parent_.size());
    for (const auto& [m, p] : parent_) out.push_back(m);
    return out;
}

std::vector<MembraneId> MembraneStructure::regions() const {
    std::vector<MembraneId> out{MembraneId::env()};
    for (const auto& [m, p] : parent_) out.push_back(m);
    return out;
}

MembraneId MembraneStructure::parent(MembraneId m) const {
    auto it = parent_.find(m);
    if (it == parent_.end()) throw PreconditionError("unknown membrane " + m.to_string());
    return it->second;
}

std::vector<MembraneId> MembraneStructure::children(MembraneId m) const {
    std::vector<MembraneId> out;
    for (const auto& [c, p] : parent_) {
        if (p == m) out.push_back(c);
    }
    return out;
}

std::vector<std::string> MembraneStructure::problems() const {
    std::vector<std::string> out;
    auto skin = parent_.find(MembraneId::skin());
    if (skin == parent_.end()) {
        out.emplace_back("membrane 1 (skin) is missing");
    } else if (!skin->second.is_env()) {
        out.emplace_back("the parent of membrane 1 must be env");
    }
    for (const auto& [m, p] : parent_) {
        if (m == MembraneId::skin()) continue;
        if (p.is_env()) {
            out.push_back("membrane " + m.to_string() + " sits directly in env; only the skin may");
            continue;
        }
        if (!contains(p)) {
            out.push_back("membrane " + m.to_string() + " has undeclared parent " + p.to_string());
            continue;
        }
        // Walk up; a tree reaches env within |M| steps.
        MembraneId cur = m;
        std::size_t steps = 0;
        while (!cur.is_env() && contains(cur) && steps <= parent_.size()) {
            cur = parent_.at(cur);
            ++steps;
        }
        if (!cur.is_env()) out.push_back("membrane " + m.to_string() + " is on a parent cycle");
    }
    return out;
}

// RuleWord / Rule

RuleWord::RuleWord(std::initializer_list<std::pair<const ReactiveId, std::uint64_t>> init) {
    for (const auto& [v, n] : init) {
        if (n > 0) counts[v] += n;
    }
}

std::uint64_t RuleWord::count(ReactiveId v) const {
    auto it = counts.find(v);
    return it == counts.end() ? 0 : it->second;
}

std::uint64_t RuleWord::length() const {
    std::uint64_t n = 0;
    for (const auto& [v, c] : counts) n += c;
    return n;
}

Grade Rule::threshold_in(ReactiveId v) const {
    auto it = tau_in.find(v);
    return it == tau_in.end() ? Grade::zero() : it->second;
}

Grade Rule::threshold_out(ReactiveId v) const {
    auto it = tau_out.find(v);
    return it == tau_out.end() ? Grade::zero() : it->second;
}

RuleKind Rule::kind() const {
    if (outgoing.empty()) return RuleKind::symport_in;
    if (incoming.empty()) return RuleKind::symport_out;
    return RuleKind::antiport;
}

// Configuration

Configuration::Configuration(const MembraneStructure& structure) {
    for (MembraneId m : structure.regions()) regions_[m];
}

const FuzzyMultiset& Configuration::region(MembraneId m) const {
    auto it = regions_.find(m);
    if (it == regions_.end()) throw PreconditionError("configuration has no region " + m.to_string());
    return it->second;
}

FuzzyMultiset& Configuration::region(MembraneId m) { return regions_[m]; }

std::string Configuration::canonical_key() const {
    std::string key;
    for (const auto& [m, f] : regions_) {
        key += std::to_string(m.value);
        key += ':';
        for (const auto& [entry, n] : f.entries()) {
            key += std::to_string(entry.first.value);
            key += ',';
            key += entry.second.to_string();
            key += '=';
            key += n.to_string();
            key += ' ';
        }
        key += ';';
    }
    return key;
}

// PSystem / CrispPSystem

namespace {
template <typename R>
const std::vector<R>& rules_or_empty(const std::map<MembraneId, std::vector<R>>& rules, MembraneId m) {
    static const std::vector<R> empty;
    auto it = rules.find(m);
    return it == rules.end() ? empty : it->second;
}
} // namespace

const std::vector<Rule>& PSystem::rules_of(MembraneId m) const { return rules_or_empty(rules, m); }

void PSystem::canonicalize() {
    for (auto& [m, list] : rules) std::sort(list.begin(), list.end());
}

const std::vector<CrispRule>& CrispPSystem::rules_of(MembraneId m) const { return rules_or_empty(rules, m); }

ExtNat CrispPSystem::initial_count(MembraneId m, ReactiveId v) const {
    auto region = initial.find(m);
    if (region == initial.end()) return {};
    auto it = region->second.find(v);
    return it == region->second.end() ? ExtNat{} : it->second;
}

void CrispPSystem::canonicalize() {
    for (auto& [m, list] : rules) std::sort(list.begin(), list.end());
}

bool ValidationReport::has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

} // namespace memfuzz
