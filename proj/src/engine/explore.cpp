#include "memfuzz/engine.hpp"
#include "memfuzz/error.hpp"

#include "dense.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace memfuzz {

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any job is rethrown on the calling thread.
template <typename Job>
void parallel_for(std::size_t n, unsigned threads, Job job) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto count = std::min<std::size_t>(threads, n);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

ExplorationResult Engine::explore(const ExploreOptions& options) const {
    const ExplorationBounds& bounds = options.bounds;
    const PSystem& sys = impl_->system;
    ExplorationResult result;

    auto truncate = [&](TruncationReason reason) {
        result.exhausted = false;
        if (!result.truncation_reason) result.truncation_reason = reason;
    };

    std::unordered_map<std::string, std::size_t> visited;
    auto visit = [&](Configuration c, std::size_t depth) -> std::optional<std::size_t> {
        std::string key = c.canonical_key();
        if (auto it = visited.find(key); it != visited.end()) return it->second;
        if (result.configurations.size() >= bounds.max_configs) {
            truncate(TruncationReason::max_configs);
            return std::nullopt;
        }
        const std::size_t id = result.configurations.size();
        visited.emplace(std::move(key), id);
        result.configurations.push_back(std::move(c));
        result.depths.push_back(depth);
        result.depth_reached = std::max(result.depth_reached, depth);
        return id;
    };

    std::vector<std::size_t> layer;
    if (auto id = visit(sys.initial, 0)) layer.push_back(*id);

    TransitionOptions topts;
    topts.dedup_by_result = options.dedup_by_result;
    topts.max_transitions = bounds.max_transitions_per_config;

    for (std::size_t depth = 0; !layer.empty(); ++depth) {
        std::vector<std::size_t> to_expand;
        for (std::size_t id : layer) {
            if (is_halting(result.configurations[id])) {
                result.halting.push_back(id);
            } else if (depth >= bounds.max_depth) {
                truncate(TruncationReason::max_depth);
            } else {
                to_expand.push_back(id);
            }
        }

        std::vector<TransitionSet> expanded(to_expand.size());
        parallel_for(to_expand.size(), options.threads, [&](std::size_t i) {
            expanded[i] = enumerate_transitions(result.configurations[to_expand[i]], topts);
        });

        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < to_expand.size(); ++i) {
            const std::size_t from = to_expand[i];
            if (expanded[i].truncated) truncate(TruncationReason::max_transitions);
            for (Transition& tr : expanded[i].transitions) {
                if (options.check_invariants) {
                    auto problems = check_transition_invariants(sys, result.configurations[from], tr.result);
                    if (!problems.empty()) throw InvariantError(problems.front().message);
                }
                const std::size_t before = result.configurations.size();
                auto to = visit(std::move(tr.result), depth + 1);
                if (!to) continue;
                if (result.configurations.size() > before) next.push_back(*to);
                if (options.record_edges) result.edges.push_back(ExplorationEdge{from, *to, std::move(tr.choice)});
            }
        }
        layer = std::move(next);
    }

    std::sort(result.halting.begin(), result.halting.end());
    result.visited_count = result.configurations.size();
    return result;
}

} // namespace memfuzz
