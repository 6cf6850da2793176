#include "samplan/search.hpp"

#include <chrono>
#include <queue>
#include <unordered_map>

#include "samplan/transitions.hpp"

namespace samplan {

std::int64_t goal_count(const Task& task, const PartialState& s) {
    std::int64_t count = 0;
    for (std::size_t var = 0; var < task.num_variables(); ++var)
        if (task.goal.defined(var) && s[var] != task.goal[var])
            ++count;
    return count;
}

Heuristic Heuristic::learned(const Model* model) {
    Heuristic h;
    h.kind_ = Kind::kLearned;
    h.model_ = model;
    return h;
}

Heuristic Heuristic::goal_count_of(const Task*) {
    Heuristic h;
    h.kind_ = Kind::kGoalCount;
    return h;
}

Heuristic Heuristic::perfect(const StateSpace* oracle) {
    Heuristic h;
    h.kind_ = Kind::kPerfect;
    h.oracle_ = oracle;
    return h;
}

Heuristic Heuristic::blind() {
    return Heuristic{};
}

double Heuristic::evaluate(const Task& task, const PartialState& s) const {
    switch (kind_) {
    case Kind::kBlind:
        return 0.0;
    case Kind::kGoalCount:
        return static_cast<double>(goal_count(task, s));
    case Kind::kPerfect: {
        if (!oracle_->contains(s))
            return kInfiniteH;
        const std::int64_t h = oracle_->perfect_h(s);
        return h == kUnreachable ? kInfiniteH : static_cast<double>(h);
    }
    case Kind::kLearned:
        return model_->predict(encode_state(task, s));
    }
    return 0.0;
}

std::string status_name(SearchStatus status) {
    switch (status) {
    case SearchStatus::kSolved: return "SOLVED";
    case SearchStatus::kExhausted: return "EXHAUSTED";
    case SearchStatus::kTimeout: return "TIMEOUT";
    case SearchStatus::kMemory: return "MEMORY";
    }
    return "?";
}

namespace {

struct Node {
    PartialState state;
    std::int32_t parent;  // node index, -1 for the start
    std::int32_t op;      // operator that generated this node
};

struct OpenEntry {
    double h;
    std::uint64_t order;
    std::int32_t node;
    bool operator>(const OpenEntry& other) const {
        if (h != other.h)
            return h > other.h;
        return order > other.order;  // FIFO: earlier generation first
    }
};

}  // namespace

SearchResult gbfs(const Task& task, const PartialState& start, const Heuristic& heuristic,
                  const SearchLimits& limits) {
    if (!start.complete())
        throw TaskError("gbfs requires a complete initial state");
    const auto start_time = std::chrono::steady_clock::now();
    auto elapsed = [&start_time]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
            .count();
    };

    SearchResult result;
    std::vector<Node> nodes;
    std::unordered_map<PartialState, std::int32_t, PartialStateHash> seen;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

    // Rough per-node accounting against the memory budget.
    const std::uint64_t node_bytes = start.size() * sizeof(std::int32_t) + 96;
    const std::uint64_t node_budget = limits.max_memory_mb * 1024 * 1024 / node_bytes;

    nodes.push_back({start, -1, -1});
    seen.emplace(start, 0);
    open.push({heuristic.evaluate(task, start), 0, 0});
    std::uint64_t order_counter = 0;
    result.generated = 1;

    while (!open.empty()) {
        if (limits.max_seconds > 0.0 && (result.expanded & 0xff) == 0 &&
            elapsed() > limits.max_seconds) {
            result.status = SearchStatus::kTimeout;
            break;
        }
        const OpenEntry entry = open.top();
        open.pop();
        const PartialState current = nodes[entry.node].state;
        ++result.expanded;

        if (satisfies_goal(current, task.goal)) {
            result.status = SearchStatus::kSolved;
            for (std::int32_t node = entry.node; nodes[node].parent >= 0;
                 node = nodes[node].parent) {
                result.plan.push_back(nodes[node].op);
                result.plan_cost += task.operators[nodes[node].op].cost;
            }
            std::reverse(result.plan.begin(), result.plan.end());
            break;
        }
        if (limits.max_expansions > 0 && result.expanded >= limits.max_expansions) {
            result.status = SearchStatus::kTimeout;
            break;
        }

        for (std::size_t op_index = 0; op_index < task.operators.size(); ++op_index) {
            const Operator& op = task.operators[op_index];
            if (!applicable(current, op))
                continue;
            PartialState next = successor(current, op);
            auto [it, inserted] = seen.emplace(next, static_cast<std::int32_t>(nodes.size()));
            if (!inserted)
                continue;  // reopening is disabled
            const double h = heuristic.evaluate(task, next);
            if (h == kInfiniteH) {
                seen.erase(it);
                continue;
            }
            nodes.push_back({std::move(next), entry.node, static_cast<std::int32_t>(op_index)});
            ++result.generated;
            open.push({h, ++order_counter, it->second});
        }
        if (nodes.size() > node_budget) {
            result.status = SearchStatus::kMemory;
            break;
        }
    }
    result.seconds = elapsed();
    return result;
}

bool validate_plan(const Task& task, const PartialState& start,
                   const std::vector<std::int32_t>& plan) {
    PartialState state = start;
    for (const std::int32_t op_index : plan) {
        if (op_index < 0 || static_cast<std::size_t>(op_index) >= task.operators.size())
            return false;
        const Operator& op = task.operators[op_index];
        if (!applicable(state, op))
            return false;
        state = successor(state, op);
    }
    return satisfies_goal(state, task.goal);
}

}  // namespace samplan
