#include "samplan/state_space.hpp"

#include <algorithm>
#include <queue>

#include "samplan/transitions.hpp"

namespace samplan {

std::int32_t StateSpace::index_of(const PartialState& s) const {
    const auto it = index_.find(s);
    if (it == index_.end())
        throw TaskError("state is not part of the enumerated forward state space");
    return it->second;
}

std::int64_t StateSpace::dmax() const {
    std::int64_t best = -1;
    for (const std::int64_t h : hstar_)
        if (h != kUnreachable)
            best = std::max(best, h);
    if (best < 0)
        throw TaskError("no state in the forward state space reaches the goal");
    return best;
}

double StateSpace::mean_hstar() const {
    double total = 0.0;
    std::size_t count = 0;
    for (const std::int64_t h : hstar_) {
        if (h != kUnreachable) {
            total += static_cast<double>(h);
            ++count;
        }
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

std::vector<std::size_t> StateSpace::hstar_histogram() const {
    std::vector<std::size_t> histogram;
    for (const std::int64_t h : hstar_) {
        if (h == kUnreachable)
            continue;
        if (static_cast<std::size_t>(h) >= histogram.size())
            histogram.resize(h + 1, 0);
        ++histogram[h];
    }
    return histogram;
}

const PartialState& StateSpace::random_matching(const PartialState& filter, Rng& rng) const {
    // Scan the smallest bucket among the filter's defined facts; with no
    // defined variable every reachable state matches.
    const std::vector<std::int32_t>* bucket = nullptr;
    for (std::size_t var = 0; var < filter.size(); ++var) {
        if (!filter.defined(var))
            continue;
        const auto& candidate = fact_buckets_[fact_offsets_[var] + filter[var]];
        if (bucket == nullptr || candidate.size() < bucket->size())
            bucket = &candidate;
    }
    if (bucket == nullptr) {
        if (states_.empty())
            throw InvalidPredecessor();
        return states_[rng.pick_index(states_.size())];
    }
    std::vector<std::int32_t> matches;
    for (const std::int32_t index : *bucket)
        if (states_[index].extends(filter))
            matches.push_back(index);
    if (matches.empty())
        throw InvalidPredecessor();
    return states_[matches[rng.pick_index(matches.size())]];
}

StateSpace enumerate_forward(const Task& task, std::size_t max_states) {
    StateSpace space;
    space.fact_offsets_ = task.fact_offsets_;
    space.fact_buckets_.resize(num_facts(task));

    space.states_.push_back(task.initial_state);
    space.index_.emplace(task.initial_state, 0);
    space.edges_.emplace_back();

    // Breadth-first closure under progression.
    for (std::size_t current = 0; current < space.states_.size(); ++current) {
        for (std::size_t op_index = 0; op_index < task.operators.size(); ++op_index) {
            const Operator& op = task.operators[op_index];
            if (!applicable(space.states_[current], op))
                continue;
            PartialState next = successor(space.states_[current], op);
            auto [it, inserted] = space.index_.emplace(next, space.states_.size());
            if (inserted) {
                if (space.states_.size() >= max_states) {
                    space.index_.erase(it);
                    throw EnumerationOverflow(space.states_.size() + 1, max_states);
                }
                space.states_.push_back(std::move(next));
                space.edges_.emplace_back();
            }
            space.edges_[current].push_back({it->second, static_cast<std::int32_t>(op_index),
                                             op.cost});
        }
    }

    for (std::size_t var = 0; var < task.num_variables(); ++var)
        for (std::size_t s = 0; s < space.states_.size(); ++s)
            space.fact_buckets_[task.fact_offset(var) + space.states_[s][var]].push_back(
                static_cast<std::int32_t>(s));

    // Backward Dijkstra sweep over reversed edges from all goal states.
    std::vector<std::vector<StateSpace::Edge>> reverse(space.states_.size());
    for (std::size_t from = 0; from < space.states_.size(); ++from)
        for (const StateSpace::Edge& edge : space.edges_[from])
            reverse[edge.target].push_back({static_cast<std::int32_t>(from), edge.op, edge.cost});

    space.hstar_.assign(space.states_.size(), kUnreachable);
    using QueueEntry = std::pair<std::int64_t, std::int32_t>;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    for (std::size_t s = 0; s < space.states_.size(); ++s) {
        if (satisfies_goal(space.states_[s], task.goal)) {
            ++space.num_goal_states_;
            space.hstar_[s] = 0;
            queue.emplace(0, static_cast<std::int32_t>(s));
        }
    }
    while (!queue.empty()) {
        const auto [dist, node] = queue.top();
        queue.pop();
        if (dist > space.hstar_[node])
            continue;
        for (const StateSpace::Edge& edge : reverse[node]) {
            const std::int64_t candidate = dist + edge.cost;
            if (candidate < space.hstar_[edge.target]) {
                space.hstar_[edge.target] = candidate;
                queue.emplace(candidate, edge.target);
            }
        }
    }
    return space;
}

std::int64_t forward_goal_distance(const Task& task, const PartialState& start,
                                   std::size_t max_states) {
    if (!start.complete())
        throw TaskError("forward_goal_distance requires a complete state");
    std::unordered_map<PartialState, std::int64_t, PartialStateHash> distance;
    distance.emplace(start, 0);
    using QueueEntry = std::pair<std::int64_t, PartialState>;
    auto compare = [](const QueueEntry& a, const QueueEntry& b) { return a.first > b.first; };
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, decltype(compare)> queue(compare);
    queue.emplace(0, start);
    while (!queue.empty()) {
        auto [dist, state] = queue.top();
        queue.pop();
        const auto it = distance.find(state);
        if (it != distance.end() && dist > it->second)
            continue;
        if (satisfies_goal(state, task.goal))
            return dist;
        for (const Operator& op : task.operators) {
            if (!applicable(state, op))
                continue;
            PartialState next = successor(state, op);
            const std::int64_t candidate = dist + op.cost;
            auto [entry, inserted] = distance.emplace(next, candidate);
            if (!inserted) {
                if (candidate >= entry->second)
                    continue;
                entry->second = candidate;
            } else if (distance.size() > max_states) {
                throw EnumerationOverflow(distance.size(), max_states);
            }
            queue.emplace(candidate, std::move(next));
        }
    }
    return kUnreachable;
}

}  // namespace samplan
