#pragma once

// Exhaustive forward state-space enumeration for small tasks: exact
// cost-to-goal values from a backward Dijkstra sweep, membership tests and
// uniform sampling of reachable states. The ground-truth instrument behind
// the desk-scale experiments.

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "samplan/rng.hpp"
#include "samplan/sas_model.hpp"

namespace samplan {

constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max();

struct EnumerationOverflow : std::runtime_error {
    EnumerationOverflow(std::size_t reached, std::size_t limit)
        : std::runtime_error("state space too large: more than " + std::to_string(limit) +
                             " states (stopped at " + std::to_string(reached) + ")"),
          states_reached(reached) {}
    std::size_t states_reached;
};

struct InvalidPredecessor : std::runtime_error {
    InvalidPredecessor() : std::runtime_error("no reachable state matches the partial state") {}
};

class StateSpace {
public:
    struct Edge {
        std::int32_t target;
        std::int32_t op;
        std::int64_t cost;
    };

    std::size_t size() const { return states_.size(); }
    const PartialState& state(std::size_t index) const { return states_[index]; }
    const std::vector<Edge>& successors(std::size_t index) const { return edges_[index]; }

    bool contains(const PartialState& s) const { return index_.count(s) > 0; }
    std::int32_t index_of(const PartialState& s) const;  // throws TaskError if absent

    std::int64_t perfect_h(std::size_t index) const { return hstar_[index]; }
    std::int64_t perfect_h(const PartialState& s) const { return hstar_[index_of(s)]; }

    std::int64_t dmax() const;          // max finite h*; throws if no goal state
    std::size_t goal_count() const { return num_goal_states_; }
    double mean_hstar() const;          // arithmetic mean over finite h*
    // Histogram of finite h* values, indexed by cost.
    std::vector<std::size_t> hstar_histogram() const;

    // Uniform draw from the reachable states extending filter; throws
    // InvalidPredecessor when none matches.
    const PartialState& random_matching(const PartialState& filter, Rng& rng) const;

private:
    friend StateSpace enumerate_forward(const Task&, std::size_t);

    std::vector<PartialState> states_;
    std::unordered_map<PartialState, std::int32_t, PartialStateHash> index_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<std::int64_t> hstar_;
    std::size_t num_goal_states_ = 0;
    // Per (variable, value) buckets of state indices, for filtered sampling.
    std::vector<std::vector<std::int32_t>> fact_buckets_;
    std::vector<std::int32_t> fact_offsets_;
};

StateSpace enumerate_forward(const Task& task, std::size_t max_states = 1000000);

// Exact cost-to-goal from a single complete state by forward uniform-cost
// search over the task's transition system (not restricted to the FSS of
// the initial state). Returns kUnreachable when no plan exists.
std::int64_t forward_goal_distance(const Task& task, const PartialState& start,
                                   std::size_t max_states = 1000000);

}  // namespace samplan
