#include "samplan/sampler.hpp"

#include <cmath>
#include <deque>
#include <unordered_set>

#include "samplan/rng.hpp"
#include "samplan/transitions.hpp"

namespace samplan {

namespace {

using StateSet = std::unordered_set<PartialState, PartialStateHash>;

struct Candidate {
    PartialState state;
    std::int64_t cost;
};

// All usable regression steps from s: backward-applicable operators whose
// predecessors survive the optional mutex filter.
std::vector<Candidate> regression_candidates(const Task& task, const PartialState& s,
                                             bool use_mutex) {
    std::vector<Candidate> result;
    for (const Operator& op : task.operators) {
        if (!backward_applicable(s, op))
            continue;
        PartialState pred = predecessor(s, op);
        if (use_mutex && violates_mutex(pred, task.mutexes))
            continue;
        result.push_back({std::move(pred), op.cost});
    }
    return result;
}

SampleSetMeta make_meta(const Task& task, const SamplerOptions& options,
                        SamplerAlgorithm algorithm) {
    SampleSetMeta meta;
    meta.task_id = task.name.empty() ? "unnamed" : task.name;
    meta.algorithm = algorithm_name(algorithm);
    meta.requested = options.num_samples;
    meta.limit = options.limit;
    meta.pfsm = options.pfsm;
    meta.seed = options.seed;
    meta.use_mutex = options.use_mutex;
    meta.goal_reset = options.goal_reset;
    meta.num_variables = task.num_variables();
    return meta;
}

void check_options(const Task& task, const SamplerOptions& options) {
    if (options.num_samples < 1)
        throw SamplerError("number of samples must be at least 1");
    if (options.limit.resolved < 1)
        throw SamplerError("regression limit must be at least 1");
    if (regression_candidates(task, task.goal, options.use_mutex).empty())
        throw SamplerError("goal has no predecessors");
}

}  // namespace

RegressionLimit resolve_limit(const Task& task, LimitKind kind, std::int64_t fixed_value) {
    RegressionLimit limit;
    limit.kind = kind;
    switch (kind) {
    case LimitKind::kFixed:
        if (fixed_value < 1)
            throw SamplerError("fixed regression limit must be at least 1");
        limit.resolved = fixed_value;
        break;
    case LimitKind::kFacts:
        limit.resolved = num_facts(task);
        break;
    case LimitKind::kFactsPerMeanEffect:
        limit.resolved = static_cast<std::int64_t>(
            std::ceil(static_cast<double>(num_facts(task)) / mean_effect_size(task)));
        break;
    }
    return limit;
}

LimitKind parse_limit_kind(const std::string& text, std::int64_t* fixed_value) {
    if (text == "facts")
        return LimitKind::kFacts;
    if (text == "facts-per-effect")
        return LimitKind::kFactsPerMeanEffect;
    if (text.rfind("fixed:", 0) == 0) {
        *fixed_value = std::stoll(text.substr(6));
        return LimitKind::kFixed;
    }
    throw SamplerError("unknown limit '" + text + "' (use fixed:<L>, facts, facts-per-effect)");
}

std::string limit_kind_name(LimitKind kind) {
    switch (kind) {
    case LimitKind::kFixed: return "fixed";
    case LimitKind::kFacts: return "facts";
    case LimitKind::kFactsPerMeanEffect: return "facts-per-effect";
    }
    return "?";
}

std::string algorithm_name(SamplerAlgorithm algorithm) {
    switch (algorithm) {
    case SamplerAlgorithm::kRw: return "rw";
    case SamplerAlgorithm::kBfs: return "bfs";
    case SamplerAlgorithm::kDfs: return "dfs";
    case SamplerAlgorithm::kFsm: return "fsm";
    }
    return "?";
}

SamplerAlgorithm parse_algorithm(const std::string& text) {
    if (text == "rw")
        return SamplerAlgorithm::kRw;
    if (text == "bfs")
        return SamplerAlgorithm::kBfs;
    if (text == "dfs")
        return SamplerAlgorithm::kDfs;
    if (text == "fsm")
        return SamplerAlgorithm::kFsm;
    throw SamplerError("unknown sampling algorithm '" + text + "'");
}

SampleSet sample_rw(const Task& task, const SamplerOptions& options) {
    check_options(task, options);
    SampleSet set;
    set.meta = make_meta(task, options, SamplerAlgorithm::kRw);
    Rng rng(options.seed);

    while (set.samples.size() < options.num_samples) {
        // One rollout from the goal; repeated partial states are discarded
        // within the rollout so it never cycles.
        PartialState current = task.goal;
        std::int64_t h = 0;
        StateSet path{current};
        for (std::int64_t depth = 0; depth < options.limit.resolved; ++depth) {
            std::vector<Candidate> candidates =
                regression_candidates(task, current, options.use_mutex);
            std::erase_if(candidates,
                          [&path](const Candidate& c) { return path.count(c.state) > 0; });
            if (candidates.empty())
                break;
            Candidate& chosen = candidates[rng.pick_index(candidates.size())];
            h += chosen.cost;
            current = std::move(chosen.state);
            if (options.goal_reset && satisfies_goal(current, task.goal))
                h = 0;
            path.insert(current);
            set.samples.push_back({current, h, SampleOrigin::kRw});
            if (set.samples.size() == options.num_samples)
                break;
        }
    }
    return set;
}

SampleSet sample_bfs_dfs(const Task& task, const SamplerOptions& options, bool depth_first) {
    check_options(task, options);
    SampleSet set;
    set.meta = make_meta(task, options,
                         depth_first ? SamplerAlgorithm::kDfs : SamplerAlgorithm::kBfs);
    Rng rng(options.seed);
    const SampleOrigin origin = depth_first ? SampleOrigin::kDfs : SampleOrigin::kBfs;

    struct Node {
        PartialState state;
        std::int64_t h;
        std::int64_t depth;
    };
    std::deque<Node> frontier;
    StateSet seen{task.goal};
    frontier.push_back({task.goal, 0, 0});

    while (!frontier.empty() && set.samples.size() < options.num_samples) {
        Node node;
        if (depth_first) {
            node = std::move(frontier.back());
            frontier.pop_back();
        } else {
            node = std::move(frontier.front());
            frontier.pop_front();
        }
        set.samples.push_back({node.state, node.h, origin});
        if (set.samples.size() == options.num_samples)
            break;
        if (node.depth >= options.limit.resolved)
            continue;  // at the depth limit: backtrack, do not expand
        std::vector<Candidate> candidates =
            regression_candidates(task, node.state, options.use_mutex);
        rng.shuffle(candidates);
        for (Candidate& candidate : candidates) {
            if (!seen.insert(candidate.state).second)
                continue;
            std::int64_t h = node.h + candidate.cost;
            if (options.goal_reset && satisfies_goal(candidate.state, task.goal))
                h = 0;
            frontier.push_back({std::move(candidate.state), h, node.depth + 1});
        }
    }
    set.meta.short_set = set.samples.size() < options.num_samples;
    return set;
}

SampleSet sample_fsm(const Task& task, const SamplerOptions& options) {
    if (options.pfsm <= 0.0 || options.pfsm >= 1.0)
        throw SamplerError("FSM requires 0 < pfsm < 1");
    if (options.num_samples < 2)
        throw SamplerError("FSM requires at least 2 samples");
    check_options(task, options);

    SampleSet set;
    set.meta = make_meta(task, options, SamplerAlgorithm::kFsm);
    Rng rng(options.seed);

    const std::size_t budget =
        static_cast<std::size_t>(options.pfsm * static_cast<double>(options.num_samples));
    if (budget < 1)
        throw SamplerError("FSM breadth-first budget floor(pfsm*N) is zero");

    // Phase 1: breadth-first regression from the goal. The goal seeds the
    // sample set with h = 0; an expansion's children are sampled all at once
    // or not at all, so the phase never exceeds its budget.
    struct Node {
        PartialState state;
        std::int64_t h;
        std::int64_t depth;
        bool expanded = false;
    };
    std::vector<Node> phase1;
    StateSet phase1_states{task.goal};
    phase1.push_back({task.goal, 0, 0, false});
    set.samples.push_back({task.goal, 0, SampleOrigin::kBfsPhase});

    for (std::size_t next = 0; next < phase1.size() && set.samples.size() < budget; ++next) {
        if (phase1[next].depth >= options.limit.resolved)
            continue;
        std::vector<Candidate> candidates =
            regression_candidates(task, phase1[next].state, options.use_mutex);
        std::erase_if(candidates, [&phase1_states](const Candidate& c) {
            return phase1_states.count(c.state) > 0;
        });
        rng.shuffle(candidates);
        if (candidates.empty()) {
            phase1[next].expanded = true;
            continue;
        }
        if (set.samples.size() + candidates.size() > budget)
            continue;  // would overflow the budget: leave unexpanded, try the next state
        phase1[next].expanded = true;
        for (Candidate& candidate : candidates) {
            std::int64_t h = phase1[next].h + candidate.cost;
            if (options.goal_reset && satisfies_goal(candidate.state, task.goal))
                h = 0;
            phase1_states.insert(candidate.state);
            set.samples.push_back({candidate.state, h, SampleOrigin::kBfsPhase});
            phase1.push_back({std::move(candidate.state), h, phase1[next].depth + 1, false});
        }
    }

    // Phase 2: random-walk rollouts seeded at the unexpanded phase-1 states,
    // drawn without replacement per epoch. States sampled in phase 1 are
    // walked through but never re-added.
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < phase1.size(); ++i)
        if (!phase1[i].expanded)
            pool.push_back(i);
    if (pool.empty()) {
        if (phase1.size() == 1)
            throw SamplerError("goal has no predecessors");
        set.meta.short_set = set.samples.size() < options.num_samples;
        return set;  // backward space exhausted within the BFS budget
    }

    std::size_t cursor = pool.size();  // forces a shuffle on first use
    bool epoch_progress = true;
    while (set.samples.size() < options.num_samples) {
        if (cursor == pool.size()) {
            if (!epoch_progress)
                break;  // a full epoch added nothing: no reachable new states
            rng.shuffle(pool);
            cursor = 0;
            epoch_progress = false;
        }
        const Node& seed = phase1[pool[cursor++]];
        PartialState current = seed.state;
        std::int64_t h = seed.h;
        StateSet path{current};
        for (std::int64_t depth = seed.depth; depth < options.limit.resolved; ++depth) {
            std::vector<Candidate> candidates =
                regression_candidates(task, current, options.use_mutex);
            std::erase_if(candidates,
                          [&path](const Candidate& c) { return path.count(c.state) > 0; });
            if (candidates.empty())
                break;
            Candidate& chosen = candidates[rng.pick_index(candidates.size())];
            h += chosen.cost;
            current = std::move(chosen.state);
            if (options.goal_reset && satisfies_goal(current, task.goal))
                h = 0;
            path.insert(current);
            if (phase1_states.count(current) == 0) {
                set.samples.push_back({current, h, SampleOrigin::kRw});
                epoch_progress = true;
                if (set.samples.size() == options.num_samples)
                    break;
            }
        }
    }
    set.meta.short_set = set.samples.size() < options.num_samples;
    return set;
}

SampleSet generate_samples(const Task& task, SamplerAlgorithm algorithm,
                           const SamplerOptions& options) {
    switch (algorithm) {
    case SamplerAlgorithm::kRw: return sample_rw(task, options);
    case SamplerAlgorithm::kBfs: return sample_bfs_dfs(task, options, false);
    case SamplerAlgorithm::kDfs: return sample_bfs_dfs(task, options, true);
    case SamplerAlgorithm::kFsm: return sample_fsm(task, options);
    }
    throw SamplerError("unknown sampling algorithm");
}

}  // namespace samplan
