#include "samplan/refinery.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "samplan/fact_trie.hpp"
#include "samplan/transitions.hpp"

namespace samplan {

namespace {

using StateIndexMap = std::unordered_map<PartialState, std::int64_t, PartialStateHash>;

// Strict applicability for graph construction: a precondition on a variable
// undefined in s makes the operator inapplicable, and effects must change
// something defined or add a defined variable (always true).
bool strictly_applicable(const PartialState& s, const Operator& op) {
    for (std::size_t var = 0; var < s.size(); ++var)
        if (op.pre.defined(var) && (!s.defined(var) || s[var] != op.pre[var]))
            return false;
    return true;
}

}  // namespace

void sai(std::vector<Sample>& samples) {
    StateIndexMap best;
    for (const Sample& sample : samples) {
        auto [it, inserted] = best.emplace(sample.state, sample.h);
        if (!inserted)
            it->second = std::min(it->second, sample.h);
    }
    for (Sample& sample : samples)
        sample.h = best.at(sample.state);
}

SuccessorGraph build_successor_graph(const std::vector<Sample>& samples, const Task& task) {
    FactTrie trie(task.num_variables());
    for (std::size_t i = 0; i < samples.size(); ++i)
        trie.insert(samples[i].state, static_cast<std::int32_t>(i));

    SuccessorGraph graph;
    std::unordered_map<std::uint64_t, std::size_t> arc_index;
    std::vector<std::int32_t> hits;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (const Operator& op : task.operators) {
            if (!strictly_applicable(samples[i].state, op))
                continue;
            PartialState succ = samples[i].state;
            for (std::size_t var = 0; var < succ.size(); ++var)
                if (op.eff.defined(var))
                    succ.assign(var, op.eff[var]);
            hits.clear();
            trie.collect_subsuming(succ, hits);
            for (const std::int32_t j : hits) {
                if (static_cast<std::size_t>(j) == i)
                    continue;
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
                auto [it, inserted] = arc_index.emplace(key, graph.arcs.size());
                if (inserted)
                    graph.arcs.push_back({static_cast<std::int32_t>(i), j, op.cost});
                else
                    graph.arcs[it->second].weight =
                        std::min(graph.arcs[it->second].weight, op.cost);
            }
        }
    }
    return graph;
}

int relax_to_fixpoint(std::vector<Sample>& samples, const SuccessorGraph& graph) {
    int passes = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        ++passes;
        for (const SuccessorGraph::Arc& arc : graph.arcs) {
            const std::int64_t candidate = samples[arc.to].h + arc.weight;
            if (candidate < samples[arc.from].h) {
                samples[arc.from].h = candidate;
                changed = true;
            }
        }
    }
    return passes;
}

void sui(std::vector<Sample>& samples, const Task& task) {
    const SuccessorGraph graph = build_successor_graph(samples, task);
    relax_to_fixpoint(samples, graph);
}

CompletionStrategy parse_completion(const std::string& text) {
    if (text == "random")
        return CompletionStrategy::kRandom;
    if (text == "mutex")
        return CompletionStrategy::kMutex;
    if (text == "fss")
        return CompletionStrategy::kFss;
    throw TaskError("unknown completion strategy '" + text + "' (use random, mutex, fss)");
}

std::string completion_name(CompletionStrategy strategy) {
    switch (strategy) {
    case CompletionStrategy::kRandom: return "random";
    case CompletionStrategy::kMutex: return "mutex";
    case CompletionStrategy::kFss: return "fss";
    }
    return "?";
}

namespace {

void complete_random(PartialState& state, const Task& task, Rng& rng) {
    for (std::size_t var = 0; var < state.size(); ++var)
        if (!state.defined(var))
            state.assign(var, static_cast<std::int32_t>(
                                  rng.pick_index(task.variables[var].domain_size())));
}

// One attempt: undefined variables in random order, each assigned a random
// value that keeps every mutex group at no more than one true fact.
bool try_mutex_completion(PartialState& state, const Task& task, Rng& rng) {
    std::vector<std::size_t> undefined_vars;
    for (std::size_t var = 0; var < state.size(); ++var)
        if (!state.defined(var))
            undefined_vars.push_back(var);
    rng.shuffle(undefined_vars);
    std::vector<std::int32_t> allowed;
    for (const std::size_t var : undefined_vars) {
        allowed.clear();
        for (std::int32_t value = 0; value < task.variables[var].domain_size(); ++value) {
            state.assign(var, value);
            if (!violates_mutex(state, task.mutexes))
                allowed.push_back(value);
        }
        if (allowed.empty()) {
            state.clear(var);
            return false;
        }
        state.assign(var, allowed[rng.pick_index(allowed.size())]);
    }
    return true;
}

}  // namespace

bool complete_state(Sample& sample, CompletionStrategy strategy, const Task& task,
                    const StateSpace* oracle, Rng& rng) {
    if (sample.state.complete())
        return true;
    switch (strategy) {
    case CompletionStrategy::kRandom:
        complete_random(sample.state, task, rng);
        return true;
    case CompletionStrategy::kMutex: {
        for (int attempt = 0; attempt < kMutexCompletionAttempts; ++attempt) {
            PartialState candidate = sample.state;
            if (try_mutex_completion(candidate, task, rng)) {
                sample.state = std::move(candidate);
                return true;
            }
        }
        return true;  // documented fallback: keep the partial state as-is
    }
    case CompletionStrategy::kFss: {
        if (oracle == nullptr)
            throw TaskError("FSS completion requires an enumerated state space");
        try {
            sample.state = oracle->random_matching(sample.state, rng);
            return true;
        } catch (const InvalidPredecessor&) {
            return false;
        }
    }
    }
    return true;
}

void add_random_samples(std::vector<Sample>& samples, double rho, std::size_t total,
                        const Task& task, std::int64_t limit, Rng& rng) {
    if (rho < 0.0 || rho > 1.0)
        throw TaskError("random-sample fraction must be in [0, 1]");
    const std::size_t count = static_cast<std::size_t>(
        std::floor(rho * static_cast<double>(total) + 0.5));
    if (count == 0)
        return;

    std::int64_t fallback_h;
    if (rho == 1.0) {
        fallback_h = limit + 1;
    } else {
        std::int64_t max_h = 0;
        for (const Sample& sample : samples)
            max_h = std::max(max_h, sample.h);
        fallback_h = max_h + 1;
    }

    // Duplicate detection against the existing (completed) samples; the
    // minimum is taken if an identical state occurs with several estimates.
    StateIndexMap existing;
    for (const Sample& sample : samples) {
        auto [it, inserted] = existing.emplace(sample.state, sample.h);
        if (!inserted)
            it->second = std::min(it->second, sample.h);
    }

    for (std::size_t k = 0; k < count; ++k) {
        Sample random_sample;
        random_sample.state = PartialState(task.num_variables());
        random_sample.origin = SampleOrigin::kRandom;
        complete_state(random_sample, CompletionStrategy::kMutex, task, nullptr, rng);
        const auto it = existing.find(random_sample.state);
        random_sample.h = it != existing.end() ? it->second : fallback_h;
        samples.push_back(std::move(random_sample));
    }
}

SampleSet build_training_set(const Task& task, const PipelineConfig& config,
                             const StateSpace* oracle) {
    const std::size_t random_count = static_cast<std::size_t>(
        std::floor(config.refine.random_fraction * static_cast<double>(config.num_samples) + 0.5));
    if (random_count > config.num_samples)
        throw TaskError("random-sample fraction exceeds the sample budget");
    const std::size_t regression_count = config.num_samples - random_count;

    SamplerOptions options;
    options.num_samples = regression_count;
    options.limit = resolve_limit(task, config.limit_kind, config.fixed_limit);
    options.use_mutex = config.use_mutex;
    options.goal_reset = config.goal_reset;
    options.pfsm = config.pfsm;
    options.seed = seed_stream(config.seed, "sample");

    SampleSet set;
    if (regression_count > 0) {
        set = generate_samples(task, config.algorithm, options);
    } else {
        set.meta = SampleSetMeta{};
        set.meta.task_id = task.name.empty() ? "unnamed" : task.name;
        set.meta.algorithm = algorithm_name(config.algorithm);
        set.meta.limit = options.limit;
        set.meta.num_variables = task.num_variables();
        set.meta.seed = options.seed;
    }
    set.meta.requested = config.num_samples;

    if (config.refine.use_sai)
        sai(set.samples);
    if (config.refine.use_sui)
        sui(set.samples, task);

    Rng completion_rng(seed_stream(config.seed, "complete"));
    std::vector<Sample> completed;
    completed.reserve(set.samples.size());
    for (Sample& sample : set.samples) {
        if (complete_state(sample, config.refine.completion, task, oracle, completion_rng))
            completed.push_back(std::move(sample));
        else
            ++set.meta.dropped_invalid;
    }
    set.samples = std::move(completed);

    Rng random_rng(seed_stream(config.seed, "random"));
    add_random_samples(set.samples, config.refine.random_fraction, config.num_samples, task,
                       options.limit.resolved, random_rng);

    // SAI runs on the complete states only if it was applied before.
    if (config.refine.use_sai)
        sai(set.samples);
    return set;
}

}  // namespace samplan
