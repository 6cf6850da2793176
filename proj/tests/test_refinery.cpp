#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "samplan/fact_trie.hpp"
#include "samplan/refinery.hpp"
#include "samplan/transitions.hpp"
#include "support/reference_search.hpp"
#include "support/reference_sui.hpp"
#include "support/test_tasks.hpp"

using namespace samplan;
using namespace samplan::testing;

namespace {

PartialState random_partial_state(const Task& task, Rng& rng, double undefined_probability) {
    PartialState state(task.num_variables());
    for (std::size_t var = 0; var < task.num_variables(); ++var)
        if (rng.uniform01() >= undefined_probability)
            state.assign(var, static_cast<std::int32_t>(
                                  rng.pick_index(task.variables[var].domain_size())));
    return state;
}

}  // namespace

TEST_CASE("sai minimizes over identical states and keeps order") {
    const PartialState s = complete({0, 0});
    const PartialState t = complete({1, 0});
    std::vector<Sample> samples{{s, 5, SampleOrigin::kRw},
                                {s, 3, SampleOrigin::kRw},
                                {t, 2, SampleOrigin::kRw}};
    sai(samples);
    CHECK(samples[0].h == 3);
    CHECK(samples[1].h == 3);
    CHECK(samples[2].h == 2);
    CHECK(samples[0].state == s);
    CHECK(samples.size() == 3);
}

TEST_CASE("sai leaves all-distinct sets unchanged and is idempotent") {
    const Task task = load_task(task_path("gripper4"));
    Rng rng(4);
    std::vector<Sample> samples;
    std::unordered_set<PartialState, PartialStateHash> used;
    while (samples.size() < 50) {
        PartialState state = random_partial_state(task, rng, 0.3);
        if (!used.insert(state).second)
            continue;
        samples.push_back({std::move(state), rng.uniform_int(0, 40), SampleOrigin::kRw});
    }
    std::vector<Sample> copy = samples;
    sai(copy);
    for (std::size_t i = 0; i < samples.size(); ++i)
        CHECK(copy[i].h == samples[i].h);

    // idempotence on a set with duplicates
    std::vector<Sample> dup = samples;
    dup.insert(dup.end(), samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i)
        dup[i].h += 3;
    std::vector<Sample> once = dup;
    sai(once);
    std::vector<Sample> twice = once;
    sai(twice);
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].h == twice[i].h);
        CHECK(once[i].h <= dup[i].h);  // monotone non-increasing
    }
}

TEST_CASE("sui relaxes the toy3 two-node graph to the goal distance") {
    const Task task = toy3();
    std::vector<Sample> samples{{partial(2, {{0, 0}}), 9, SampleOrigin::kRw},
                                {partial(2, {{0, 1}}), 0, SampleOrigin::kRw}};
    sui(samples, task);
    CHECK(samples[0].h == 1);
    CHECK(samples[1].h == 0);
}

TEST_CASE("sui leaves unconnected samples unchanged") {
    const Task task = toy3();
    // op1 needs A defined; a lone B-state has no strictly applicable operator
    // whose successor lands in another sample
    std::vector<Sample> samples{{partial(2, {{1, 1}}), 7, SampleOrigin::kRw}};
    sui(samples, task);
    CHECK(samples[0].h == 7);
}

TEST_CASE("sui uses strict applicability: undefined precondition blocks arcs") {
    const Task task = toy3();
    // {B=b1} would regress-apply op1, but strictly op1 needs A defined
    std::vector<Sample> samples{{partial(2, {{1, 0}}), 9, SampleOrigin::kRw},
                                {partial(2, {{1, 1}}), 0, SampleOrigin::kRw}};
    sui(samples, task);
    CHECK(samples[0].h == 1);  // op2 applies: B=b0 -> B=b1
    std::vector<Sample> blocked{{partial(2, {{0, 0}, {1, 1}}), 9, SampleOrigin::kRw},
                                {partial(2, {{0, 1}}), 0, SampleOrigin::kRw}};
    sui(blocked, task);
    CHECK(blocked[0].h == 1);  // op1 applies, successor {A=a1,B=b1} is subsumed by {A=a1}
}

TEST_CASE("fact trie returns exactly the brute-force superset matches") {
    const Task task = load_task(task_path("gripper4"));
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<PartialState> stored;
        FactTrie trie(task.num_variables());
        for (int i = 0; i < 60; ++i) {
            stored.push_back(random_partial_state(task, rng, 0.4));
            trie.insert(stored.back(), i);
        }
        for (int q = 0; q < 10; ++q) {
            const PartialState query = random_partial_state(task, rng, q % 2 == 0 ? 0.0 : 0.3);
            std::vector<std::int32_t> hits;
            trie.collect_subsuming(query, hits);
            std::sort(hits.begin(), hits.end());
            std::vector<std::int32_t> expected;
            for (std::size_t i = 0; i < stored.size(); ++i)
                if (subsumes(stored[i], query))
                    expected.push_back(static_cast<std::int32_t>(i));
            CHECK(hits == expected);
        }
    }
}

TEST_CASE("sui equals the quadratic reference on randomized inputs") {
    const Task gripper = load_task(task_path("gripper4"));
    const Task puzzle = load_task(task_path("puzzle6"));
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Task& task = trial % 2 == 0 ? gripper : puzzle;
        std::vector<Sample> samples;
        for (int i = 0; i < 40; ++i)
            samples.push_back({random_partial_state(task, rng, 0.35),
                               rng.uniform_int(0, 60), SampleOrigin::kRw});
        const std::vector<std::int64_t> expected = brute_force_sui(samples, task);
        sui(samples, task);
        for (std::size_t i = 0; i < samples.size(); ++i)
            CHECK(samples[i].h == expected[i]);
    }
}

TEST_CASE("sui reaches a fixpoint, never increases, and keeps Property 1") {
    const Task task = load_task(task_path("gripper4"));
    SamplerOptions options;
    options.num_samples = 400;
    options.limit = resolve_limit(task, LimitKind::kFactsPerMeanEffect);
    options.seed = 8;
    SampleSet set = sample_rw(task, options);
    std::vector<std::int64_t> before;
    for (const Sample& sample : set.samples)
        before.push_back(sample.h);

    const SuccessorGraph graph = build_successor_graph(set.samples, task);
    sui(set.samples, task);
    for (std::size_t i = 0; i < set.samples.size(); ++i)
        CHECK(set.samples[i].h <= before[i]);
    for (const SuccessorGraph::Arc& arc : graph.arcs)
        CHECK(set.samples[arc.from].h <= set.samples[arc.to].h + arc.weight);

    GoalDistanceMemo distance(task);
    Rng rng(9);
    for (const Sample& sample : set.samples) {
        Sample completed = sample;
        complete_state(completed, CompletionStrategy::kMutex, task, nullptr, rng);
        if (!completed.state.complete())
            continue;
        const std::int64_t exact = distance(completed.state);
        REQUIRE(exact != kNoPlan);
        CHECK(exact <= sample.h);
    }
}

TEST_CASE("complete_state strategies") {
    const Task task = load_task(task_path("gripper4"));
    Rng rng(14);
    SUBCASE("random fills every variable") {
        Sample sample{random_partial_state(task, rng, 0.5), 3, SampleOrigin::kRw};
        CHECK(complete_state(sample, CompletionStrategy::kRandom, task, nullptr, rng));
        CHECK(sample.state.complete());
    }
    SUBCASE("already complete states pass through unchanged") {
        PartialState state = task.initial_state;
        Sample sample{state, 2, SampleOrigin::kRw};
        for (const CompletionStrategy strategy :
             {CompletionStrategy::kRandom, CompletionStrategy::kMutex}) {
            Sample copy = sample;
            CHECK(complete_state(copy, strategy, task, nullptr, rng));
            CHECK(copy.state == state);
        }
    }
    SUBCASE("mutex completion never violates a group") {
        for (int trial = 0; trial < 300; ++trial) {
            Sample sample{random_partial_state(task, rng, 0.6), 1, SampleOrigin::kRw};
            if (violates_mutex(sample.state, task.mutexes))
                continue;
            CHECK(complete_state(sample, CompletionStrategy::kMutex, task, nullptr, rng));
            CHECK(sample.state.complete());
            CHECK(!violates_mutex(sample.state, task.mutexes));
        }
    }
    SUBCASE("the only non-violating completion is forced") {
        // left gripper holds ball1: free(left) must complete to busy
        PartialState state(task.num_variables());
        state.assign(1, 2);  // ball1 in the left gripper
        for (int trial = 0; trial < 50; ++trial) {
            Sample sample{state, 1, SampleOrigin::kRw};
            CHECK(complete_state(sample, CompletionStrategy::kMutex, task, nullptr, rng));
            CHECK(sample.state[5] == 1);  // free(left) = false
        }
    }
    SUBCASE("fss completion samples reachable states or signals invalidity") {
        const StateSpace space = enumerate_forward(task);
        Sample sample{random_partial_state(task, rng, 0.7), 2, SampleOrigin::kRw};
        const bool ok = complete_state(sample, CompletionStrategy::kFss, task, &space, rng);
        if (ok)
            CHECK(space.contains(sample.state));
        PartialState impossible(task.num_variables());
        impossible.assign(1, 2);
        impossible.assign(2, 2);  // two balls in the left gripper is unreachable
        Sample bad{impossible, 2, SampleOrigin::kRw};
        CHECK(!complete_state(bad, CompletionStrategy::kFss, task, &space, rng));
    }
}

TEST_CASE("add_random_samples follows the h assignment rules") {
    const Task task = load_task(task_path("gripper4"));
    Rng rng(25);
    SUBCASE("fraction 0.2 of 10 adds two samples at max+1") {
        std::vector<Sample> samples;
        for (int i = 0; i < 8; ++i) {
            Sample sample{random_partial_state(task, rng, 0.4), i, SampleOrigin::kRw};
            complete_state(sample, CompletionStrategy::kMutex, task, nullptr, rng);
            samples.push_back(std::move(sample));
        }
        samples.back().h = 7;
        add_random_samples(samples, 0.2, 10, task, 12, rng);
        REQUIRE(samples.size() == 10);
        std::unordered_map<PartialState, std::int64_t, PartialStateHash> existing;
        for (std::size_t i = 0; i < 8; ++i) {
            auto [it, inserted] = existing.emplace(samples[i].state, samples[i].h);
            if (!inserted)
                it->second = std::min(it->second, samples[i].h);
        }
        for (std::size_t i = 8; i < 10; ++i) {
            CHECK(samples[i].origin == SampleOrigin::kRandom);
            const auto it = existing.find(samples[i].state);
            if (it == existing.end())
                CHECK(samples[i].h == 8);
            else
                CHECK(samples[i].h == it->second);
        }
    }
    SUBCASE("fraction 0 is the identity") {
        std::vector<Sample> samples{{task.initial_state, 4, SampleOrigin::kRw}};
        add_random_samples(samples, 0.0, 10, task, 12, rng);
        CHECK(samples.size() == 1);
    }
    SUBCASE("fraction 1 assigns limit+1 everywhere") {
        std::vector<Sample> samples;
        add_random_samples(samples, 1.0, 10, task, 4, rng);
        REQUIRE(samples.size() == 10);
        for (const Sample& sample : samples)
            CHECK(sample.h == 5);
    }
}

TEST_CASE("build_training_set runs the pipeline in workflow order") {
    const Task task = load_task(task_path("gripper4"));
    PipelineConfig config;
    config.algorithm = SamplerAlgorithm::kFsm;
    config.num_samples = 500;
    config.limit_kind = LimitKind::kFactsPerMeanEffect;
    config.refine.use_sai = true;
    config.refine.use_sui = true;
    config.refine.completion = CompletionStrategy::kMutex;
    config.refine.random_fraction = 0.2;
    config.seed = 3;
    const SampleSet set = build_training_set(task, config, nullptr);
    REQUIRE(set.samples.size() == 500);
    std::size_t random_count = 0;
    for (const Sample& sample : set.samples) {
        CHECK(sample.state.complete());
        random_count += sample.origin == SampleOrigin::kRandom;
    }
    CHECK(random_count == 100);
    // SAI on complete states: identical states share one estimate
    std::unordered_map<PartialState, std::int64_t, PartialStateHash> seen;
    for (const Sample& sample : set.samples) {
        const auto [it, inserted] = seen.emplace(sample.state, sample.h);
        if (!inserted)
            CHECK(it->second == sample.h);
    }
}

TEST_CASE("build_training_set with all stages off completes raw sampler output") {
    const Task task = load_task(task_path("gripper4"));
    PipelineConfig config;
    config.algorithm = SamplerAlgorithm::kRw;
    config.num_samples = 200;
    config.limit_kind = LimitKind::kFixed;
    config.fixed_limit = 12;
    config.refine.completion = CompletionStrategy::kRandom;
    config.seed = 6;
    const SampleSet set = build_training_set(task, config, nullptr);

    SamplerOptions options;
    options.num_samples = 200;
    options.limit = resolve_limit(task, LimitKind::kFixed, 12);
    options.seed = seed_stream(6, "sample");
    const SampleSet raw = sample_rw(task, options);
    REQUIRE(set.samples.size() == raw.samples.size());
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        CHECK(set.samples[i].h == raw.samples[i].h);  // estimates untouched
        CHECK(set.samples[i].state.extends(raw.samples[i].state));
        CHECK(set.samples[i].state.complete());
    }
}

TEST_CASE("fss completion drops invalid predecessors") {
    const Task task = spurious_regression_task();
    const StateSpace space = enumerate_forward(task);
    PipelineConfig config;
    config.algorithm = SamplerAlgorithm::kRw;
    config.num_samples = 100;
    config.limit_kind = LimitKind::kFixed;
    config.fixed_limit = 3;
    config.use_mutex = false;
    config.refine.completion = CompletionStrategy::kFss;
    config.seed = 2;
    const SampleSet set = build_training_set(task, config, &space);
    CHECK(set.meta.dropped_invalid > 0);
    for (const Sample& sample : set.samples)
        CHECK(space.contains(sample.state));
}
