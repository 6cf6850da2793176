#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "samplan/rng.hpp"
#include "samplan/transitions.hpp"
#include "support/reference_search.hpp"
#include "support/test_tasks.hpp"

using namespace samplan;
using namespace samplan::testing;

namespace {

// Every partial state of a task with small domains, by counting.
std::vector<PartialState> all_partial_states(const Task& task) {
    std::vector<PartialState> result;
    std::vector<std::int32_t> radix(task.num_variables());
    for (std::size_t var = 0; var < task.num_variables(); ++var)
        radix[var] = task.variables[var].domain_size() + 1;  // +1 for undefined
    std::vector<std::int32_t> digits(task.num_variables(), 0);
    while (true) {
        PartialState state(task.num_variables());
        for (std::size_t var = 0; var < task.num_variables(); ++var)
            if (digits[var] > 0)
                state.assign(var, digits[var] - 1);
        result.push_back(std::move(state));
        std::size_t var = 0;
        while (var < digits.size() && ++digits[var] == radix[var])
            digits[var++] = 0;
        if (var == digits.size())
            break;
    }
    return result;
}

}  // namespace

TEST_CASE("applicable") {
    const Task task = toy3();
    CHECK(applicable(complete({0, 0}), task.operators[0]));
    CHECK(!applicable(complete({1, 0}), task.operators[0]));
    // a precondition on an undefined variable blocks application
    CHECK(!applicable(partial(2, {{1, 0}}), task.operators[0]));
}

TEST_CASE("successor") {
    const Task task = toy3();
    CHECK(successor(complete({0, 0}), task.operators[0]) == complete({1, 0}));
    CHECK(successor(complete({0, 1}), task.operators[0]) == complete({1, 1}));
    CHECK(successor(complete({0, 0}), task.operators[1]) == complete({0, 1}));
    CHECK_THROWS_AS(successor(complete({1, 0}), task.operators[0]), std::logic_error);
}

TEST_CASE("backward_applicable") {
    const Task task = toy3();
    CHECK(backward_applicable(partial(2, {{0, 1}}), task.operators[0]));
    CHECK(!backward_applicable(partial(2, {{0, 1}}), task.operators[1]));  // irrelevant
    CHECK(!backward_applicable(partial(2, {{0, 0}}), task.operators[0]));  // inconsistent
}

TEST_CASE("predecessor") {
    const Task task = toy3();
    CHECK(predecessor(partial(2, {{0, 1}}), task.operators[0]) == partial(2, {{0, 0}}));
    CHECK(predecessor(partial(2, {{0, 1}, {1, 1}}), task.operators[1]) ==
          partial(2, {{0, 1}, {1, 0}}));
    CHECK(predecessor(partial(2, {{0, 1}, {1, 1}}), task.operators[0]) ==
          partial(2, {{0, 0}, {1, 1}}));
    CHECK_THROWS_AS(predecessor(partial(2, {{0, 0}}), task.operators[0]), std::logic_error);
}

TEST_CASE("satisfies_goal") {
    const Task task = toy3();
    CHECK(satisfies_goal(partial(2, {{0, 1}}), task.goal));
    CHECK(!satisfies_goal(partial(2, {{1, 1}}), task.goal));
    CHECK(satisfies_goal(complete({1, 0}), task.goal));
}

TEST_CASE("violates_mutex") {
    std::vector<MutexGroup> groups{MutexGroup{{{0, 1}, {1, 1}}}};
    CHECK(violates_mutex(complete({1, 1}), groups));
    CHECK(!violates_mutex(complete({1, 0}), groups));
    CHECK(!violates_mutex(complete({1, 1}), {}));
}

TEST_CASE("violates_mutex is monotone under defining more variables") {
    const Task task = load_task(task_path("gripper4"));
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        PartialState state(task.num_variables());
        for (std::size_t var = 0; var < task.num_variables(); ++var)
            if (rng.uniform01() < 0.5)
                state.assign(var, static_cast<std::int32_t>(
                                      rng.pick_index(task.variables[var].domain_size())));
        if (!violates_mutex(state, task.mutexes))
            continue;
        PartialState extended = state;
        for (std::size_t var = 0; var < task.num_variables(); ++var)
            if (!extended.defined(var))
                extended.assign(var, static_cast<std::int32_t>(
                                         rng.pick_index(task.variables[var].domain_size())));
        CHECK(violates_mutex(extended, task.mutexes));
    }
}

TEST_CASE("regression soundness: sucs(pred(s,o),o) extends s, exhaustively") {
    for (const char* name : {"toy3", "gripper4"}) {
        const Task task = name == std::string("toy3") ? toy3() : load_task(task_path(name));
        if (task.num_variables() > 7)
            continue;
        for (const PartialState& s : all_partial_states(task)) {
            for (const Operator& op : task.operators) {
                if (!backward_applicable(s, op))
                    continue;
                const PartialState pred = predecessor(s, op);
                REQUIRE(applicable(pred, op));
                CHECK(successor(pred, op).extends(s));
            }
        }
    }
}

TEST_CASE("completion soundness: completions of pred(t,o) step into S(t)") {
    const Task task = load_task(task_path("gripper4"));
    Rng rng(17);
    int checked = 0;
    while (checked < 100) {
        PartialState t(task.num_variables());
        for (std::size_t var = 0; var < task.num_variables(); ++var)
            if (rng.uniform01() < 0.6)
                t.assign(var, static_cast<std::int32_t>(
                                  rng.pick_index(task.variables[var].domain_size())));
        for (const Operator& op : task.operators) {
            if (!backward_applicable(t, op))
                continue;
            const PartialState pred = predecessor(t, op);
            for (const PartialState& completion : enumerate_completions(task, pred, 512)) {
                REQUIRE(applicable(completion, op));
                CHECK(successor(completion, op).extends(t));
            }
            ++checked;
        }
    }
}

TEST_CASE("applicable on complete states matches brute-force pre inclusion") {
    const Task task = load_task(task_path("puzzle6"));
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        PartialState state(task.num_variables());
        for (std::size_t var = 0; var < task.num_variables(); ++var)
            state.assign(var, static_cast<std::int32_t>(
                                  rng.pick_index(task.variables[var].domain_size())));
        const Operator& op = task.operators[rng.pick_index(task.operators.size())];
        bool included = true;
        for (std::size_t var = 0; var < task.num_variables(); ++var)
            if (op.pre.defined(var) && state[var] != op.pre[var])
                included = false;
        CHECK(applicable(state, op) == included);
    }
}
