#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "samplan/search.hpp"
#include "samplan/transitions.hpp"
#include "support/reference_search.hpp"
#include "support/test_tasks.hpp"

using namespace samplan;
using namespace samplan::testing;

TEST_CASE("goal_count") {
    const Task task = toy3();
    CHECK(goal_count(task, complete({0, 0})) == 1);
    CHECK(goal_count(task, complete({1, 1})) == 0);
    Task both = toy3();
    both.goal.assign(1, 1);
    CHECK(goal_count(both, complete({0, 0})) == 2);
}

TEST_CASE("blind GBFS on toy3 behaves breadth-first") {
    const Task task = toy3();
    const SearchResult result = gbfs(task, complete({0, 0}), Heuristic::blind());
    REQUIRE(result.status == SearchStatus::kSolved);
    CHECK(result.plan_cost == 1);
    REQUIRE(result.plan.size() == 1);
    CHECK(task.operators[result.plan[0]].name == "op1");
    CHECK(result.expanded == 2);  // start, then the first generated successor
    CHECK(validate_plan(task, complete({0, 0}), result.plan));
}

TEST_CASE("a goal-satisfying start solves with an empty plan in one expansion") {
    const Task task = toy3();
    for (const Heuristic& heuristic :
         {Heuristic::blind(), Heuristic::goal_count_of(&task)}) {
        const SearchResult result = gbfs(task, complete({1, 1}), heuristic);
        CHECK(result.status == SearchStatus::kSolved);
        CHECK(result.plan.empty());
        CHECK(result.plan_cost == 0);
        CHECK(result.expanded == 1);
    }
}

TEST_CASE("validate_plan") {
    const Task task = toy3();
    CHECK(validate_plan(task, complete({0, 0}), {0}));
    CHECK(!validate_plan(task, complete({0, 0}), {}));
    CHECK(!validate_plan(task, complete({1, 0}), {0}));
    CHECK(!validate_plan(task, complete({0, 0}), {99}));
}

TEST_CASE("blind and perfect GBFS find optimal plans from every start") {
    for (const char* name : {"gripper4", "puzzle6", "hanoi5"}) {
        const Task task = load_task(task_path(name));
        const StateSpace space = enumerate_forward(task);
        const Heuristic blind = Heuristic::blind();
        const Heuristic perfect = Heuristic::perfect(&space);
        for (std::size_t i = 0; i < space.size(); i += 3) {
            const std::int64_t expected = space.perfect_h(i);
            if (expected == kUnreachable)
                continue;
            const SearchResult via_blind = gbfs(task, space.state(i), blind);
            REQUIRE(via_blind.status == SearchStatus::kSolved);
            CHECK(via_blind.plan_cost == expected);
            CHECK(validate_plan(task, space.state(i), via_blind.plan));

            const SearchResult via_perfect = gbfs(task, space.state(i), perfect);
            REQUIRE(via_perfect.status == SearchStatus::kSolved);
            CHECK(via_perfect.plan_cost == expected);
            CHECK(validate_plan(task, space.state(i), via_perfect.plan));
            CHECK(via_perfect.expanded <= via_blind.expanded);
        }
    }
}

TEST_CASE("expansion counts stay within the generated and space bounds") {
    const Task task = load_task(task_path("puzzle6"));
    const StateSpace space = enumerate_forward(task);
    const SearchResult result = gbfs(task, space.state(space.size() / 2), Heuristic::blind());
    CHECK(result.expanded <= result.generated);
    CHECK(result.generated <= space.size());
}

TEST_CASE("exhausted searches report EXHAUSTED") {
    // dead-end start: op1 requires B=b0
    Task task = toy3();
    task.operators[0].pre.assign(1, 0);
    const SearchResult result = gbfs(task, complete({0, 1}), Heuristic::blind());
    CHECK(result.status == SearchStatus::kExhausted);
    CHECK(result.expanded <= 2);
}

TEST_CASE("perfect heuristic never enqueues dead ends") {
    Task task = toy3();
    task.operators[0].pre.assign(1, 0);
    const StateSpace space = enumerate_forward(task);
    // from (a0,b0): op2 leads to the dead end (a0,b1) with h* = infinity
    const SearchResult result = gbfs(task, complete({0, 0}), Heuristic::perfect(&space));
    REQUIRE(result.status == SearchStatus::kSolved);
    CHECK(result.plan_cost == 1);
    CHECK(result.generated <= 3);
}

TEST_CASE("expansion limit reports a resource status") {
    const Task task = load_task(task_path("puzzle6"));
    SearchLimits limits;
    limits.max_expansions = 5;
    const StateSpace space = enumerate_forward(task);
    std::size_t far = 0;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (space.perfect_h(i) != kUnreachable && space.perfect_h(i) > space.perfect_h(far))
            far = i;
    const SearchResult result = gbfs(task, space.state(far), Heuristic::blind(), limits);
    CHECK(result.status == SearchStatus::kTimeout);
    CHECK(result.expanded == 5);
}

TEST_CASE("search results are deterministic") {
    const Task task = load_task(task_path("gripper4"));
    const StateSpace space = enumerate_forward(task);
    const Heuristic heuristic = Heuristic::goal_count_of(&task);
    const SearchResult a = gbfs(task, space.state(17), heuristic);
    const SearchResult b = gbfs(task, space.state(17), heuristic);
    CHECK(a.status == b.status);
    CHECK(a.plan == b.plan);
    CHECK(a.expanded == b.expanded);
    CHECK(a.generated == b.generated);
}

TEST_CASE("learned heuristic plugs into the search") {
    const Task task = toy3();
    const Model model = init_model(num_facts(task), 2, 16);
    const SearchResult result = gbfs(task, complete({0, 0}), Heuristic::learned(&model));
    CHECK(result.status == SearchStatus::kSolved);
    CHECK(validate_plan(task, complete({0, 0}), result.plan));
}
