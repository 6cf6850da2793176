#pragma once

// Greedy best-first search over complete states: open list ordered by
// (heuristic value, generation order), duplicate detection at generation,
// goal test at expansion. Plus plan validation and the goal-count heuristic.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "samplan/learner.hpp"
#include "samplan/sas_model.hpp"
#include "samplan/state_space.hpp"

namespace samplan {

constexpr double kInfiniteH = std::numeric_limits<double>::infinity();

std::int64_t goal_count(const Task& task, const PartialState& s);

class Heuristic {
public:
    enum class Kind { kLearned, kGoalCount, kPerfect, kBlind };

    static Heuristic learned(const Model* model);
    static Heuristic goal_count_of(const Task* task);
    static Heuristic perfect(const StateSpace* oracle);
    static Heuristic blind();

    Kind kind() const { return kind_; }
    // kInfiniteH marks states the heuristic rules out (perfect dead ends or
    // states outside the enumerated space).
    double evaluate(const Task& task, const PartialState& s) const;

private:
    Kind kind_ = Kind::kBlind;
    const Model* model_ = nullptr;
    const StateSpace* oracle_ = nullptr;
};

enum class SearchStatus { kSolved, kExhausted, kTimeout, kMemory };

std::string status_name(SearchStatus status);

struct SearchLimits {
    double max_seconds = 300.0;
    std::uint64_t max_memory_mb = 2048;
    std::uint64_t max_expansions = 0;  // 0 = unlimited
};

struct SearchResult {
    SearchStatus status = SearchStatus::kExhausted;
    std::vector<std::int32_t> plan;  // operator indices
    std::int64_t plan_cost = 0;
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    double seconds = 0.0;
};

SearchResult gbfs(const Task& task, const PartialState& start, const Heuristic& heuristic,
                  const SearchLimits& limits = {});

bool validate_plan(const Task& task, const PartialState& start,
                   const std::vector<std::int32_t>& plan);

}  // namespace samplan
