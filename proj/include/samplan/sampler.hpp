#pragma once

// Regression-based sample generation: random walks, breadth- and depth-first
// traversals, and the two-phase BFS+random-walk sampler, all starting from
// the goal condition under a fixed or state-space-adaptive depth limit.

#include <cstdint>
#include <string>
#include <vector>

#include "samplan/sas_model.hpp"

namespace samplan {

enum class SampleOrigin : std::uint8_t { kBfsPhase, kRw, kDfs, kBfs, kRandom };

struct Sample {
    PartialState state;
    std::int64_t h = 0;
    SampleOrigin origin = SampleOrigin::kRw;
};

enum class LimitKind { kFixed, kFacts, kFactsPerMeanEffect };

struct RegressionLimit {
    LimitKind kind = LimitKind::kFixed;
    std::int64_t resolved = 1;
};

enum class SamplerAlgorithm { kRw, kBfs, kDfs, kFsm };

struct SampleSetMeta {
    std::string task_id;
    std::string algorithm;
    std::size_t requested = 0;
    RegressionLimit limit;
    double pfsm = 0.1;
    std::uint64_t seed = 0;
    bool use_mutex = true;
    bool goal_reset = true;
    bool short_set = false;  // frontier exhausted before reaching N
    std::size_t num_variables = 0;
    std::size_t dropped_invalid = 0;  // FSS completion rejects
};

struct SampleSet {
    std::vector<Sample> samples;
    SampleSetMeta meta;
};

struct SamplerError : std::runtime_error {
    explicit SamplerError(const std::string& message) : std::runtime_error(message) {}
};

struct SamplerOptions {
    std::size_t num_samples = 1;
    RegressionLimit limit;
    bool use_mutex = true;
    bool goal_reset = true;
    double pfsm = 0.1;
    std::uint64_t seed = 1;
};

// FIXED resolves to the given value, FACTS to F, FACTS_PER_MEAN_EFFECT to
// ceil(F / mean effect size).
RegressionLimit resolve_limit(const Task& task, LimitKind kind, std::int64_t fixed_value = 0);

LimitKind parse_limit_kind(const std::string& text, std::int64_t* fixed_value);
std::string limit_kind_name(LimitKind kind);
std::string algorithm_name(SamplerAlgorithm algorithm);
SamplerAlgorithm parse_algorithm(const std::string& text);

SampleSet sample_rw(const Task& task, const SamplerOptions& options);
SampleSet sample_bfs_dfs(const Task& task, const SamplerOptions& options, bool depth_first);
SampleSet sample_fsm(const Task& task, const SamplerOptions& options);
SampleSet generate_samples(const Task& task, SamplerAlgorithm algorithm,
                           const SamplerOptions& options);

}  // namespace samplan
