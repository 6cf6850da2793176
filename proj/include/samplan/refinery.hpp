#pragma once

// Estimate improvement and sample finishing: minimization over repeated
// samples (SAI), propagation over sampled successors (SUI), partial-state
// completion, random-sample augmentation and the full training-set pipeline
// (sample -> SAI -> SUI -> complete -> add random -> SAI on complete states).

#include <cstdint>
#include <optional>
#include <vector>

#include "samplan/rng.hpp"
#include "samplan/sampler.hpp"
#include "samplan/state_space.hpp"

namespace samplan {

// Minimize h over identical states (same assignment, same undefined
// pattern); order and multiplicity are preserved.
void sai(std::vector<Sample>& samples);

struct SuccessorGraph {
    struct Arc {
        std::int32_t from;
        std::int32_t to;
        std::int64_t weight;
    };
    std::vector<Arc> arcs;
};

// Arcs (i, j, cost(o)) for operators strictly applicable to sample i whose
// successor is subsumed by sample j; parallel arcs keep the minimum weight,
// self-arcs are dropped.
SuccessorGraph build_successor_graph(const std::vector<Sample>& samples, const Task& task);

// Relax h(from) <= h(to) + weight to a fixpoint; returns the number of
// passes over the arc list.
int relax_to_fixpoint(std::vector<Sample>& samples, const SuccessorGraph& graph);

void sui(std::vector<Sample>& samples, const Task& task);

enum class CompletionStrategy { kRandom, kMutex, kFss };

CompletionStrategy parse_completion(const std::string& text);
std::string completion_name(CompletionStrategy strategy);

inline constexpr int kMutexCompletionAttempts = 10000;

// Completes the undefined variables of sample.state in place. Returns false
// only for FSS completion when no reachable state matches (the sample is an
// invalid predecessor and must be dropped by the caller). The MUTEX strategy
// falls back to leaving the state partial after 10K failed attempts.
bool complete_state(Sample& sample, CompletionStrategy strategy, const Task& task,
                    const StateSpace* oracle, Rng& rng);

// Appends round(rho * total) randomly generated samples (mutex completion of
// fully undefined states). Each gets h = 1 + max existing h, or the h of a
// state-identical existing sample; with rho = 1 every sample gets limit + 1.
void add_random_samples(std::vector<Sample>& samples, double rho, std::size_t total,
                        const Task& task, std::int64_t limit, Rng& rng);

struct RefineryConfig {
    bool use_sai = false;
    bool use_sui = false;
    CompletionStrategy completion = CompletionStrategy::kMutex;
    double random_fraction = 0.0;
};

struct PipelineConfig {
    SamplerAlgorithm algorithm = SamplerAlgorithm::kRw;
    std::size_t num_samples = 1;
    LimitKind limit_kind = LimitKind::kFixed;
    std::int64_t fixed_limit = 200;
    double pfsm = 0.1;
    bool use_mutex = true;
    bool goal_reset = true;
    RefineryConfig refine;
    std::uint64_t seed = 1;  // fans out into sample/completion/random streams
};

SampleSet build_training_set(const Task& task, const PipelineConfig& config,
                             const StateSpace* oracle);

}  // namespace samplan
