#pragma once

// End-to-end experiment harness: a flat key=value config describes one
// sampling/training/search pipeline; cells (sample seed x network seed) run
// independently into per-cell directories with on-disk DONE markers, so an
// interrupted experiment resumes where it stopped. Reports are recomputed
// from the per-run CSV files alone.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "samplan/learner.hpp"
#include "samplan/refinery.hpp"
#include "samplan/search.hpp"

namespace samplan {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

enum class BudgetRule { kFixed, kFssFraction, kPerVariable };

struct ExperimentConfig {
    std::string task_path;

    SamplerAlgorithm algorithm = SamplerAlgorithm::kRw;
    BudgetRule budget_rule = BudgetRule::kFixed;
    std::size_t fixed_samples = 1000;
    double fss_fraction = 0.01;
    LimitKind limit_kind = LimitKind::kFixed;
    std::int64_t fixed_limit = 200;
    double pfsm = 0.1;
    bool use_mutex = true;
    bool goal_reset = true;

    bool use_sai = false;
    bool use_sui = false;
    CompletionStrategy completion = CompletionStrategy::kMutex;
    double random_fraction = 0.0;
    bool label_hstar = false;  // replace sample estimates with oracle h*

    std::size_t batch_size = 64;
    double learning_rate = 1e-4;
    std::int64_t patience = 100;
    std::int64_t max_epochs = 0;
    double max_train_seconds = 0.0;
    double split = 0.9;

    std::vector<std::uint64_t> sample_seeds{1};
    std::vector<std::uint64_t> net_seeds{1};

    std::string heuristic = "learned";  // learned|goalcount|blind|perfect
    std::string states_file;            // when set, overrides random-walk generation
    std::size_t initial_states = 5;
    std::int64_t walk_length = 200;
    std::uint64_t state_seed = 1;
    SearchLimits search_limits;
    std::size_t max_states = 1000000;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir);
ExperimentConfig load_config(const std::string& path);

// Forward random walks from s0; duplicate and goal-satisfying endpoints are
// rejected and redrawn, with a bounded retry budget.
std::vector<PartialState> gen_initial_states(const Task& task, std::size_t count,
                                             std::int64_t walk_length, std::uint64_t seed);

void save_states(const std::string& path, const std::vector<PartialState>& states);
std::vector<PartialState> load_states(const std::string& path, std::size_t num_variables);

struct EstimateQuality {
    double mean_abs_dev = 0.0;
    std::size_t evaluated = 0;
    std::size_t unreachable = 0;  // completions with no plan, excluded from the mean
};

// Mean |h - h*| over complete-state samples; h* comes from the oracle, or
// from a forward search when the state lies outside the enumerated space.
EstimateQuality eval_estimates(const std::vector<Sample>& samples, const Task& task,
                               const StateSpace* oracle);

// Mean |h(s) - h*(s)| over every state of the forward state space with
// finite h*.
double eval_heuristic_over_fss(const Heuristic& heuristic, const Task& task,
                               const StateSpace& oracle);

double geometric_mean(const std::vector<double>& values);

// RFC-4180 field quoting.
std::string csv_quote(const std::string& field);

struct ExperimentSummary {
    std::size_t cells = 0;
    std::size_t cells_run = 0;      // excluding cells skipped via DONE markers
    std::size_t searches = 0;
    std::size_t solved = 0;
    double coverage = 0.0;
    double geo_mean_expansions = 0.0;  // over solved runs
};

ExperimentSummary run_experiment(const std::string& config_path, const std::string& out_dir,
                                 int jobs = 1);

// Rebuilds report.csv / report.txt of an experiment directory from the
// per-run CSVs; with several directories, rows can be restricted to the
// initial states solved in every directory.
std::string report_from_dirs(const std::vector<std::string>& dirs, bool common_solved_only);

}  // namespace samplan
