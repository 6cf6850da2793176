// samplan command line: sampling, estimate refinement, training, search and
// experiment orchestration over SAS+ tasks.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "samplan/experiment.hpp"
#include "samplan/sample_io.hpp"
#include "samplan/transitions.hpp"

namespace {

using namespace samplan;

int cmd_task_info(const std::string& task_path) {
    const Task task = load_task(task_path);
    const RegressionLimit facts_limit = resolve_limit(task, LimitKind::kFacts);
    const RegressionLimit mean_limit = resolve_limit(task, LimitKind::kFactsPerMeanEffect);
    std::cout << "task,variables,operators,facts,mean_effect_size,facts_per_mean_effect\n";
    std::cout << csv_quote(task.name) << ',' << task.num_variables() << ','
              << task.operators.size() << ',' << facts_limit.resolved << ','
              << mean_effect_size(task) << ',' << mean_limit.resolved << '\n';
    return 0;
}

int cmd_statespace(const std::string& task_path, std::size_t max_states, bool histogram) {
    const Task task = load_task(task_path);
    const StateSpace space = enumerate_forward(task, max_states);
    std::cout << "task,state_count,goal_count,dmax,mean_hstar\n";
    std::cout << csv_quote(task.name) << ',' << space.size() << ',' << space.goal_count() << ','
              << space.dmax() << ',' << space.mean_hstar() << '\n';
    if (histogram) {
        std::cout << "hstar,states\n";
        const std::vector<std::size_t> counts = space.hstar_histogram();
        for (std::size_t h = 0; h < counts.size(); ++h)
            std::cout << h << ',' << counts[h] << '\n';
    }
    return 0;
}

int cmd_sample(const std::string& task_path, const std::string& algorithm,
               std::size_t num_samples, const std::string& limit_text, double pfsm,
               bool use_mutex, bool goal_reset, std::uint64_t seed, const std::string& out_path) {
    const Task task = load_task(task_path);
    SamplerOptions options;
    options.num_samples = num_samples;
    std::int64_t fixed_value = 0;
    const LimitKind kind = parse_limit_kind(limit_text, &fixed_value);
    options.limit = resolve_limit(task, kind, fixed_value);
    options.pfsm = pfsm;
    options.use_mutex = use_mutex;
    options.goal_reset = goal_reset;
    options.seed = seed;
    const SampleSet set = generate_samples(task, parse_algorithm(algorithm), options);
    save_partial_samples(out_path, set);
    std::cerr << "wrote " << set.samples.size() << " samples to " << out_path
              << (set.meta.short_set ? " (short: backward space exhausted)" : "") << '\n';
    return 0;
}

int cmd_refine(const std::string& task_path, const std::string& in_path,
               const std::string& out_path, bool use_sai, bool use_sui,
               const std::string& completion_text, double random_fraction,
               std::size_t total_samples, std::uint64_t seed, std::size_t max_states) {
    const Task task = load_task(task_path);
    SampleSet set = load_partial_samples(in_path);
    const CompletionStrategy completion = parse_completion(completion_text);

    if (use_sai)
        sai(set.samples);
    if (use_sui)
        sui(set.samples, task);

    std::optional<StateSpace> oracle;
    if (completion == CompletionStrategy::kFss)
        oracle.emplace(enumerate_forward(task, max_states));

    Rng completion_rng(seed_stream(seed, "complete"));
    std::vector<Sample> completed;
    completed.reserve(set.samples.size());
    for (Sample& sample : set.samples) {
        if (complete_state(sample, completion, task, oracle ? &*oracle : nullptr, completion_rng))
            completed.push_back(std::move(sample));
        else
            ++set.meta.dropped_invalid;
    }
    set.samples = std::move(completed);

    if (random_fraction > 0.0) {
        std::size_t total = total_samples;
        if (total == 0) {
            if (random_fraction >= 1.0)
                throw ConfigError(
                    "--random-fraction 1 needs --total-samples (no regression samples)");
            total = static_cast<std::size_t>(
                std::floor(static_cast<double>(set.samples.size()) / (1.0 - random_fraction) +
                           0.5));
        }
        Rng random_rng(seed_stream(seed, "random"));
        add_random_samples(set.samples, random_fraction, total, task, set.meta.limit.resolved,
                           random_rng);
    }
    if (use_sai)
        sai(set.samples);

    save_training_set(out_path, task, set);
    std::cerr << "wrote " << set.samples.size() << " training samples to " << out_path;
    if (set.meta.dropped_invalid > 0)
        std::cerr << " (dropped " << set.meta.dropped_invalid << " invalid predecessors)";
    std::cerr << '\n';
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& out_path, std::size_t batch,
              double lr, std::int64_t patience, double max_seconds, std::int64_t max_epochs,
              double split, std::uint64_t net_seed) {
    const TrainingSet data = load_training_set(data_path);
    const std::uint64_t net_stream = seed_stream(net_seed, "net");
    Model model = init_model(data.facts, net_stream);
    int retries = 0;
    model = ensure_not_born_dead(std::move(model), data.inputs, net_stream, &retries);
    TrainConfig config;
    config.batch_size = batch;
    config.learning_rate = lr;
    config.patience = patience;
    config.max_seconds = max_seconds;
    config.max_epochs = max_epochs;
    config.split = split;
    config.seed = net_stream;
    const TrainReport report = train(model, data, config);
    save_model(out_path, model);
    std::cout << "epochs,best_epoch,best_val_loss,final_train_loss,born_dead_retries,"
                 "wall_seconds\n";
    std::cout << report.epochs << ',' << report.best_epoch << ',' << report.best_validation_loss
              << ',' << report.final_training_loss << ',' << retries << ','
              << report.wall_seconds << '\n';
    return 0;
}

Heuristic make_heuristic(const std::string& spec, const Task& task,
                         std::optional<Model>& model_storage,
                         std::optional<StateSpace>& oracle_storage, std::size_t max_states) {
    if (spec == "blind")
        return Heuristic::blind();
    if (spec == "goalcount")
        return Heuristic::goal_count_of(&task);
    if (spec == "perfect") {
        if (!oracle_storage)
            oracle_storage.emplace(enumerate_forward(task, max_states));
        return Heuristic::perfect(&*oracle_storage);
    }
    if (spec.rfind("learned:", 0) == 0) {
        model_storage = load_model(spec.substr(8));
        return Heuristic::learned(&*model_storage);
    }
    throw ConfigError("unknown heuristic '" + spec +
                      "' (use learned:<model>, goalcount, perfect, blind)");
}

int cmd_search(const std::string& task_path, const std::string& heuristic_spec,
               const std::string& state_file, std::size_t state_index, double max_seconds,
               std::uint64_t max_memory_mb, std::uint64_t max_expansions, std::size_t max_states,
               bool print_plan) {
    const Task task = load_task(task_path);
    PartialState start = task.initial_state;
    if (!state_file.empty()) {
        const std::vector<PartialState> states = load_states(state_file, task.num_variables());
        if (state_index >= states.size())
            throw ConfigError("state index " + std::to_string(state_index) +
                              " out of range (file has " + std::to_string(states.size()) +
                              " states)");
        start = states[state_index];
    }
    std::optional<Model> model;
    std::optional<StateSpace> oracle;
    const Heuristic heuristic =
        make_heuristic(heuristic_spec, task, model, oracle, max_states);
    SearchLimits limits;
    limits.max_seconds = max_seconds;
    limits.max_memory_mb = max_memory_mb;
    limits.max_expansions = max_expansions;
    const SearchResult result = gbfs(task, start, heuristic, limits);
    std::cout << "status,plan_cost,expanded,generated,seconds\n";
    std::cout << status_name(result.status) << ',' << result.plan_cost << ',' << result.expanded
              << ',' << result.generated << ',' << result.seconds << '\n';
    if (print_plan && result.status == SearchStatus::kSolved)
        for (const std::int32_t op : result.plan)
            std::cout << task.operators[op].name << '\n';
    return result.status == SearchStatus::kSolved ? 0 : 1;
}

int cmd_eval(const std::string& task_path, const std::string& samples_path,
             const std::string& heuristic_spec, std::size_t max_states) {
    const Task task = load_task(task_path);
    if (!samples_path.empty()) {
        std::ifstream in(samples_path);
        if (!in)
            throw ConfigError("cannot read training file: " + samples_path);
        const TrainingSet data = read_training_set(in);
        std::vector<Sample> samples;
        samples.reserve(data.size());
        std::size_t skipped_partial = 0;  // mutex-completion fallback rows
        for (std::size_t i = 0; i < data.size(); ++i) {
            Sample sample;
            FactVector facts;
            facts.bits = data.inputs[i];
            sample.state = decode_state(task, facts);
            sample.h = static_cast<std::int64_t>(data.targets[i]);
            if (!sample.state.complete()) {
                ++skipped_partial;
                continue;
            }
            samples.push_back(std::move(sample));
        }
        std::optional<StateSpace> oracle;
        try {
            oracle.emplace(enumerate_forward(task, max_states));
        } catch (const EnumerationOverflow&) {
            // fall back to per-state forward search
        }
        const EstimateQuality quality =
            eval_estimates(samples, task, oracle ? &*oracle : nullptr);
        std::cout << "samples,evaluated,unreachable,skipped_partial,mean_abs_dev\n";
        std::cout << data.size() << ',' << quality.evaluated << ',' << quality.unreachable << ','
                  << skipped_partial << ',' << quality.mean_abs_dev << '\n';
        return 0;
    }
    std::optional<Model> model;
    std::optional<StateSpace> oracle;
    const Heuristic heuristic =
        make_heuristic(heuristic_spec, task, model, oracle, max_states);
    if (!oracle)
        oracle.emplace(enumerate_forward(task, max_states));
    const double dev = eval_heuristic_over_fss(heuristic, task, *oracle);
    std::cout << "states,mean_abs_dev\n";
    std::cout << oracle->size() << ',' << dev << '\n';
    return 0;
}

int cmd_gen_states(const std::string& task_path, std::size_t count, std::int64_t walk_length,
                   std::uint64_t seed, const std::string& out_path) {
    const Task task = load_task(task_path);
    const std::vector<PartialState> states = gen_initial_states(task, count, walk_length, seed);
    save_states(out_path, states);
    std::cerr << "wrote " << states.size() << " states to " << out_path << '\n';
    return 0;
}

int jobs_from_env(int jobs) {
    const char* env = std::getenv("SAMPLAN_JOBS");
    if (env != nullptr && *env != '\0')
        return std::max(1, std::atoi(env));
    return jobs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sample-based learned heuristics for SAS+ planning"};
    app.require_subcommand(1);

    std::string task_path;
    std::string in_path;
    std::string out_path;
    std::string algorithm = "rw";
    std::string limit_text = "fixed:200";
    std::string completion_text = "mutex";
    std::string heuristic_spec = "blind";
    std::string state_file;
    std::string samples_path;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> report_dirs;
    std::size_t num_samples = 1000;
    std::size_t total_samples = 0;
    std::size_t state_index = 0;
    std::size_t count = 50;
    std::size_t max_states = 1000000;
    std::size_t batch = 64;
    std::int64_t patience = 100;
    std::int64_t max_epochs = 0;
    std::int64_t walk_length = 200;
    std::uint64_t seed = 1;
    std::uint64_t net_seed = 1;
    std::uint64_t max_memory_mb = 2048;
    std::uint64_t max_expansions = 0;
    double pfsm = 0.1;
    double random_fraction = 0.0;
    double lr = 1e-4;
    double max_seconds = 0.0;
    double search_max_seconds = 300.0;
    double split = 0.9;
    bool use_mutex = true;
    bool goal_reset = true;
    bool use_sai = false;
    bool use_sui = false;
    bool histogram = false;
    bool print_plan = false;
    bool common_solved = false;
    int jobs = 1;

    CLI::App* task_info = app.add_subcommand("task-info", "print task metrics as CSV");
    task_info->add_option("task", task_path)->required();

    CLI::App* statespace = app.add_subcommand("statespace", "enumerate the forward state space");
    statespace->add_option("task", task_path)->required();
    statespace->add_option("--max-states", max_states);
    statespace->add_flag("--histogram", histogram);

    CLI::App* sample = app.add_subcommand("sample", "generate regression samples");
    sample->add_option("task", task_path)->required();
    sample->add_option("--algorithm", algorithm)->check(CLI::IsMember({"rw", "bfs", "dfs", "fsm"}));
    sample->add_option("--num-samples", num_samples);
    sample->add_option("--limit", limit_text);
    sample->add_option("--pfsm", pfsm);
    sample->add_flag("--mutex,!--no-mutex", use_mutex);
    sample->add_flag("--goal-reset,!--no-goal-reset", goal_reset);
    sample->add_option("--seed", seed);
    sample->add_option("--out", out_path)->required();

    CLI::App* refine = app.add_subcommand("refine", "improve estimates and complete samples");
    refine->add_option("task", task_path)->required();
    refine->add_option("--in", in_path)->required();
    refine->add_option("--out", out_path)->required();
    refine->add_flag("--sai", use_sai);
    refine->add_flag("--sui", use_sui);
    refine->add_option("--completion", completion_text)
        ->check(CLI::IsMember({"random", "mutex", "fss"}));
    refine->add_option("--random-fraction", random_fraction);
    refine->add_option("--total-samples", total_samples);
    refine->add_option("--seed", seed);
    refine->add_option("--max-states", max_states);

    CLI::App* train_cmd = app.add_subcommand("train", "train the residual regressor");
    train_cmd->add_option("data", in_path)->required();
    train_cmd->add_option("--out", out_path)->required();
    train_cmd->add_option("--batch", batch);
    train_cmd->add_option("--lr", lr);
    train_cmd->add_option("--patience", patience);
    train_cmd->add_option("--max-seconds", max_seconds);
    train_cmd->add_option("--max-epochs", max_epochs);
    train_cmd->add_option("--split", split);
    train_cmd->add_option("--net-seed", net_seed);

    CLI::App* search_cmd = app.add_subcommand("search", "greedy best-first search");
    search_cmd->add_option("task", task_path)->required();
    search_cmd->add_option("--heuristic", heuristic_spec);
    search_cmd->add_option("--initial-state", state_file);
    search_cmd->add_option("--state-index", state_index);
    search_cmd->add_option("--max-seconds", search_max_seconds);
    search_cmd->add_option("--max-memory-mb", max_memory_mb);
    search_cmd->add_option("--max-expansions", max_expansions);
    search_cmd->add_option("--max-states", max_states);
    search_cmd->add_flag("--print-plan", print_plan);

    CLI::App* eval = app.add_subcommand("eval", "estimate quality against exact cost-to-goal");
    eval->add_option("task", task_path)->required();
    eval->add_option("--samples", samples_path);
    eval->add_option("--heuristic", heuristic_spec);
    eval->add_option("--max-states", max_states);

    CLI::App* gen_states = app.add_subcommand("gen-states", "random-walk initial states");
    gen_states->add_option("task", task_path)->required();
    gen_states->add_option("--count", count);
    gen_states->add_option("--walk-length", walk_length);
    gen_states->add_option("--seed", seed);
    gen_states->add_option("--out", out_path)->required();

    CLI::App* experiment = app.add_subcommand("experiment", "run a full experiment config");
    experiment->add_option("--config", config_path)->required();
    experiment->add_option("--out", out_dir)->required();
    experiment->add_option("--jobs", jobs);

    CLI::App* report = app.add_subcommand("report", "aggregate experiment directories");
    report->add_option("--dir", report_dirs)->required();
    report->add_flag("--common-solved", common_solved);

    CLI11_PARSE(app, argc, argv);

    try {
        if (task_info->parsed())
            return cmd_task_info(task_path);
        if (statespace->parsed())
            return cmd_statespace(task_path, max_states, histogram);
        if (sample->parsed())
            return cmd_sample(task_path, algorithm, num_samples, limit_text, pfsm, use_mutex,
                              goal_reset, seed, out_path);
        if (refine->parsed())
            return cmd_refine(task_path, in_path, out_path, use_sai, use_sui, completion_text,
                              random_fraction, total_samples, seed, max_states);
        if (train_cmd->parsed())
            return cmd_train(in_path, out_path, batch, lr, patience, max_seconds, max_epochs,
                             split, net_seed);
        if (search_cmd->parsed())
            return cmd_search(task_path, heuristic_spec, state_file, state_index,
                              search_max_seconds, max_memory_mb, max_expansions, max_states,
                              print_plan);
        if (eval->parsed())
            return cmd_eval(task_path, samples_path, heuristic_spec, max_states);
        if (gen_states->parsed())
            return cmd_gen_states(task_path, count, walk_length, seed, out_path);
        if (experiment->parsed()) {
            const ExperimentSummary summary =
                run_experiment(config_path, out_dir, jobs_from_env(jobs));
            std::cout << "cells,cells_run,searches,solved,coverage,geo_mean_expansions\n";
            std::cout << summary.cells << ',' << summary.cells_run << ',' << summary.searches
                      << ',' << summary.solved << ',' << summary.coverage << ','
                      << summary.geo_mean_expansions << '\n';
            return 0;
        }
        if (report->parsed()) {
            std::cout << report_from_dirs(report_dirs, common_solved);
            return 0;
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 2;
    }
    return 0;
}
