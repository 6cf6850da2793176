#include "samplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "samplan/sample_io.hpp"
#include "samplan/transitions.hpp"

namespace samplan {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& text) {
    const std::size_t begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const std::size_t end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "1" || value == "true" || value == "yes")
        return true;
    if (value == "0" || value == "false" || value == "no")
        return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& value, const std::string& key) {
    std::vector<std::uint64_t> seeds;
    std::istringstream fields(value);
    std::string field;
    while (std::getline(fields, field, ','))
        seeds.push_back(std::stoull(trim(field)));
    if (seeds.empty())
        throw ConfigError("config key '" + key + "' needs at least one seed");
    return seeds;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir) {
    ExperimentConfig config;
    std::istringstream stream(text);
    std::string line;
    int line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#')
            continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_number) +
                              " is not key=value: " + entry);
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));

        if (key == "task") {
            fs::path path(value);
            config.task_path =
                path.is_absolute() || base_dir.empty() ? value : (fs::path(base_dir) / path).string();
        } else if (key == "algorithm") {
            config.algorithm = parse_algorithm(value);
        } else if (key == "budget") {
            if (value == "per-variable") {
                config.budget_rule = BudgetRule::kPerVariable;
            } else if (value.rfind("fss-fraction:", 0) == 0) {
                config.budget_rule = BudgetRule::kFssFraction;
                config.fss_fraction = std::stod(value.substr(13));
            } else if (value.rfind("fixed:", 0) == 0) {
                config.budget_rule = BudgetRule::kFixed;
                config.fixed_samples = std::stoull(value.substr(6));
            } else {
                throw ConfigError("unknown budget rule '" + value + "'");
            }
        } else if (key == "limit") {
            config.limit_kind = parse_limit_kind(value, &config.fixed_limit);
        } else if (key == "pfsm") {
            config.pfsm = std::stod(value);
        } else if (key == "mutex") {
            config.use_mutex = parse_bool(value, key);
        } else if (key == "goal-reset") {
            config.goal_reset = parse_bool(value, key);
        } else if (key == "sai") {
            config.use_sai = parse_bool(value, key);
        } else if (key == "sui") {
            config.use_sui = parse_bool(value, key);
        } else if (key == "completion") {
            config.completion = parse_completion(value);
        } else if (key == "random-fraction") {
            config.random_fraction = std::stod(value);
        } else if (key == "label") {
            if (value == "hstar")
                config.label_hstar = true;
            else if (value == "estimate")
                config.label_hstar = false;
            else
                throw ConfigError("config key 'label' expects estimate or hstar");
        } else if (key == "batch") {
            config.batch_size = std::stoull(value);
        } else if (key == "lr") {
            config.learning_rate = std::stod(value);
        } else if (key == "patience") {
            config.patience = std::stoll(value);
        } else if (key == "max-epochs") {
            config.max_epochs = std::stoll(value);
        } else if (key == "max-train-seconds") {
            config.max_train_seconds = std::stod(value);
        } else if (key == "split") {
            config.split = std::stod(value);
        } else if (key == "sample-seeds") {
            config.sample_seeds = parse_seed_list(value, key);
        } else if (key == "net-seeds") {
            config.net_seeds = parse_seed_list(value, key);
        } else if (key == "heuristic") {
            if (value != "learned" && value != "goalcount" && value != "blind" &&
                value != "perfect")
                throw ConfigError("unknown heuristic '" + value + "'");
            config.heuristic = value;
        } else if (key == "states-file") {
            fs::path path(value);
            config.states_file =
                path.is_absolute() || base_dir.empty() ? value : (fs::path(base_dir) / path).string();
        } else if (key == "initial-states") {
            config.initial_states = std::stoull(value);
        } else if (key == "walk-length") {
            config.walk_length = std::stoll(value);
        } else if (key == "state-seed") {
            config.state_seed = std::stoull(value);
        } else if (key == "search-max-seconds") {
            config.search_limits.max_seconds = std::stod(value);
        } else if (key == "search-max-expansions") {
            config.search_limits.max_expansions = std::stoull(value);
        } else if (key == "search-max-memory-mb") {
            config.search_limits.max_memory_mb = std::stoull(value);
        } else if (key == "max-states") {
            config.max_states = std::stoull(value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (config.task_path.empty())
        throw ConfigError("config is missing the 'task' key");
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    const std::string base_dir = fs::path(path).parent_path().string();
    return parse_config_text(read_file(path), base_dir);
}

std::vector<PartialState> gen_initial_states(const Task& task, std::size_t count,
                                             std::int64_t walk_length, std::uint64_t seed) {
    if (walk_length < 0)
        throw ConfigError("walk length must be non-negative");
    Rng rng(seed_stream(seed, "states"));
    std::vector<PartialState> result;
    std::unordered_set<PartialState, PartialStateHash> used;
    const std::size_t max_attempts = 100 + 50 * count;
    std::size_t attempts = 0;
    std::vector<std::size_t> applicable_ops;
    while (result.size() < count) {
        if (++attempts > max_attempts)
            throw ConfigError("could not generate " + std::to_string(count) +
                              " distinct non-goal initial states (walk length " +
                              std::to_string(walk_length) + ")");
        PartialState state = task.initial_state;
        for (std::int64_t step = 0; step < walk_length; ++step) {
            applicable_ops.clear();
            for (std::size_t op = 0; op < task.operators.size(); ++op)
                if (applicable(state, task.operators[op]))
                    applicable_ops.push_back(op);
            if (applicable_ops.empty())
                break;
            state = successor(state,
                              task.operators[applicable_ops[rng.pick_index(applicable_ops.size())]]);
        }
        if (satisfies_goal(state, task.goal) || used.count(state) > 0)
            continue;
        used.insert(state);
        result.push_back(std::move(state));
    }
    return result;
}

void save_states(const std::string& path, const std::vector<PartialState>& states) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write state file: " + path);
    for (const PartialState& state : states) {
        for (std::size_t var = 0; var < state.size(); ++var)
            out << (var > 0 ? "," : "") << state[var];
        out << '\n';
    }
}

std::vector<PartialState> load_states(const std::string& path, std::size_t num_variables) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read state file: " + path);
    std::vector<PartialState> states;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        std::vector<std::int32_t> values;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ','))
            values.push_back(static_cast<std::int32_t>(std::stol(trim(field))));
        if (values.size() != num_variables)
            throw ConfigError("state line has " + std::to_string(values.size()) +
                              " values, task has " + std::to_string(num_variables) +
                              " variables: " + line);
        states.emplace_back(std::move(values));
    }
    return states;
}

EstimateQuality eval_estimates(const std::vector<Sample>& samples, const Task& task,
                               const StateSpace* oracle) {
    EstimateQuality quality;
    double total = 0.0;
    for (const Sample& sample : samples) {
        std::int64_t hstar;
        if (oracle != nullptr && oracle->contains(sample.state))
            hstar = oracle->perfect_h(sample.state);
        else
            hstar = forward_goal_distance(task, sample.state);
        if (hstar == kUnreachable) {
            ++quality.unreachable;
            continue;
        }
        total += std::abs(static_cast<double>(sample.h - hstar));
        ++quality.evaluated;
    }
    quality.mean_abs_dev = quality.evaluated == 0 ? 0.0 : total / quality.evaluated;
    return quality;
}

double eval_heuristic_over_fss(const Heuristic& heuristic, const Task& task,
                               const StateSpace& oracle) {
    std::vector<std::size_t> finite;
    finite.reserve(oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        if (oracle.perfect_h(i) != kUnreachable)
            finite.push_back(i);
    std::vector<double> deviations(finite.size());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < finite.size(); ++k) {
        const std::size_t i = finite[k];
        const double estimate = heuristic.evaluate(task, oracle.state(i));
        deviations[k] = std::abs(estimate - static_cast<double>(oracle.perfect_h(i)));
    }
    double total = 0.0;
    for (const double deviation : deviations)
        total += deviation;
    return finite.empty() ? 0.0 : total / static_cast<double>(finite.size());
}

double geometric_mean(const std::vector<double>& values) {
    if (values.empty())
        return 0.0;
    double log_sum = 0.0;
    for (const double value : values) {
        if (value <= 0.0)
            throw ConfigError("geometric mean requires strictly positive values");
        log_sum += std::log(value);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

struct RunRow {
    std::string task;
    std::string heuristic;
    std::uint64_t sample_seed = 0;
    std::uint64_t net_seed = 0;
    std::size_t state_index = 0;
    std::string status;
    std::int64_t plan_cost = 0;
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
};

constexpr const char* kRunsHeader =
    "task,heuristic,sample_seed,net_seed,state_index,status,plan_cost,expanded,generated";

std::string format_run_row(const RunRow& row) {
    std::ostringstream out;
    out << csv_quote(row.task) << ',' << row.heuristic << ',' << row.sample_seed << ','
        << row.net_seed << ',' << row.state_index << ',' << row.status << ',' << row.plan_cost
        << ',' << row.expanded << ',' << row.generated;
    return out.str();
}

std::vector<RunRow> parse_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read runs file: " + path);
    std::vector<RunRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;  // header
        }
        if (trim(line).empty())
            continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 9)
            throw ConfigError("malformed runs row: " + line);
        RunRow row;
        row.task = fields[0];
        row.heuristic = fields[1];
        row.sample_seed = std::stoull(fields[2]);
        row.net_seed = std::stoull(fields[3]);
        row.state_index = std::stoull(fields[4]);
        row.status = fields[5];
        row.plan_cost = std::stoll(fields[6]);
        row.expanded = std::stoull(fields[7]);
        row.generated = std::stoull(fields[8]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RunRow> collect_dir_rows(const std::string& dir) {
    std::vector<fs::path> cell_files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && entry.path().filename().string().rfind("cell_", 0) == 0)
            cell_files.push_back(entry.path() / "runs.csv");
    std::sort(cell_files.begin(), cell_files.end());
    std::vector<RunRow> rows;
    for (const fs::path& file : cell_files) {
        if (!fs::exists(file))
            continue;
        std::vector<RunRow> cell_rows = parse_runs_csv(file.string());
        rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
    }
    return rows;
}

struct Aggregate {
    std::size_t searches = 0;
    std::size_t solved = 0;
    double coverage = 0.0;
    double geo_mean = 0.0;
    double arith_mean = 0.0;
};

Aggregate aggregate_rows(const std::vector<RunRow>& rows,
                         const std::unordered_set<std::size_t>* state_filter) {
    Aggregate agg;
    std::vector<double> expansions;
    for (const RunRow& row : rows) {
        agg.searches += 1;
        if (row.status == "SOLVED") {
            agg.solved += 1;
            if (state_filter == nullptr || state_filter->count(row.state_index) > 0)
                expansions.push_back(static_cast<double>(row.expanded));
        }
    }
    agg.coverage = agg.searches == 0
                       ? 0.0
                       : static_cast<double>(agg.solved) / static_cast<double>(agg.searches);
    if (!expansions.empty()) {
        agg.geo_mean = geometric_mean(expansions);
        double total = 0.0;
        for (const double e : expansions)
            total += e;
        agg.arith_mean = total / static_cast<double>(expansions.size());
    }
    return agg;
}

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.6g", value);
    return buffer;
}

}  // namespace

namespace {

struct CellSpec {
    std::uint64_t sample_seed;
    std::uint64_t net_seed;
    fs::path dir;
};

struct CellContext {
    const ExperimentConfig* config;
    const Task* task;
    const StateSpace* oracle;
    const std::vector<PartialState>* initial_states;
    std::size_t num_samples;
};

// Replace sample estimates with exact cost-to-goal values; samples whose
// state cannot reach the goal are dropped.
std::size_t relabel_with_hstar(std::vector<Sample>& samples, const Task& task,
                               const StateSpace* oracle) {
    std::vector<Sample> kept;
    kept.reserve(samples.size());
    std::size_t dropped = 0;
    for (Sample& sample : samples) {
        std::int64_t hstar;
        if (oracle != nullptr && oracle->contains(sample.state))
            hstar = oracle->perfect_h(sample.state);
        else
            hstar = forward_goal_distance(task, sample.state);
        if (hstar == kUnreachable) {
            ++dropped;
            continue;
        }
        sample.h = hstar;
        kept.push_back(std::move(sample));
    }
    samples = std::move(kept);
    return dropped;
}

void run_cell(const CellSpec& spec, const CellContext& context) {
    const ExperimentConfig& config = *context.config;
    const Task& task = *context.task;
    fs::create_directories(spec.dir);

    std::ostringstream runs;
    runs << kRunsHeader << '\n';
    std::ostringstream timings;
    timings << "kind,detail,seconds\n";

    try {
        Model model;
        std::string train_info;
        if (config.heuristic == "learned") {
            PipelineConfig pipeline;
            pipeline.algorithm = config.algorithm;
            pipeline.num_samples = context.num_samples;
            pipeline.limit_kind = config.limit_kind;
            pipeline.fixed_limit = config.fixed_limit;
            pipeline.pfsm = config.pfsm;
            pipeline.use_mutex = config.use_mutex;
            pipeline.goal_reset = config.goal_reset;
            pipeline.refine.use_sai = config.use_sai;
            pipeline.refine.use_sui = config.use_sui;
            pipeline.refine.completion = config.completion;
            pipeline.refine.random_fraction = config.random_fraction;
            pipeline.seed = spec.sample_seed;

            SampleSet set = build_training_set(task, pipeline, context.oracle);
            std::size_t relabel_dropped = 0;
            if (config.label_hstar)
                relabel_dropped = relabel_with_hstar(set.samples, task, context.oracle);
            save_training_set((spec.dir / "train.txt").string(), task, set);

            TrainingSet data;
            {
                std::ifstream in(spec.dir / "train.txt");
                data = read_training_set(in);
            }
            if (data.size() < 10)
                throw LearnerError("cell training set has fewer than 10 samples");

            const std::uint64_t net_stream = seed_stream(spec.net_seed, "net");
            model = init_model(data.facts, net_stream);
            int retries = 0;
            model = ensure_not_born_dead(std::move(model), data.inputs, net_stream, &retries);

            TrainConfig train_config;
            train_config.learning_rate = config.learning_rate;
            train_config.batch_size = config.batch_size;
            train_config.patience = config.patience;
            train_config.split = config.split;
            train_config.max_seconds = config.max_train_seconds;
            train_config.max_epochs = config.max_epochs;
            train_config.seed = net_stream;
            const TrainReport report = train(model, data, train_config);

            save_model((spec.dir / "model.txt").string(), model);
            std::ostringstream info;
            info << "epochs,best_epoch,best_val_loss,final_train_loss,born_dead_retries,"
                    "relabel_dropped,wall_seconds\n"
                 << report.epochs << ',' << report.best_epoch << ','
                 << format_double(report.best_validation_loss) << ','
                 << format_double(report.final_training_loss) << ',' << retries << ','
                 << relabel_dropped << ',' << format_double(report.wall_seconds) << '\n';
            train_info = info.str();
            timings << "train,," << format_double(report.wall_seconds) << '\n';
        }

        Heuristic heuristic = Heuristic::blind();
        if (config.heuristic == "learned")
            heuristic = Heuristic::learned(&model);
        else if (config.heuristic == "goalcount")
            heuristic = Heuristic::goal_count_of(&task);
        else if (config.heuristic == "perfect")
            heuristic = Heuristic::perfect(context.oracle);

        for (std::size_t index = 0; index < context.initial_states->size(); ++index) {
            const SearchResult result =
                gbfs(task, (*context.initial_states)[index], heuristic, config.search_limits);
            RunRow row;
            row.task = task.name;
            row.heuristic = config.heuristic;
            row.sample_seed = spec.sample_seed;
            row.net_seed = spec.net_seed;
            row.state_index = index;
            row.status = status_name(result.status);
            row.plan_cost = result.plan_cost;
            row.expanded = result.expanded;
            row.generated = result.generated;
            runs << format_run_row(row) << '\n';
            timings << "search," << index << ',' << format_double(result.seconds) << '\n';
        }

        if (!train_info.empty()) {
            std::ofstream out(spec.dir / "train_report.csv");
            out << train_info;
        }
    } catch (const std::exception& error) {
        // A failed stage is recorded in the cell, not fatal to the experiment.
        std::ofstream error_out(spec.dir / "error.txt");
        error_out << error.what() << '\n';
        runs.str("");
        runs << kRunsHeader << '\n';
        for (std::size_t index = 0; index < context.initial_states->size(); ++index) {
            RunRow row;
            row.task = task.name;
            row.heuristic = config.heuristic;
            row.sample_seed = spec.sample_seed;
            row.net_seed = spec.net_seed;
            row.state_index = index;
            row.status = "ERROR";
            runs << format_run_row(row) << '\n';
        }
    }

    {
        std::ofstream out(spec.dir / "runs.csv");
        out << runs.str();
    }
    {
        std::ofstream out(spec.dir / "timings.csv");
        out << timings.str();
    }
    std::ofstream marker(spec.dir / "DONE");
    marker << "done\n";
}

void write_reports(const fs::path& out_dir, const ExperimentConfig& config,
                   std::uint64_t config_hash) {
    const std::vector<RunRow> rows = collect_dir_rows(out_dir.string());

    std::ostringstream report;
    report << "section,sample_seed,net_seed,searches,solved,coverage,geo_mean_expansions,"
              "arith_mean_expansions\n";
    for (const std::uint64_t sample_seed : config.sample_seeds) {
        for (const std::uint64_t net_seed : config.net_seeds) {
            std::vector<RunRow> cell_rows;
            for (const RunRow& row : rows)
                if (row.sample_seed == sample_seed && row.net_seed == net_seed)
                    cell_rows.push_back(row);
            const Aggregate agg = aggregate_rows(cell_rows, nullptr);
            report << "cell," << sample_seed << ',' << net_seed << ',' << agg.searches << ','
                   << agg.solved << ',' << format_double(agg.coverage) << ','
                   << format_double(agg.geo_mean) << ',' << format_double(agg.arith_mean) << '\n';
        }
    }
    const Aggregate overall = aggregate_rows(rows, nullptr);
    report << "overall,,," << overall.searches << ',' << overall.solved << ','
           << format_double(overall.coverage) << ',' << format_double(overall.geo_mean) << ','
           << format_double(overall.arith_mean) << '\n';
    {
        std::ofstream out(out_dir / "report.csv");
        out << report.str();
    }

    std::ostringstream text;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(config_hash));
    auto seed_list = [](const std::vector<std::uint64_t>& seeds) {
        std::string out;
        for (const std::uint64_t seed : seeds)
            out += (out.empty() ? "" : ",") + std::to_string(seed);
        return out;
    };
    text << "experiment report\n"
         << "task: " << config.task_path << '\n'
         << "heuristic: " << config.heuristic << '\n'
         << "config hash: " << hash_hex << '\n'
         << "sample seeds: " << seed_list(config.sample_seeds) << '\n'
         << "net seeds: " << seed_list(config.net_seeds) << '\n'
         << "cells: " << config.sample_seeds.size() * config.net_seeds.size() << " ("
         << config.sample_seeds.size() << " sample seeds x " << config.net_seeds.size()
         << " net seeds)\n"
         << "searches: " << overall.searches << '\n'
         << "solved: " << overall.solved << '\n'
         << "coverage: " << format_double(overall.coverage) << '\n'
         << "geo mean expansions (solved runs): " << format_double(overall.geo_mean) << '\n'
         << "arith mean expansions (solved runs): " << format_double(overall.arith_mean) << '\n'
         << "note: domain means are unweighted; wall times live in timings.csv only\n";
    std::ofstream out(out_dir / "report.txt");
    out << text.str();
}

}  // namespace

ExperimentSummary run_experiment(const std::string& config_path, const std::string& out_dir,
                                 int jobs) {
    const std::string config_bytes = read_file(config_path);
    const std::uint64_t config_hash = fnv1a(config_bytes);
    const ExperimentConfig config =
        parse_config_text(config_bytes, fs::path(config_path).parent_path().string());

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const fs::path config_copy = dir / "config.txt";
    if (fs::exists(config_copy)) {
        if (read_file(config_copy.string()) != config_bytes)
            throw ConfigError("output directory holds a different experiment config: " +
                              config_copy.string());
    } else {
        std::ofstream out(config_copy);
        out << config_bytes;
    }

    Task task = load_task(config.task_path);

    const bool need_oracle = config.budget_rule == BudgetRule::kFssFraction ||
                             config.completion == CompletionStrategy::kFss ||
                             config.label_hstar || config.heuristic == "perfect";
    std::optional<StateSpace> oracle;
    if (need_oracle)
        oracle.emplace(enumerate_forward(task, config.max_states));

    std::size_t num_samples = config.fixed_samples;
    if (config.budget_rule == BudgetRule::kFssFraction)
        num_samples = static_cast<std::size_t>(
            std::floor(config.fss_fraction * static_cast<double>(oracle->size()) + 0.5));
    else if (config.budget_rule == BudgetRule::kPerVariable)
        num_samples = 16000000 / task.num_variables();
    if (num_samples < 1)
        throw ConfigError("sample budget resolves to zero samples");

    const fs::path states_path = dir / "states.txt";
    std::vector<PartialState> initial_states;
    if (fs::exists(states_path)) {
        initial_states = load_states(states_path.string(), task.num_variables());
    } else {
        if (!config.states_file.empty())
            initial_states = load_states(config.states_file, task.num_variables());
        else
            initial_states = gen_initial_states(task, config.initial_states, config.walk_length,
                                                config.state_seed);
        save_states(states_path.string(), initial_states);
    }

    std::vector<CellSpec> cells;
    for (const std::uint64_t sample_seed : config.sample_seeds)
        for (const std::uint64_t net_seed : config.net_seeds)
            cells.push_back({sample_seed, net_seed,
                             dir / ("cell_s" + std::to_string(sample_seed) + "_n" +
                                    std::to_string(net_seed))});

    CellContext context{&config, &task, oracle ? &*oracle : nullptr, &initial_states, num_samples};

    std::vector<const CellSpec*> pending;
    for (const CellSpec& cell : cells)
        if (!fs::exists(cell.dir / "DONE"))
            pending.push_back(&cell);

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(pending.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= pending.size())
                break;
            run_cell(*pending[index], context);
        }
    };
    std::vector<std::thread> threads;
    for (int i = 1; i < workers; ++i)
        threads.emplace_back(worker);
    worker();
    for (std::thread& thread : threads)
        thread.join();

    write_reports(dir, config, config_hash);

    ExperimentSummary summary;
    summary.cells = cells.size();
    summary.cells_run = pending.size();
    const Aggregate overall = aggregate_rows(collect_dir_rows(out_dir), nullptr);
    summary.searches = overall.searches;
    summary.solved = overall.solved;
    summary.coverage = overall.coverage;
    summary.geo_mean_expansions = overall.geo_mean;
    return summary;
}

std::string report_from_dirs(const std::vector<std::string>& dirs, bool common_solved_only) {
    std::vector<std::vector<RunRow>> per_dir;
    per_dir.reserve(dirs.size());
    for (const std::string& dir : dirs)
        per_dir.push_back(collect_dir_rows(dir));

    std::optional<std::unordered_set<std::size_t>> common;
    if (common_solved_only) {
        // Initial states solved in every run of every directory.
        common.emplace();
        bool first = true;
        for (const std::vector<RunRow>& rows : per_dir) {
            std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> counts;
            for (const RunRow& row : rows) {
                auto& [total, solved] = counts[row.state_index];
                ++total;
                if (row.status == "SOLVED")
                    ++solved;
            }
            std::unordered_set<std::size_t> solved_states;
            for (const auto& [state, count] : counts)
                if (count.first == count.second)
                    solved_states.insert(state);
            if (first) {
                *common = std::move(solved_states);
                first = false;
            } else {
                std::unordered_set<std::size_t> merged;
                for (const std::size_t state : *common)
                    if (solved_states.count(state) > 0)
                        merged.insert(state);
                *common = std::move(merged);
            }
        }
    }

    std::ostringstream out;
    out << "dir,searches,solved,coverage,geo_mean_expansions,arith_mean_expansions,"
           "common_states\n";
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const Aggregate agg = aggregate_rows(per_dir[d], common ? &*common : nullptr);
        out << csv_quote(dirs[d]) << ',' << agg.searches << ',' << agg.solved << ','
            << format_double(agg.coverage) << ',' << format_double(agg.geo_mean) << ','
            << format_double(agg.arith_mean) << ',' << (common ? common->size() : 0) << '\n';
    }
    return out.str();
}

}  // namespace samplan
