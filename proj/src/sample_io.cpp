#include "samplan/sample_io.hpp"

#include <fstream>
#include <sstream>

#include "samplan/sample_format_error.hpp"

namespace samplan {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw SampleFormatError("cannot write file: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SampleFormatError("cannot read file: " + path);
    return in;
}

}  // namespace

void write_partial_samples(std::ostream& out, const SampleSet& set) {
    const SampleSetMeta& meta = set.meta;
    out << "#meta task=" << meta.task_id << '\n'
        << "#meta algorithm=" << meta.algorithm << '\n'
        << "#meta num_samples=" << meta.requested << '\n'
        << "#meta limit_kind=" << limit_kind_name(meta.limit.kind) << '\n'
        << "#meta limit=" << meta.limit.resolved << '\n'
        << "#meta pfsm=" << meta.pfsm << '\n'
        << "#meta seed=" << meta.seed << '\n'
        << "#meta mutex=" << (meta.use_mutex ? 1 : 0) << '\n'
        << "#meta goal_reset=" << (meta.goal_reset ? 1 : 0) << '\n'
        << "#meta short=" << (meta.short_set ? 1 : 0) << '\n'
        << "#meta dropped_invalid=" << meta.dropped_invalid << '\n'
        << "#meta variables=" << meta.num_variables << '\n';
    for (const Sample& sample : set.samples) {
        out << sample.h << ';';
        for (std::size_t var = 0; var < sample.state.size(); ++var) {
            if (var > 0)
                out << ',';
            if (sample.state.defined(var))
                out << sample.state[var];
            else
                out << '*';
        }
        out << '\n';
    }
}

SampleSet read_partial_samples(std::istream& in) {
    SampleSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.rfind("#meta ", 0) == 0) {
            const std::string entry = line.substr(6);
            const std::size_t eq = entry.find('=');
            if (eq == std::string::npos)
                throw SampleFormatError("malformed meta line: " + line);
            const std::string key = entry.substr(0, eq);
            const std::string value = entry.substr(eq + 1);
            if (key == "task") set.meta.task_id = value;
            else if (key == "algorithm") set.meta.algorithm = value;
            else if (key == "num_samples") set.meta.requested = std::stoull(value);
            else if (key == "limit_kind") {
                if (value == "fixed") set.meta.limit.kind = LimitKind::kFixed;
                else if (value == "facts") set.meta.limit.kind = LimitKind::kFacts;
                else if (value == "facts-per-effect")
                    set.meta.limit.kind = LimitKind::kFactsPerMeanEffect;
                else throw SampleFormatError("unknown limit kind '" + value + "'");
            }
            else if (key == "limit") set.meta.limit.resolved = std::stoll(value);
            else if (key == "pfsm") set.meta.pfsm = std::stod(value);
            else if (key == "seed") set.meta.seed = std::stoull(value);
            else if (key == "mutex") set.meta.use_mutex = value != "0";
            else if (key == "goal_reset") set.meta.goal_reset = value != "0";
            else if (key == "short") set.meta.short_set = value != "0";
            else if (key == "dropped_invalid") set.meta.dropped_invalid = std::stoull(value);
            else if (key == "variables") set.meta.num_variables = std::stoull(value);
            continue;
        }
        const std::size_t semicolon = line.find(';');
        if (semicolon == std::string::npos)
            throw SampleFormatError("sample line without ';': " + line);
        Sample sample;
        sample.h = std::stoll(line.substr(0, semicolon));
        const std::string rest = line.substr(semicolon + 1);
        std::vector<std::int32_t> values;
        std::istringstream fields(rest);
        std::string field;
        while (std::getline(fields, field, ','))
            values.push_back(field == "*" ? kUndefined
                                          : static_cast<std::int32_t>(std::stol(field)));
        if (set.meta.num_variables != 0 && values.size() != set.meta.num_variables)
            throw SampleFormatError("sample line has wrong variable count: " + line);
        sample.state = PartialState(std::move(values));
        set.samples.push_back(std::move(sample));
    }
    return set;
}

void write_training_set(std::ostream& out, const Task& task, const SampleSet& set) {
    out << "#facts=" << num_facts(task) << '\n';
    for (const Sample& sample : set.samples) {
        const FactVector facts = encode_state(task, sample.state);
        out << sample.h << ';';
        for (const std::uint8_t bit : facts.bits)
            out << (bit ? '1' : '0');
        out << '\n';
    }
}

TrainingSet read_training_set(std::istream& in) {
    TrainingSet data;
    std::string line;
    if (!std::getline(in, line) || line.rfind("#facts=", 0) != 0)
        throw SampleFormatError("training file must start with #facts=<F>");
    data.facts = std::stoll(line.substr(7));
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const std::size_t semicolon = line.find(';');
        if (semicolon == std::string::npos)
            throw SampleFormatError("training line without ';': " + line);
        data.targets.push_back(std::stod(line.substr(0, semicolon)));
        const std::string bits = line.substr(semicolon + 1);
        if (static_cast<std::int64_t>(bits.size()) != data.facts)
            throw SampleFormatError("training line has wrong bit count: " + line);
        std::vector<std::uint8_t> input(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != '0' && bits[i] != '1')
                throw SampleFormatError("training line has non-binary character: " + line);
            input[i] = bits[i] == '1';
        }
        data.inputs.push_back(std::move(input));
    }
    return data;
}

void save_partial_samples(const std::string& path, const SampleSet& set) {
    auto out = open_out(path);
    write_partial_samples(out, set);
}

SampleSet load_partial_samples(const std::string& path) {
    auto in = open_in(path);
    return read_partial_samples(in);
}

void save_training_set(const std::string& path, const Task& task, const SampleSet& set) {
    auto out = open_out(path);
    write_training_set(out, task, set);
}

TrainingSet load_training_set(const std::string& path) {
    auto in = open_in(path);
    return read_training_set(in);
}

}  // namespace samplan
