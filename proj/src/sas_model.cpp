#include "samplan/sas_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace samplan {

namespace {

// Line-oriented cursor over the SAS file with section tracking for errors.
class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream stream(text);
        std::string line;
        while (std::getline(stream, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            lines_.push_back(line);
        }
    }

    void set_section(const std::string& section) { section_ = section; }
    const std::string& section() const { return section_; }
    int line_number() const { return static_cast<int>(pos_); }

    bool done() const { return pos_ >= lines_.size(); }

    std::string next() {
        if (done())
            fail("unexpected end of file");
        return lines_[pos_++];
    }

    void expect(const std::string& token) {
        const std::string line = next();
        if (line != token)
            fail("expected '" + token + "', got '" + line + "'");
    }

    std::int64_t next_int() {
        const std::string line = next();
        return parse_int(line);
    }

    std::int64_t parse_int(const std::string& text) {
        try {
            std::size_t used = 0;
            const std::int64_t value = std::stoll(text, &used);
            if (used != text.size())
                fail("trailing characters in integer '" + text + "'");
            return value;
        } catch (const std::invalid_argument&) {
            fail("expected integer, got '" + text + "'");
        } catch (const std::out_of_range&) {
            fail("integer out of range: '" + text + "'");
        }
        return 0;  // unreachable
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, line_number(), section_);
    }

private:
    std::vector<std::string> lines_;
    std::size_t pos_ = 0;
    std::string section_ = "header";
};

std::pair<std::int32_t, std::int32_t> parse_fact_pair(Reader& reader, const Task& task) {
    const std::string line = reader.next();
    std::istringstream words(line);
    std::int64_t var = 0;
    std::int64_t value = 0;
    if (!(words >> var >> value))
        reader.fail("expected 'var value' pair, got '" + line + "'");
    if (var < 0 || var >= static_cast<std::int64_t>(task.variables.size()))
        reader.fail("variable index " + std::to_string(var) + " out of range");
    if (value < 0 || value >= task.variables[var].domain_size())
        reader.fail("value " + std::to_string(value) + " out of range for variable " +
                    std::to_string(var));
    return {static_cast<std::int32_t>(var), static_cast<std::int32_t>(value)};
}

}  // namespace

void Task::finalize() {
    fact_offsets_.resize(variables.size());
    std::int32_t offset = 0;
    for (std::size_t var = 0; var < variables.size(); ++var) {
        fact_offsets_[var] = offset;
        offset += variables[var].domain_size();
    }
}

Task parse_sas(const std::string& text) {
    Reader reader(text);
    Task task;

    reader.set_section("version");
    reader.expect("begin_version");
    const std::int64_t version = reader.next_int();
    if (version != 3)
        reader.fail("unsupported FDR version " + std::to_string(version) + " (need 3)");
    reader.expect("end_version");

    reader.set_section("metric");
    reader.expect("begin_metric");
    const std::int64_t metric = reader.next_int();
    if (metric != 0 && metric != 1)
        reader.fail("metric flag must be 0 or 1");
    task.metric_flag = static_cast<int>(metric);
    reader.expect("end_metric");

    reader.set_section("variables");
    const std::int64_t num_variables = reader.next_int();
    if (num_variables <= 0)
        reader.fail("task needs at least one variable");
    task.variables.reserve(num_variables);
    for (std::int64_t i = 0; i < num_variables; ++i) {
        reader.expect("begin_variable");
        VariableDef var;
        var.name = reader.next();
        const std::int64_t axiom_layer = reader.next_int();
        if (axiom_layer != -1)
            reader.fail("axioms are not supported (variable " + var.name + ")");
        const std::int64_t domain_size = reader.next_int();
        if (domain_size < 1)
            reader.fail("variable " + var.name + " has empty domain");
        var.fact_names.reserve(domain_size);
        for (std::int64_t v = 0; v < domain_size; ++v)
            var.fact_names.push_back(reader.next());
        reader.expect("end_variable");
        task.variables.push_back(std::move(var));
    }
    task.finalize();

    reader.set_section("mutex_group");
    const std::int64_t num_mutexes = reader.next_int();
    if (num_mutexes < 0)
        reader.fail("negative mutex group count");
    for (std::int64_t i = 0; i < num_mutexes; ++i) {
        reader.expect("begin_mutex_group");
        const std::int64_t group_size = reader.next_int();
        MutexGroup group;
        group.facts.reserve(group_size);
        for (std::int64_t k = 0; k < group_size; ++k)
            group.facts.push_back(parse_fact_pair(reader, task));
        reader.expect("end_mutex_group");
        task.mutexes.push_back(std::move(group));
    }

    reader.set_section("state");
    reader.expect("begin_state");
    task.initial_state = PartialState(task.variables.size());
    for (std::size_t var = 0; var < task.variables.size(); ++var) {
        const std::int64_t value = reader.next_int();
        if (value < 0 || value >= task.variables[var].domain_size())
            reader.fail("initial value out of range for variable " + std::to_string(var));
        task.initial_state.assign(var, static_cast<std::int32_t>(value));
    }
    reader.expect("end_state");

    reader.set_section("goal");
    reader.expect("begin_goal");
    const std::int64_t goal_size = reader.next_int();
    if (goal_size < 1)
        reader.fail("goal must define at least one variable");
    task.goal = PartialState(task.variables.size());
    for (std::int64_t k = 0; k < goal_size; ++k) {
        const auto [var, value] = parse_fact_pair(reader, task);
        task.goal.assign(var, value);
    }
    reader.expect("end_goal");

    reader.set_section("operator");
    const std::int64_t num_operators = reader.next_int();
    if (num_operators < 0)
        reader.fail("negative operator count");
    task.operators.reserve(num_operators);
    for (std::int64_t i = 0; i < num_operators; ++i) {
        reader.expect("begin_operator");
        Operator op;
        op.name = reader.next();
        op.pre = PartialState(task.variables.size());
        op.eff = PartialState(task.variables.size());
        const std::int64_t num_prevail = reader.next_int();
        for (std::int64_t k = 0; k < num_prevail; ++k) {
            const auto [var, value] = parse_fact_pair(reader, task);
            op.pre.assign(var, value);
        }
        const std::int64_t num_pre_post = reader.next_int();
        if (num_pre_post < 1)
            reader.fail("operator " + op.name + " has no effects");
        for (std::int64_t k = 0; k < num_pre_post; ++k) {
            const std::string line = reader.next();
            std::istringstream words(line);
            std::int64_t num_conditions = 0;
            if (!(words >> num_conditions))
                reader.fail("malformed pre_post line '" + line + "'");
            if (num_conditions != 0)
                reader.fail("conditional effects are not supported (operator " + op.name + ")");
            std::int64_t var = 0;
            std::int64_t pre = 0;
            std::int64_t post = 0;
            if (!(words >> var >> pre >> post))
                reader.fail("malformed pre_post line '" + line + "'");
            if (var < 0 || var >= static_cast<std::int64_t>(task.variables.size()))
                reader.fail("pre_post variable out of range");
            if (pre < -1 || pre >= task.variables[var].domain_size())
                reader.fail("pre_post pre-value out of range");
            if (post < 0 || post >= task.variables[var].domain_size())
                reader.fail("pre_post post-value out of range");
            if (pre != -1)
                op.pre.assign(var, static_cast<std::int32_t>(pre));
            op.eff.assign(var, static_cast<std::int32_t>(post));
        }
        const std::int64_t cost = reader.next_int();
        if (cost < 0)
            reader.fail("negative operator cost");
        op.cost = task.metric_flag == 0 ? 1 : cost;
        reader.expect("end_operator");
        task.operators.push_back(std::move(op));
    }

    reader.set_section("axiom");
    const std::int64_t num_axioms = reader.next_int();
    if (num_axioms != 0)
        reader.fail("axioms are not supported");

    return task;
}

Task load_task(const std::string& path) {
    std::ifstream stream(path);
    if (!stream)
        throw TaskError("cannot open task file: " + path);
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    Task task = parse_sas(buffer.str());
    const std::size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.size() > 4 && base.substr(base.size() - 4) == ".sas")
        base.resize(base.size() - 4);
    task.name = base;
    return task;
}

std::int64_t num_facts(const Task& task) {
    std::int64_t total = 0;
    for (const VariableDef& var : task.variables)
        total += var.domain_size();
    return total;
}

double mean_effect_size(const Task& task) {
    if (task.operators.empty())
        throw TaskError("mean effect size undefined: task has no operators");
    std::int64_t total = 0;
    for (const Operator& op : task.operators)
        total += static_cast<std::int64_t>(op.eff.num_defined());
    return static_cast<double>(total) / static_cast<double>(task.operators.size());
}

FactVector encode_state(const Task& task, const PartialState& state) {
    FactVector facts;
    facts.bits.assign(num_facts(task), 0);
    for (std::size_t var = 0; var < task.variables.size(); ++var)
        if (state.defined(var))
            facts.bits[task.fact_offset(var) + state[var]] = 1;
    return facts;
}

PartialState decode_state(const Task& task, const FactVector& facts) {
    PartialState state(task.variables.size());
    for (std::size_t var = 0; var < task.variables.size(); ++var) {
        const std::int32_t offset = task.fact_offset(var);
        for (std::int32_t value = 0; value < task.variables[var].domain_size(); ++value)
            if (facts.bits[offset + value])
                state.assign(var, value);
    }
    return state;
}

}  // namespace samplan
