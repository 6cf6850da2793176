#pragma once

// SAS+ task model in the Fast Downward FDR v3 file format: variables with
// finite domains, operators with preconditions and effects, mutex groups,
// initial state and goal condition, plus the Boolean fact encoding of states.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace samplan {

constexpr std::int32_t kUndefined = -1;

class PartialState {
public:
    PartialState() = default;
    explicit PartialState(std::size_t num_vars) : values_(num_vars, kUndefined) {}
    explicit PartialState(std::vector<std::int32_t> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    bool defined(std::size_t var) const { return values_[var] != kUndefined; }
    std::int32_t operator[](std::size_t var) const { return values_[var]; }
    void assign(std::size_t var, std::int32_t value) { values_[var] = value; }
    void clear(std::size_t var) { values_[var] = kUndefined; }

    std::size_t num_defined() const {
        std::size_t count = 0;
        for (const std::int32_t v : values_)
            count += (v != kUndefined);
        return count;
    }
    bool complete() const {
        for (const std::int32_t v : values_)
            if (v == kUndefined)
                return false;
        return true;
    }

    // True iff every variable defined in other is defined here with the same
    // value, i.e. this ⊇ other as partial functions (S(this) ⊆ S(other)).
    bool extends(const PartialState& other) const {
        for (std::size_t var = 0; var < values_.size(); ++var)
            if (other.values_[var] != kUndefined && values_[var] != other.values_[var])
                return false;
        return true;
    }

    const std::vector<std::int32_t>& values() const { return values_; }

    bool operator==(const PartialState& other) const { return values_ == other.values_; }
    bool operator!=(const PartialState& other) const { return values_ != other.values_; }

private:
    std::vector<std::int32_t> values_;
};

struct PartialStateHash {
    std::size_t operator()(const PartialState& state) const {
        std::uint64_t hash = 0xcbf29ce484222325ull;
        for (const std::int32_t v : state.values()) {
            hash ^= static_cast<std::uint32_t>(v);
            hash *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(hash);
    }
};

struct VariableDef {
    std::string name;
    std::vector<std::string> fact_names;
    std::int32_t domain_size() const { return static_cast<std::int32_t>(fact_names.size()); }
};

struct Operator {
    std::string name;
    PartialState pre;   // prevail conditions merged in
    PartialState eff;
    std::int64_t cost = 1;
};

struct MutexGroup {
    std::vector<std::pair<std::int32_t, std::int32_t>> facts;  // (variable, value)
};

struct Task {
    std::vector<VariableDef> variables;
    std::vector<Operator> operators;
    std::vector<MutexGroup> mutexes;
    PartialState initial_state;
    PartialState goal;
    int metric_flag = 0;
    std::string name;

    std::size_t num_variables() const { return variables.size(); }
    // Offset of variable var's fact block in the canonical fact order.
    std::int32_t fact_offset(std::size_t var) const { return fact_offsets_[var]; }
    void finalize();  // computes fact offsets, validates bounds

    std::vector<std::int32_t> fact_offsets_;
};

struct FactVector {
    std::vector<std::uint8_t> bits;
    std::size_t size() const { return bits.size(); }
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& message, int line, std::string section_name)
        : std::runtime_error("parse error at line " + std::to_string(line) + " (section " +
                             section_name + "): " + message),
          line_number(line),
          section(std::move(section_name)) {}
    int line_number;
    std::string section;
};

struct TaskError : std::runtime_error {
    explicit TaskError(const std::string& message) : std::runtime_error(message) {}
};

Task parse_sas(const std::string& text);
Task load_task(const std::string& path);

std::int64_t num_facts(const Task& task);
double mean_effect_size(const Task& task);

FactVector encode_state(const Task& task, const PartialState& state);
// Inverse of encode_state for per-block one-hot vectors; all-zero blocks
// decode to undefined.
PartialState decode_state(const Task& task, const FactVector& facts);

}  // namespace samplan
