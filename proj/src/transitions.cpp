#include "samplan/transitions.hpp"

#include <stdexcept>

namespace samplan {

bool applicable(const PartialState& s, const Operator& op) {
    for (std::size_t var = 0; var < s.size(); ++var)
        if (op.pre.defined(var) && s[var] != op.pre[var])
            return false;
    return true;
}

PartialState successor(const PartialState& s, const Operator& op) {
    if (!applicable(s, op))
        throw std::logic_error("successor: operator '" + op.name + "' is not applicable");
    PartialState result = s;
    for (std::size_t var = 0; var < s.size(); ++var)
        if (op.eff.defined(var))
            result.assign(var, op.eff[var]);
    return result;
}

bool backward_applicable(const PartialState& s, const Operator& op) {
    bool relevant = false;
    for (std::size_t var = 0; var < s.size(); ++var) {
        if (!s.defined(var))
            continue;
        if (op.eff.defined(var)) {
            if (op.eff[var] != s[var])
                return false;  // inconsistent with effect
            relevant = true;
        } else if (op.pre.defined(var) && op.pre[var] != s[var]) {
            return false;  // inconsistent with a precondition that persists
        }
    }
    return relevant;
}

PartialState predecessor(const PartialState& s, const Operator& op) {
    if (!backward_applicable(s, op))
        throw std::logic_error("predecessor: operator '" + op.name +
                               "' is not backward applicable");
    PartialState result = s;
    for (std::size_t var = 0; var < s.size(); ++var) {
        if (op.eff.defined(var) && s.defined(var))
            result.clear(var);
        if (op.pre.defined(var))
            result.assign(var, op.pre[var]);
    }
    return result;
}

bool satisfies_goal(const PartialState& s, const PartialState& goal) {
    return s.extends(goal);
}

bool violates_mutex(const PartialState& s, const std::vector<MutexGroup>& mutexes) {
    for (const MutexGroup& group : mutexes) {
        int true_facts = 0;
        for (const auto& [var, value] : group.facts) {
            if (s[var] == value && ++true_facts >= 2)
                return true;
        }
    }
    return false;
}

}  // namespace samplan
