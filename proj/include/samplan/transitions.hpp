#pragma once

// Progression and regression semantics over partial states.

#include "samplan/sas_model.hpp"

namespace samplan {

// Forward applicability: every precondition variable must be defined in s
// with the required value; a precondition on an undefined variable fails.
bool applicable(const PartialState& s, const Operator& op);

// s' = eff(o) ∘ s. Requires applicable(s, op).
PartialState successor(const PartialState& s, const Operator& op);

// Relevance (some effect variable defined in s) plus consistency (s agrees
// with the effect on shared variables and with preconditions that persist).
bool backward_applicable(const PartialState& s, const Operator& op);

// pred(s,o) = pre(o) ∘ (s restricted to dom(s) \ eff_r).
// Requires backward_applicable(s, op).
PartialState predecessor(const PartialState& s, const Operator& op);

bool satisfies_goal(const PartialState& s, const PartialState& goal);

// True iff some mutex group has two or more of its facts set in s.
bool violates_mutex(const PartialState& s, const std::vector<MutexGroup>& mutexes);

}  // namespace samplan
