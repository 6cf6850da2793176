#pragma once

// Quadratic reference implementation of successor improvement: arcs found by
// scanning every sample pair for successor supersets, relaxation by repeated
// sweeps. Kept independent of the library's trie-based path on purpose.

#include <vector>

#include "samplan/sampler.hpp"

namespace samplan::testing {

// S(query) subset of S(stored): stored agrees with query wherever defined.
inline bool subsumes(const PartialState& stored, const PartialState& query) {
    for (std::size_t var = 0; var < stored.size(); ++var)
        if (stored.defined(var) && (!query.defined(var) || query[var] != stored[var]))
            return false;
    return true;
}

inline std::vector<std::int64_t> brute_force_sui(const std::vector<Sample>& input,
                                                 const Task& task) {
    std::vector<std::int64_t> h;
    h.reserve(input.size());
    for (const Sample& sample : input)
        h.push_back(sample.h);
    struct Arc {
        std::size_t from, to;
        std::int64_t w;
    };
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < input.size(); ++i) {
        for (const Operator& op : task.operators) {
            bool ok = true;
            for (std::size_t var = 0; var < task.num_variables(); ++var)
                if (op.pre.defined(var) &&
                    (!input[i].state.defined(var) || input[i].state[var] != op.pre[var]))
                    ok = false;
            if (!ok)
                continue;
            PartialState succ = input[i].state;
            for (std::size_t var = 0; var < task.num_variables(); ++var)
                if (op.eff.defined(var))
                    succ.assign(var, op.eff[var]);
            for (std::size_t j = 0; j < input.size(); ++j)
                if (j != i && subsumes(input[j].state, succ))
                    arcs.push_back({i, j, op.cost});
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Arc& arc : arcs) {
            if (h[arc.to] + arc.w < h[arc.from]) {
                h[arc.from] = h[arc.to] + arc.w;
                changed = true;
            }
        }
    }
    return h;
}

}  // namespace samplan::testing
