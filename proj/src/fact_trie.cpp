#include "samplan/fact_trie.hpp"

namespace samplan {

void FactTrie::insert(const PartialState& state, std::int32_t payload) {
    std::int32_t node = 0;
    for (std::size_t var = 0; var < num_vars_; ++var) {
        std::int32_t next;
        if (state.defined(var)) {
            auto [it, inserted] =
                nodes_[node].children.emplace(state[var], static_cast<std::int32_t>(nodes_.size()));
            if (inserted)
                nodes_.emplace_back();
            next = it->second;
        } else {
            if (nodes_[node].wildcard < 0) {
                nodes_[node].wildcard = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
            }
            next = nodes_[node].wildcard;
        }
        node = next;
    }
    nodes_[node].payloads.push_back(payload);
}

void FactTrie::collect_subsuming(const PartialState& query, std::vector<std::int32_t>& out) const {
    collect(0, query, 0, out);
}

void FactTrie::collect(std::int32_t node, const PartialState& query, std::size_t depth,
                       std::vector<std::int32_t>& out) const {
    if (depth == num_vars_) {
        out.insert(out.end(), nodes_[node].payloads.begin(), nodes_[node].payloads.end());
        return;
    }
    // A stored wildcard matches any query value; a stored value only matches
    // the same defined query value.
    if (nodes_[node].wildcard >= 0)
        collect(nodes_[node].wildcard, query, depth + 1, out);
    if (query.defined(depth)) {
        const auto it = nodes_[node].children.find(query[depth]);
        if (it != nodes_[node].children.end())
            collect(it->second, query, depth + 1, out);
    }
}

}  // namespace samplan
