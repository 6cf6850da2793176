#pragma once

// Trie over partial states keyed per variable by value index or a wildcard
// for undefined. collect_subsuming(q) returns the payloads of every stored
// partial state t with S(q) ⊆ S(t): t agrees with q wherever t is defined.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "samplan/sas_model.hpp"

namespace samplan {

class FactTrie {
public:
    explicit FactTrie(std::size_t num_vars) : num_vars_(num_vars), nodes_(1) {}

    void insert(const PartialState& state, std::int32_t payload);
    void collect_subsuming(const PartialState& query, std::vector<std::int32_t>& out) const;
    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::unordered_map<std::int32_t, std::int32_t> children;
        std::int32_t wildcard = -1;
        std::vector<std::int32_t> payloads;
    };

    void collect(std::int32_t node, const PartialState& query, std::size_t depth,
                 std::vector<std::int32_t>& out) const;

    std::size_t num_vars_;
    std::vector<Node> nodes_;
};

}  // namespace samplan
