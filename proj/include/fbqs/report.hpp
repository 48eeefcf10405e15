#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fbqs/node_set.hpp"

namespace fbqs {

// One named check with an optional structured witness.
struct AxiomCheck {
    std::string name;
    bool pass = true;
    std::vector<NodeSet> witness_sets;
    std::vector<NodeId> witness_nodes;
    std::string note;

    std::string format(const std::vector<std::string>& names = {}) const;
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;

    bool all_pass() const;
    const AxiomCheck* find(std::string_view name) const;
    std::string to_string(const std::vector<std::string>& names = {}) const;
};

} // namespace fbqs
