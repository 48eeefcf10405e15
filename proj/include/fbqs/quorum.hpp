#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fbqs/node_set.hpp"
#include "fbqs/report.hpp"

namespace fbqs {

// Quorum enumeration is exponential in the universe; operations that need it
// refuse universes above this cap instead of silently truncating.
inline constexpr std::size_t kDefaultEnumerationCap = 16;

// The set of servers assumed faulty in a particular execution.
struct FailureScenario {
    NodeSet bad;

    bool operator==(const FailureScenario&) const = default;
};

// A federated quorum structure: each server owns a non-empty set of slices,
// each containing the server itself.
class Fbqs {
  public:
    Fbqs(NodeSet universe, std::map<NodeId, std::vector<NodeSet>> slices);

    const NodeSet& universe() const { return universe_; }
    std::span<const NodeSet> slices_of(NodeId v) const;
    const std::map<NodeId, std::vector<NodeSet>>& slices() const { return slices_; }

    bool operator==(const Fbqs&) const = default;

  private:
    NodeSet universe_;
    std::map<NodeId, std::vector<NodeSet>> slices_;
};

struct QuorumSystem {
    std::vector<NodeSet> quorums; // sorted, unique

    bool contains(NodeSet u) const;
    bool operator==(const QuorumSystem&) const = default;
};

struct FailProneSystem {
    std::vector<NodeSet> fail_sets; // sorted, unique

    bool operator==(const FailProneSystem&) const = default;
};

struct Dqs {
    QuorumSystem quorum_system;
    FailProneSystem fail_prone;

    bool operator==(const Dqs&) const = default;
};

// Sorts and deduplicates in place.
std::vector<NodeSet> normalize_sets(std::vector<NodeSet> sets);

// True iff u is non-empty and contains a slice of each of its members.
bool is_quorum(const Fbqs& fbqs, NodeSet u);

// All quorums of fbqs, in ascending set order.
QuorumSystem enumerate_quorums(const Fbqs& fbqs, std::size_t cap = kDefaultEnumerationCap);

// The inclusion-minimal quorums. Every quorum contains at least one of these,
// and pairwise intersection of all quorums holds iff it holds for these.
std::vector<NodeSet> minimal_quorums(const Fbqs& fbqs, std::size_t cap = kDefaultEnumerationCap);

bool has_quorum_intersection(const Fbqs& fbqs, std::size_t cap = kDefaultEnumerationCap);

// Restricts the structure to universe i: every slice is intersected with i.
Fbqs project(const Fbqs& fbqs, NodeSet i);

// The largest quorum contained in candidates, or the empty set if none.
// Computed as a greatest fixpoint: repeatedly drop members without a slice
// inside the remainder.
NodeSet largest_quorum_within(const Fbqs& fbqs, NodeSet candidates);

// The biggest set of correct servers that forms a quorum and whose projection
// keeps quorum intersection. Requires quorum intersection in fbqs.
NodeSet intact_set(const Fbqs& fbqs, const FailureScenario& scenario,
                   std::size_t cap = kDefaultEnumerationCap);

// True iff b overlaps every slice of v.
bool is_v_blocking(const Fbqs& fbqs, NodeId v, NodeSet b);

// Validates quorum-system shape, the fail-prone antichain, D-consistency and
// D-availability. With a scenario, also reports whether some fail-prone
// element covers the faulty set.
AxiomReport check_dqs(const Dqs& dqs, const std::optional<FailureScenario>& scenario = std::nullopt);

// The classical structure induced by fbqs: its quorums plus the maximal
// failure sets that leave some server intact. The result always passes
// check_dqs; a failure there is an internal invariant error.
Dqs induced_dqs(const Fbqs& fbqs, std::size_t cap = kDefaultEnumerationCap);

} // namespace fbqs
