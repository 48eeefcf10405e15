#pragma once

// Shared structures used across the test suites. Node ids follow the usual
// 1..4 numbering of the four-server examples.

#include <map>
#include <vector>

#include "fbqs/quorum.hpp"
#include "fbqs/subjective.hpp"

namespace fbqs::test {

// Four servers; server 1 trusts {1,2} or {1,4}, the rest have one slice each.
// Induces the quorum system {{1,2},{1,2,3},{1,3,4},{1,2,3,4}}.
inline Fbqs hub_fbqs()
{
    NodeSet universe = NodeSet::of({1, 2, 3, 4});
    std::map<NodeId, std::vector<NodeSet>> slices;
    slices[1] = {NodeSet::of({1, 2}), NodeSet::of({1, 4})};
    slices[2] = {NodeSet::of({1, 2})};
    slices[3] = {NodeSet::of({1, 3})};
    slices[4] = {NodeSet::of({3, 4})};
    return Fbqs(universe, std::move(slices));
}

// Four servers, every server has a slice for each 3-set containing it.
// Induces the cardinality quorum system (all sets of 3 or more).
inline Fbqs cardinality_fbqs()
{
    NodeSet universe = NodeSet::of({1, 2, 3, 4});
    std::map<NodeId, std::vector<NodeSet>> slices;
    for (NodeId v : universe) {
        std::vector<NodeSet> qs;
        for_each_subset(universe, [&](NodeSet s) {
            if (s.size() == 3 && s.contains(v))
                qs.push_back(s);
        });
        slices[v] = qs;
    }
    return Fbqs(universe, std::move(slices));
}

inline Fbqs single_node_fbqs()
{
    return Fbqs(NodeSet::of({1}), {{1, {NodeSet::of({1})}}});
}

// Equivocation family: 3 is faulty and reports slice {1,3} to servers 1 and 4
// but {2,3} to server 2. Correct servers' slices match hub_fbqs.
inline SubjectiveFbqs equivocation_family()
{
    NodeSet universe = NodeSet::of({1, 2, 3, 4});
    std::map<NodeId, std::vector<NodeSet>> base;
    base[1] = {NodeSet::of({1, 2}), NodeSet::of({1, 4})};
    base[2] = {NodeSet::of({1, 2})};
    base[3] = {NodeSet::of({1, 3})};
    base[4] = {NodeSet::of({3, 4})};
    std::map<NodeId, std::map<NodeId, std::vector<NodeSet>>> overrides;
    overrides[2][3] = {NodeSet::of({2, 3})};
    return SubjectiveFbqs::from_overrides(universe, FailureScenario{NodeSet::of({3})}, base,
                                          overrides);
}

// Identical views of hub_fbqs for every correct server.
inline SubjectiveFbqs identical_views(NodeSet bad)
{
    Fbqs base = hub_fbqs();
    std::map<NodeId, Fbqs> views;
    for (NodeId v : base.universe() - bad)
        views.emplace(v, base);
    return SubjectiveFbqs(base.universe(), FailureScenario{bad}, std::move(views));
}

} // namespace fbqs::test
