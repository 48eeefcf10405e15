#include "fbqs/quorum.hpp"

#include <algorithm>
#include <unordered_map>

#include "fbqs/errors.hpp"

namespace fbqs {

std::vector<NodeSet> normalize_sets(std::vector<NodeSet> sets)
{
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return sets;
}

Fbqs::Fbqs(NodeSet universe, std::map<NodeId, std::vector<NodeSet>> slices)
    : universe_(universe), slices_(std::move(slices))
{
    for (NodeId v : universe_) {
        auto it = slices_.find(v);
        if (it == slices_.end() || it->second.empty())
            throw DomainError("node " + std::to_string(v) + " has no quorum slice");
        for (const NodeSet& q : it->second) {
            if (!q.contains(v))
                throw DomainError("slice " + q.to_string() + " does not contain its owner " +
                                  std::to_string(v));
            if (!q.subset_of(universe_))
                throw DomainError("slice " + q.to_string() + " of node " + std::to_string(v) +
                                  " leaves the universe");
        }
        it->second = normalize_sets(std::move(it->second));
    }
    for (const auto& [v, qs] : slices_)
        if (!universe_.contains(v))
            throw DomainError("slices declared for node " + std::to_string(v) +
                              " outside the universe");
}

std::span<const NodeSet> Fbqs::slices_of(NodeId v) const
{
    auto it = slices_.find(v);
    if (it == slices_.end())
        throw DomainError("node " + std::to_string(v) + " not in universe");
    return it->second;
}

bool QuorumSystem::contains(NodeSet u) const
{
    return std::binary_search(quorums.begin(), quorums.end(), u);
}

static void require_cap(const Fbqs& fbqs, std::size_t cap)
{
    if (static_cast<std::size_t>(fbqs.universe().size()) > cap)
        throw CapacityError("universe of " + std::to_string(fbqs.universe().size()) +
                            " nodes exceeds the enumeration cap of " + std::to_string(cap));
}

bool is_quorum(const Fbqs& fbqs, NodeSet u)
{
    if (!u.subset_of(fbqs.universe()))
        throw DomainError("candidate quorum " + u.to_string() + " leaves the universe");
    if (u.empty())
        return false;
    for (NodeId v : u) {
        bool covered = false;
        for (const NodeSet& q : fbqs.slices_of(v)) {
            if (q.subset_of(u)) {
                covered = true;
                break;
            }
        }
        if (!covered)
            return false;
    }
    return true;
}

QuorumSystem enumerate_quorums(const Fbqs& fbqs, std::size_t cap)
{
    require_cap(fbqs, cap);
    QuorumSystem qs;
    for_each_subset(fbqs.universe(), [&](NodeSet u) {
        if (!u.empty() && is_quorum(fbqs, u))
            qs.quorums.push_back(u);
    });
    return qs;
}

std::vector<NodeSet> minimal_quorums(const Fbqs& fbqs, std::size_t cap)
{
    QuorumSystem qs = enumerate_quorums(fbqs, cap);
    std::vector<NodeSet> out;
    for (const NodeSet& u : qs.quorums) {
        bool minimal = true;
        for (const NodeSet& w : qs.quorums) {
            if (w != u && w.subset_of(u)) {
                minimal = false;
                break;
            }
        }
        if (minimal)
            out.push_back(u);
    }
    return out;
}

bool has_quorum_intersection(const Fbqs& fbqs, std::size_t cap)
{
    std::vector<NodeSet> mins = minimal_quorums(fbqs, cap);
    for (std::size_t i = 0; i < mins.size(); ++i)
        for (std::size_t j = i + 1; j < mins.size(); ++j)
            if (!mins[i].intersects(mins[j]))
                return false;
    return true;
}

Fbqs project(const Fbqs& fbqs, NodeSet i)
{
    if (i.empty())
        throw DomainError("cannot project to an empty universe");
    if (!i.subset_of(fbqs.universe()))
        throw DomainError("projection target " + i.to_string() + " leaves the universe");
    std::map<NodeId, std::vector<NodeSet>> slices;
    for (NodeId v : i) {
        std::vector<NodeSet> qs;
        for (const NodeSet& q : fbqs.slices_of(v))
            qs.push_back(q & i);
        slices[v] = normalize_sets(std::move(qs));
    }
    return Fbqs(i, std::move(slices));
}

NodeSet largest_quorum_within(const Fbqs& fbqs, NodeSet candidates)
{
    NodeSet w = candidates & fbqs.universe();
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v : w) {
            bool covered = false;
            for (const NodeSet& q : fbqs.slices_of(v)) {
                if (q.subset_of(w)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                w.remove(v);
                changed = true;
            }
        }
    }
    return w;
}

NodeSet intact_set(const Fbqs& fbqs, const FailureScenario& scenario, std::size_t cap)
{
    if (!scenario.bad.subset_of(fbqs.universe()))
        throw DomainError("faulty set " + scenario.bad.to_string() + " leaves the universe");
    if (!has_quorum_intersection(fbqs, cap))
        throw PreconditionError("intact set requires quorum intersection");

    NodeSet ok = fbqs.universe() - scenario.bad;
    NodeSet result;
    for (const NodeSet& q : enumerate_quorums(fbqs, cap).quorums) {
        if (q.subset_of(ok) && has_quorum_intersection(project(fbqs, q), cap))
            result |= q;
    }
    if (!result.empty()) {
        // The union of candidates must itself be a candidate.
        if (!is_quorum(fbqs, result) || !has_quorum_intersection(project(fbqs, result), cap))
            throw InternalInvariantError("union of intact candidates is not a candidate");
    }
    return result;
}

bool is_v_blocking(const Fbqs& fbqs, NodeId v, NodeSet b)
{
    for (const NodeSet& q : fbqs.slices_of(v))
        if (!q.intersects(b))
            return false;
    return true;
}

AxiomReport check_dqs(const Dqs& dqs, const std::optional<FailureScenario>& scenario)
{
    AxiomReport r;
    const auto& qs = dqs.quorum_system.quorums;
    const auto& bs = dqs.fail_prone.fail_sets;

    {
        AxiomCheck c{.name = "quorum-system"};
        if (qs.empty()) {
            c.pass = false;
            c.note = "no quorums";
        }
        for (const NodeSet& u : qs) {
            if (u.empty()) {
                c.pass = false;
                c.note = "empty quorum";
                break;
            }
        }
        if (c.pass) {
            for (std::size_t i = 0; i < qs.size() && c.pass; ++i) {
                for (std::size_t j = i; j < qs.size(); ++j) {
                    if (!qs[i].intersects(qs[j])) {
                        c.pass = false;
                        c.witness_sets = {qs[i], qs[j]};
                        c.note = "disjoint quorums";
                        break;
                    }
                    if (!dqs.quorum_system.contains(qs[i] | qs[j])) {
                        c.pass = false;
                        c.witness_sets = {qs[i], qs[j]};
                        c.note = "union of quorums is not a quorum";
                        break;
                    }
                }
            }
        }
        r.checks.push_back(std::move(c));
    }

    {
        AxiomCheck c{.name = "fail-prone-antichain"};
        if (bs.empty()) {
            c.pass = false;
            c.note = "no fail-prone sets";
        }
        for (std::size_t i = 0; i < bs.size() && c.pass; ++i) {
            for (std::size_t j = 0; j < bs.size(); ++j) {
                if (i != j && bs[i].subset_of(bs[j])) {
                    c.pass = false;
                    c.witness_sets = {bs[i], bs[j]};
                    break;
                }
            }
        }
        r.checks.push_back(std::move(c));
    }

    {
        AxiomCheck c{.name = "d-consistency"};
        for (std::size_t i = 0; i < qs.size() && c.pass; ++i) {
            for (std::size_t j = i; j < qs.size() && c.pass; ++j) {
                NodeSet inter = qs[i] & qs[j];
                for (const NodeSet& b : bs) {
                    if (inter.subset_of(b)) {
                        c.pass = false;
                        c.witness_sets = {qs[i], qs[j], b};
                        break;
                    }
                }
            }
        }
        r.checks.push_back(std::move(c));
    }

    {
        AxiomCheck c{.name = "d-availability"};
        for (const NodeSet& b : bs) {
            bool found = false;
            for (const NodeSet& u : qs) {
                if (!u.intersects(b)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                c.pass = false;
                c.witness_sets = {b};
                break;
            }
        }
        r.checks.push_back(std::move(c));
    }

    if (scenario) {
        AxiomCheck c{.name = "fail-prone-covers-faulty"};
        c.pass = false;
        for (const NodeSet& b : bs) {
            if (scenario->bad.subset_of(b)) {
                c.pass = true;
                c.witness_sets = {b};
                break;
            }
        }
        if (!c.pass)
            c.witness_sets = {scenario->bad};
        r.checks.push_back(std::move(c));
    }
    return r;
}

Dqs induced_dqs(const Fbqs& fbqs, std::size_t cap)
{
    if (!has_quorum_intersection(fbqs, cap))
        throw PreconditionError("induced DQS requires quorum intersection");

    QuorumSystem qs = enumerate_quorums(fbqs, cap);

    // Projection quorum intersection does not depend on the failure set, so it
    // is computed once per quorum.
    std::vector<char> proj_qi(qs.quorums.size());
    for (std::size_t i = 0; i < qs.quorums.size(); ++i)
        proj_qi[i] = has_quorum_intersection(project(fbqs, qs.quorums[i]), cap) ? 1 : 0;

    std::unordered_map<std::uint64_t, bool> leaves_intact;
    for_each_subset(fbqs.universe(), [&](NodeSet bad) {
        NodeSet ok = fbqs.universe() - bad;
        bool nonempty = false;
        for (std::size_t i = 0; i < qs.quorums.size(); ++i) {
            if (proj_qi[i] && qs.quorums[i].subset_of(ok)) {
                nonempty = true;
                break;
            }
        }
        leaves_intact[bad.bits()] = nonempty;
    });

    std::vector<NodeSet> maximal;
    for_each_subset(fbqs.universe(), [&](NodeSet bad) {
        if (!leaves_intact[bad.bits()])
            return;
        for (NodeId x : fbqs.universe() - bad)
            if (leaves_intact[(bad | NodeSet::of({x})).bits()])
                return;
        maximal.push_back(bad);
    });

    Dqs d{std::move(qs), FailProneSystem{normalize_sets(std::move(maximal))}};
    if (!check_dqs(d).all_pass())
        throw InternalInvariantError("induced DQS fails its axioms");
    return d;
}

} // namespace fbqs
