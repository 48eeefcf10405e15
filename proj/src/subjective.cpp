#include "fbqs/subjective.hpp"

#include "fbqs/errors.hpp"

namespace fbqs {

SubjectiveFbqs::SubjectiveFbqs(NodeSet universe, FailureScenario scenario,
                               std::map<NodeId, Fbqs> views)
    : universe_(universe), scenario_(scenario), views_(std::move(views))
{
    if (!scenario_.bad.subset_of(universe_))
        throw DomainError("faulty set " + scenario_.bad.to_string() + " leaves the universe");
    NodeSet ok = universe_ - scenario_.bad;
    NodeSet keyed;
    for (const auto& [v, view] : views_) {
        keyed.add(v);
        if (view.universe() != universe_)
            throw DomainError("view of node " + std::to_string(v) +
                              " is over a different universe");
    }
    if (keyed != ok)
        throw DomainError("views must be keyed by exactly the correct servers, got " +
                          keyed.to_string() + " expected " + ok.to_string());
}

SubjectiveFbqs SubjectiveFbqs::from_overrides(
    NodeSet universe, FailureScenario scenario,
    const std::map<NodeId, std::vector<NodeSet>>& base_slices,
    const std::map<NodeId, std::map<NodeId, std::vector<NodeSet>>>& view_overrides)
{
    NodeSet ok = universe - scenario.bad;
    for (const auto& [viewer, per_target] : view_overrides) {
        if (!ok.contains(viewer))
            throw DomainError("override viewer " + std::to_string(viewer) +
                              " is not a correct server");
        for (const auto& [target, slices] : per_target) {
            (void)slices;
            if (!scenario.bad.contains(target))
                throw DomainError("override target " + std::to_string(target) +
                                  " is not a faulty server");
        }
    }
    std::map<NodeId, Fbqs> views;
    for (NodeId v : ok) {
        std::map<NodeId, std::vector<NodeSet>> slices = base_slices;
        auto it = view_overrides.find(v);
        if (it != view_overrides.end())
            for (const auto& [target, override_slices] : it->second)
                slices[target] = override_slices;
        views.emplace(v, Fbqs(universe, std::move(slices)));
    }
    return SubjectiveFbqs(universe, scenario, std::move(views));
}

const Fbqs& SubjectiveFbqs::view(NodeId v) const
{
    auto it = views_.find(v);
    if (it == views_.end())
        throw DomainError("no view for node " + std::to_string(v) +
                          " (faulty or outside the universe)");
    return it->second;
}

AxiomReport validate_agreement(const SubjectiveFbqs& sfbqs)
{
    AxiomCheck c{.name = "view-agreement"};
    NodeSet ok = sfbqs.ok();
    for (auto it1 = sfbqs.views().begin(); it1 != sfbqs.views().end() && c.pass; ++it1) {
        for (auto it2 = std::next(it1); it2 != sfbqs.views().end() && c.pass; ++it2) {
            for (NodeId v : ok) {
                auto s1 = it1->second.slices_of(v);
                auto s2 = it2->second.slices_of(v);
                if (!std::equal(s1.begin(), s1.end(), s2.begin(), s2.end())) {
                    c.pass = false;
                    c.witness_nodes = {it1->first, it2->first, v};
                    c.note = "views disagree on a correct server's slices";
                    break;
                }
            }
        }
    }
    return AxiomReport{{std::move(c)}};
}

bool subjective_quorum_intersection(const SubjectiveFbqs& sfbqs, std::size_t cap)
{
    for (const auto& [v, view] : sfbqs.views())
        if (!has_quorum_intersection(view, cap))
            return false;
    return true;
}

SubjectiveQuorumSystem induce_subjective_quorums(const SubjectiveFbqs& sfbqs, std::size_t cap)
{
    if (!subjective_quorum_intersection(sfbqs, cap))
        throw PreconditionError("subjective quorum system requires per-view quorum intersection");
    SubjectiveQuorumSystem out;
    for (const auto& [v, view] : sfbqs.views())
        out.per_view[v] = enumerate_quorums(view, cap);
    return out;
}

NodeSet subjective_intact_set(const SubjectiveFbqs& sfbqs, std::size_t cap)
{
    if (!subjective_quorum_intersection(sfbqs, cap))
        throw PreconditionError("subjective intact set requires per-view quorum intersection");
    bool first = true;
    NodeSet result;
    for (const auto& [v, view] : sfbqs.views()) {
        NodeSet mine = intact_set(view, sfbqs.scenario(), cap);
        if (first) {
            result = mine;
            first = false;
        } else if (mine != result) {
            throw InternalInvariantError("per-view intact sets disagree: " + result.to_string() +
                                         " vs " + mine.to_string() + " in view of node " +
                                         std::to_string(v));
        }
    }
    return result;
}

AxiomReport check_subjective_dqs(const SubjectiveDqs& sdqs)
{
    AxiomReport r;
    NodeSet ok = sdqs.ok();
    NodeSet bad = sdqs.scenario.bad;

    {
        AxiomCheck c{.name = "per-view-structure"};
        for (NodeId v : ok) {
            if (!sdqs.per_view_quorums.per_view.count(v) || !sdqs.per_view_fail_prone.count(v)) {
                c.pass = false;
                c.witness_nodes = {v};
                c.note = "missing view";
                break;
            }
            Dqs d{sdqs.per_view_quorums.per_view.at(v), sdqs.per_view_fail_prone.at(v)};
            AxiomReport base = check_dqs(d);
            if (!base.find("quorum-system")->pass || !base.find("fail-prone-antichain")->pass) {
                c.pass = false;
                c.witness_nodes = {v};
                c.note = "view fails quorum-system or antichain invariants";
                break;
            }
        }
        r.checks.push_back(std::move(c));
    }

    {
        AxiomCheck c{.name = "sd-safety"};
        for (NodeId v : ok) {
            bool covered = false;
            for (const NodeSet& b : sdqs.per_view_fail_prone.at(v).fail_sets) {
                if (bad.subset_of(b)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                c.pass = false;
                c.witness_nodes = {v};
                break;
            }
        }
        r.checks.push_back(std::move(c));
    }

    // All quorums known by anyone, for the cross-view quantifier.
    std::vector<NodeSet> all_quorums;
    for (NodeId v : ok)
        for (const NodeSet& u : sdqs.per_view_quorums.per_view.at(v).quorums)
            all_quorums.push_back(u);
    all_quorums = normalize_sets(std::move(all_quorums));

    {
        AxiomCheck c{.name = "sd-consistency"};
        AxiomCheck strong{.name = "sd-consistency-strong"};
        for (NodeId v : ok) {
            for (const NodeSet& u1 : sdqs.per_view_quorums.per_view.at(v).quorums) {
                for (const NodeSet& u2 : all_quorums) {
                    NodeSet inter = u1 & u2;
                    for (const NodeSet& b : sdqs.per_view_fail_prone.at(v).fail_sets) {
                        if (!inter.subset_of(b))
                            continue;
                        if (strong.pass) {
                            strong.pass = false;
                            strong.witness_nodes = {v};
                            strong.witness_sets = {u1, u2, b};
                        }
                        if (bad.subset_of(b) && c.pass) {
                            c.pass = false;
                            c.witness_nodes = {v};
                            c.witness_sets = {u1, u2, b};
                        }
                    }
                }
            }
        }
        r.checks.push_back(std::move(c));
        r.checks.push_back(std::move(strong));
    }

    {
        AxiomCheck c{.name = "sd-availability"};
        for (NodeId v : ok) {
            const auto& quorums = sdqs.per_view_quorums.per_view.at(v).quorums;
            for (const NodeSet& b : sdqs.per_view_fail_prone.at(v).fail_sets) {
                bool found = false;
                for (const NodeSet& u : quorums) {
                    if (!u.intersects(b)) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    c.pass = false;
                    c.witness_nodes = {v};
                    c.witness_sets = {b};
                    break;
                }
            }
            if (!c.pass)
                break;
        }
        r.checks.push_back(std::move(c));
    }
    return r;
}

SubjectiveDqs induced_subjective_dqs(const SubjectiveFbqs& sfbqs, std::size_t cap)
{
    if (!subjective_quorum_intersection(sfbqs, cap))
        throw PreconditionError("induced subjective DQS requires per-view quorum intersection");
    if (subjective_intact_set(sfbqs, cap).empty())
        throw PreconditionError("induced subjective DQS requires a non-empty intact set");

    SubjectiveDqs out;
    out.universe = sfbqs.universe();
    out.scenario = sfbqs.scenario();
    for (const auto& [v, view] : sfbqs.views()) {
        Dqs d = induced_dqs(view, cap);
        out.per_view_quorums.per_view[v] = std::move(d.quorum_system);
        out.per_view_fail_prone[v] = std::move(d.fail_prone);
    }
    AxiomReport r = check_subjective_dqs(out);
    // The strong variant is informational; the induction only promises the
    // covering form of consistency.
    for (const AxiomCheck& c : r.checks)
        if (!c.pass && c.name != "sd-consistency-strong")
            throw InternalInvariantError("induced subjective DQS fails " + c.name);
    return out;
}

bool subjective_v_blocking(const SubjectiveFbqs& sfbqs, NodeId v, NodeSet b)
{
    return is_v_blocking(sfbqs.view(v), v, b);
}

} // namespace fbqs
