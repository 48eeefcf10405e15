#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fbqs/errors.hpp"
#include "fbqs/subjective.hpp"
#include "fixtures.hpp"

using namespace fbqs;
using test::equivocation_family;
using test::hub_fbqs;
using test::identical_views;

namespace {

std::vector<NodeSet> sets(std::initializer_list<NodeSet> xs)
{
    return normalize_sets(std::vector<NodeSet>(xs));
}

} // namespace

TEST_CASE("view agreement")
{
    SUBCASE("equivocation family agrees on correct servers")
    {
        CHECK(validate_agreement(equivocation_family()).all_pass());
    }
    SUBCASE("a mutated view is caught with a witness")
    {
        SubjectiveFbqs fam = equivocation_family();
        std::map<NodeId, Fbqs> views = fam.views();
        std::map<NodeId, std::vector<NodeSet>> slices = views.at(2).slices();
        slices[1] = {NodeSet::of({1, 2})}; // drop {1,4} in 2's view of 1
        views.erase(2);
        views.emplace(2, Fbqs(fam.universe(), std::move(slices)));
        SubjectiveFbqs mutated(fam.universe(), fam.scenario(), std::move(views));

        AxiomReport r = validate_agreement(mutated);
        CHECK_FALSE(r.all_pass());
        REQUIRE(r.checks.size() == 1);
        CHECK(r.checks[0].witness_nodes.size() == 3);
        CHECK(r.checks[0].witness_nodes[2] == 1);
    }
    SUBCASE("single correct node")
    {
        Fbqs fb(NodeSet::of({1, 2}),
                {{1, {NodeSet::of({1})}}, {2, {NodeSet::of({2})}}});
        std::map<NodeId, Fbqs> views;
        views.emplace(1, fb);
        SubjectiveFbqs solo(fb.universe(), FailureScenario{NodeSet::of({2})}, std::move(views));
        CHECK(validate_agreement(solo).all_pass());
    }
    SUBCASE("views must be keyed by exactly the correct servers")
    {
        Fbqs fb = hub_fbqs();
        std::map<NodeId, Fbqs> views;
        views.emplace(1, fb);
        CHECK_THROWS_AS(
            SubjectiveFbqs(fb.universe(), FailureScenario{NodeSet::of({3})}, std::move(views)),
            DomainError);
    }
}

TEST_CASE("subjective quorum intersection")
{
    CHECK(subjective_quorum_intersection(equivocation_family()));
    CHECK(subjective_quorum_intersection(identical_views(NodeSet::of({3}))));

    // Identical two-node views with disjoint quorums.
    Fbqs split(NodeSet::of({1, 2}), {{1, {NodeSet::of({1})}}, {2, {NodeSet::of({2})}}});
    std::map<NodeId, Fbqs> views;
    views.emplace(1, split);
    views.emplace(2, split);
    SubjectiveFbqs fam(split.universe(), FailureScenario{}, std::move(views));
    CHECK_FALSE(subjective_quorum_intersection(fam));
}

TEST_CASE("induced subjective quorum system")
{
    SubjectiveQuorumSystem q = induce_subjective_quorums(equivocation_family());
    std::vector<NodeSet> q14 = sets({NodeSet::of({1, 2}), NodeSet::of({1, 2, 3}),
                                     NodeSet::of({1, 3, 4}), NodeSet::of({1, 2, 3, 4})});
    std::vector<NodeSet> q2 =
        sets({NodeSet::of({1, 2}), NodeSet::of({1, 2, 3}), NodeSet::of({1, 2, 3, 4})});
    CHECK(q.per_view.at(1).quorums == q14);
    CHECK(q.per_view.at(4).quorums == q14);
    CHECK(q.per_view.at(2).quorums == q2);

    // The equivocation shows: 1 and 4 consider {1,3,4} a quorum, 2 does not.
    CHECK(q.per_view.at(1).contains(NodeSet::of({1, 3, 4})));
    CHECK_FALSE(q.per_view.at(2).contains(NodeSet::of({1, 3, 4})));

    SubjectiveQuorumSystem ident = induce_subjective_quorums(identical_views(NodeSet::of({3})));
    for (const auto& [v, qs] : ident.per_view)
        CHECK(qs == enumerate_quorums(hub_fbqs()));
}

TEST_CASE("subjective intact set")
{
    CHECK(subjective_intact_set(equivocation_family()) == NodeSet::of({1, 2}));
    CHECK(subjective_intact_set(identical_views(NodeSet::of({3}))) == NodeSet::of({1, 2}));
    CHECK(subjective_intact_set(identical_views(NodeSet{})) == hub_fbqs().universe());

    // Per-view results coincide.
    SubjectiveFbqs fam = equivocation_family();
    for (const auto& [v, view] : fam.views())
        CHECK(intact_set(view, fam.scenario()) == NodeSet::of({1, 2}));
}

TEST_CASE("subjective DQS axioms")
{
    SubjectiveDqs induced = induced_subjective_dqs(equivocation_family());

    SUBCASE("induced system passes")
    {
        AxiomReport r = check_subjective_dqs(induced);
        CHECK(r.find("sd-safety")->pass);
        CHECK(r.find("sd-consistency")->pass);
        CHECK(r.find("sd-availability")->pass);
    }
    SUBCASE("empty fail-prone sets break SD-safety")
    {
        SubjectiveDqs broken = induced;
        for (auto& [v, fp] : broken.per_view_fail_prone)
            fp = FailProneSystem{{NodeSet{}}};
        AxiomReport r = check_subjective_dqs(broken);
        CHECK_FALSE(r.find("sd-safety")->pass);
        CHECK(r.find("sd-consistency")->pass); // vacuous: no covering element
    }
    SUBCASE("an oversized covering element breaks SD-consistency")
    {
        SubjectiveDqs broken = induced;
        broken.per_view_fail_prone[2] = FailProneSystem{{NodeSet::of({1, 3, 4})}};
        AxiomReport r = check_subjective_dqs(broken);
        const AxiomCheck* c = r.find("sd-consistency");
        CHECK_FALSE(c->pass);

        // Exhaustive quadruple scan finds a witness too.
        bool found = false;
        for (NodeId v : broken.ok()) {
            for (const NodeSet& u1 : broken.per_view_quorums.per_view.at(v).quorums)
                for (NodeId v2 : broken.ok())
                    for (const NodeSet& u2 : broken.per_view_quorums.per_view.at(v2).quorums)
                        for (const NodeSet& b : broken.per_view_fail_prone.at(v).fail_sets)
                            if (broken.scenario.bad.subset_of(b) && (u1 & u2).subset_of(b))
                                found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("induced subjective DQS")
{
    SUBCASE("equivocation family: per-view fail-prone sets, frozen from the enumeration oracle")
    {
        SubjectiveDqs d = induced_subjective_dqs(equivocation_family());
        CHECK(d.per_view_fail_prone.at(1).fail_sets ==
              sets({NodeSet::of({2}), NodeSet::of({3, 4})}));
        CHECK(d.per_view_fail_prone.at(4).fail_sets ==
              sets({NodeSet::of({2}), NodeSet::of({3, 4})}));
        CHECK(d.per_view_fail_prone.at(2).fail_sets == sets({NodeSet::of({3, 4})}));

        // Oracle: per view, enumerate all bad sets and keep the maximal ones
        // leaving that view's intact set non-empty.
        SubjectiveFbqs fam = equivocation_family();
        for (const auto& [v, view] : fam.views()) {
            std::vector<NodeSet> good;
            for_each_subset(view.universe(), [&](NodeSet bad) {
                if (!intact_set(view, FailureScenario{bad}).empty())
                    good.push_back(bad);
            });
            std::vector<NodeSet> maximal;
            for (const NodeSet& b : good) {
                bool is_max = true;
                for (const NodeSet& b2 : good)
                    if (b2 != b && b.subset_of(b2))
                        is_max = false;
                if (is_max)
                    maximal.push_back(b);
            }
            CHECK(d.per_view_fail_prone.at(v).fail_sets == normalize_sets(std::move(maximal)));
        }
    }
    SUBCASE("identical views degenerate to the objective induction")
    {
        SubjectiveDqs d = induced_subjective_dqs(identical_views(NodeSet::of({3})));
        Dqs objective = induced_dqs(hub_fbqs());
        for (const auto& [v, qs] : d.per_view_quorums.per_view)
            CHECK(qs == objective.quorum_system);
        for (const auto& [v, fp] : d.per_view_fail_prone)
            CHECK(fp.fail_sets == sets({NodeSet::of({2}), NodeSet::of({3, 4})}));
    }
    SUBCASE("identical views: SD-consistency matches the weakened objective form")
    {
        SubjectiveDqs d = induced_subjective_dqs(identical_views(NodeSet::of({3})));
        Dqs objective = induced_dqs(hub_fbqs());
        NodeSet bad = NodeSet::of({3});

        bool weakened_holds = true;
        for (const NodeSet& u1 : objective.quorum_system.quorums)
            for (const NodeSet& u2 : objective.quorum_system.quorums)
                for (const NodeSet& b : objective.fail_prone.fail_sets)
                    if (bad.subset_of(b) && (u1 & u2).subset_of(b))
                        weakened_holds = false;
        CHECK(check_subjective_dqs(d).find("sd-consistency")->pass == weakened_holds);
    }
}

TEST_CASE("subjective v-blocking")
{
    SubjectiveFbqs fam = equivocation_family();
    CHECK(subjective_v_blocking(fam, 1, NodeSet::of({2, 4})));
    CHECK(subjective_v_blocking(fam, 2, NodeSet::of({1})));
    for (NodeId v : fam.ok())
        CHECK_FALSE(subjective_v_blocking(fam, v, NodeSet{}));
    CHECK_THROWS_AS(subjective_v_blocking(fam, 3, NodeSet::of({1})), DomainError);
}
