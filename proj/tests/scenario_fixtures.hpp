#pragma once

// Scenario builders mirroring the shipped fixture files, for tests that need
// programmatic variations.

#include "fbqs/scenario.hpp"
#include "fixtures.hpp"

namespace fbqs::test {

inline Scenario base_scenario(const Fbqs& fb, VariantTag variant, SchedulerPolicy::Mode mode)
{
    Scenario s;
    s.universe = fb.universe();
    s.structure.slices = fb.slices();
    s.variant = variant;
    s.scheduler.mode = mode;
    s.scheduler.seed = 1;
    return s;
}

// Faulty client splits a/{1,2} and a2/{4}; faulty 3 echoes a to 1 and 2, then
// readies a to them once 1 has heard READY(a) from 2.
inline Scenario split_client_scenario(const Fbqs& fb, VariantTag variant,
                                      SchedulerPolicy::Mode mode)
{
    Scenario s = base_scenario(fb, variant, mode);
    s.faulty = NodeSet::of({3});
    s.client.correct = false;
    s.client.split = {{1, "a"}, {2, "a"}, {4, "a2"}};

    AdversaryAction echo;
    echo.trigger = Trigger{Trigger::Kind::AtStep, 0, {}};
    echo.action = ScriptSend{Message{MsgKind::Echo, "a", 3}, NodeSet::of({1, 2})};
    s.adversary.push_back(echo);

    AdversaryAction ready;
    ready.trigger = Trigger{Trigger::Kind::AfterReceive, 0,
                            ReceiveMatch{1, NodeId{2}, MsgKind::Ready, "a"}};
    ready.action = ScriptSend{Message{MsgKind::Ready, "a", 3}, NodeSet::of({1, 2})};
    s.adversary.push_back(ready);
    return s;
}

inline Scenario example4_scenario(SchedulerPolicy::Mode mode)
{
    return split_client_scenario(cardinality_fbqs(), VariantTag::Bracha, mode);
}

// Faulty client splits a/{1} and a2/{2,4}; faulty 3 echoes a2 to 2 only.
inline Scenario example5_scenario(SchedulerPolicy::Mode mode)
{
    Scenario s = base_scenario(cardinality_fbqs(), VariantTag::EchoDeliver, mode);
    s.faulty = NodeSet::of({3});
    s.client.correct = false;
    s.client.split = {{1, "a"}, {2, "a2"}, {4, "a2"}};
    AdversaryAction echo;
    echo.trigger = Trigger{Trigger::Kind::AtStep, 0, {}};
    echo.action = ScriptSend{Message{MsgKind::Echo, "a2", 3}, NodeSet::of({2})};
    s.adversary.push_back(echo);
    return s;
}

// Faulty client splits a/{1,2} and a2/{4}; faulty 3 stays silent.
inline Scenario example14_scenario(SchedulerPolicy::Mode mode)
{
    Scenario s = base_scenario(hub_fbqs(), VariantTag::Stellar, mode);
    s.faulty = NodeSet::of({3});
    s.client.correct = false;
    s.client.split = {{1, "a"}, {2, "a"}, {4, "a2"}};
    return s;
}

inline Scenario correct_client_scenario(const Fbqs& fb, VariantTag variant, NodeSet faulty,
                                        SchedulerPolicy::Mode mode)
{
    Scenario s = base_scenario(fb, variant, mode);
    s.faulty = faulty;
    s.client.correct = true;
    s.client.value = "a";
    return s;
}

// The equivocation setting: correct servers share the hub slices, faulty 3
// reports {1,3} to servers 1 and 4 but {2,3} to server 2.
inline Scenario example19_scenario(VariantTag variant, SchedulerPolicy::Mode mode)
{
    Scenario s = base_scenario(hub_fbqs(), variant, mode);
    s.faulty = NodeSet::of({3});
    s.client.correct = true;
    s.client.value = "a";
    s.structure.view_overrides[2][3] = {NodeSet::of({2, 3})};
    return s;
}

// Two servers trusting each other; the only quorum is {1,2}.
inline Scenario pair_scenario(SchedulerPolicy::Mode mode)
{
    Fbqs fb(NodeSet::of({1, 2}),
            {{1, {NodeSet::of({1, 2})}}, {2, {NodeSet::of({1, 2})}}});
    return correct_client_scenario(fb, VariantTag::Bracha, NodeSet{}, mode);
}

} // namespace fbqs::test
