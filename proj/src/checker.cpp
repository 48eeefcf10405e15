#include "fbqs/checker.hpp"

#include <algorithm>

#include "fbqs/errors.hpp"

namespace fbqs {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass:
        return "pass";
    case Verdict::Fail:
        return "fail";
    case Verdict::NotApplicable:
        return "not-applicable";
    }
    return "?";
}

bool PropertyReport::passes(SpecKind spec) const
{
    auto ok = [](Verdict v) { return v != Verdict::Fail; };
    bool safety = ok(no_duplication) && ok(integrity) && ok(consistency);
    if (spec == SpecKind::Reliable)
        return safety && ok(validity) && ok(totality);
    return safety && ok(validity_intact) && ok(totality_intact);
}

std::string PropertyReport::to_string(const std::vector<std::string>& names) const
{
    std::string out;
    auto line = [&](const char* name, Verdict v) {
        out += "property\t";
        out += name;
        out += "\t" + fbqs::to_string(v);
        auto it = witnesses.find(name);
        if (it != witnesses.end())
            out += "\twitness=" + it->second;
        out += "\n";
    };
    line("validity", validity);
    line("no_duplication", no_duplication);
    line("integrity", integrity);
    line("consistency", consistency);
    line("totality", totality);
    line("validity_intact", validity_intact);
    line("totality_intact", totality_intact);
    out += "context\tintact\t" + intact.to_string(names) + "\n";
    out += "context\tcovering-fail-prone\t";
    out += covering_fail_prone_exists ? "yes" : "no";
    out += "\n";
    out += "context\tintact-server-exists\t";
    out += intact_server_exists ? "yes" : "no";
    out += "\n";
    return out;
}

namespace {

bool classical_family(VariantTag tag)
{
    return tag == VariantTag::Bracha || tag == VariantTag::BrachaSubjective ||
           tag == VariantTag::EchoDeliver;
}

bool covers(const FailProneSystem& fp, NodeSet bad)
{
    for (const NodeSet& b : fp.fail_sets)
        if (bad.subset_of(b))
            return true;
    return false;
}

} // namespace

CheckContext make_check_context(const Scenario& scenario)
{
    ProtocolVariant variant = resolve_variant(scenario);
    bool covering = false;
    switch (variant.tag()) {
    case VariantTag::Bracha:
    case VariantTag::EchoDeliver:
        covering = covers(variant.dqs().fail_prone, scenario.faulty);
        break;
    case VariantTag::BrachaSubjective: {
        covering = true;
        for (const auto& [v, fp] : variant.sdqs().per_view_fail_prone)
            covering &= covers(fp, scenario.faulty);
        break;
    }
    case VariantTag::Stellar:
    case VariantTag::StellarOpen:
        covering = covers(induced_dqs(variant.fbqs()).fail_prone, scenario.faulty);
        break;
    case VariantTag::StellarSubjective: {
        covering = true;
        for (const auto& [v, view] : variant.sfbqs().views())
            covering &= covers(induced_dqs(view).fail_prone, scenario.faulty);
        break;
    }
    }
    return CheckContext{&scenario, std::move(variant), scenario_intact_set(scenario), covering};
}

namespace {

struct TraceFacts {
    std::map<NodeId, std::vector<Value>> deliveries; // per server, in trace order
    bool quiescent = false;
};

TraceFacts facts_of(const Trace& trace)
{
    TraceFacts f;
    f.quiescent = trace.status == TerminalStatus::Quiescent;
    for (const TraceEvent& ev : trace.events)
        if (ev.kind == TraceEvent::Kind::Deliver)
            f.deliveries[ev.a].push_back(ev.msg.value);
    return f;
}

std::string list_nodes(NodeSet nodes, const std::vector<std::string>& names)
{
    std::string out;
    for (NodeId v : nodes) {
        if (!out.empty())
            out += ",";
        out += NodeSet::node_name(v, names);
    }
    return out;
}

} // namespace

PropertyReport check_trace(const Trace& trace, const CheckContext& ctx)
{
    const Scenario& scn = *ctx.scenario;
    const auto& names = scn.names;
    TraceFacts f = facts_of(trace);
    NodeSet correct = scn.correct();

    PropertyReport r;
    r.intact = ctx.intact;
    r.covering_fail_prone_exists = ctx.covering_fail_prone_exists;
    r.intact_server_exists = !ctx.intact.empty();

    // No duplication: at most one delivery per server.
    r.no_duplication = Verdict::Pass;
    for (const auto& [node, values] : f.deliveries) {
        if (values.size() > 1) {
            r.no_duplication = Verdict::Fail;
            r.witnesses["no_duplication"] =
                NodeSet::node_name(node, names) + " delivered " + std::to_string(values.size()) +
                " values";
            break;
        }
    }

    // Integrity: with a correct client, anything delivered by a correct server
    // must be the value the client broadcast.
    r.integrity = Verdict::Pass;
    if (scn.client.correct) {
        for (const auto& [node, values] : f.deliveries) {
            if (!correct.contains(node))
                continue;
            for (const Value& v : values) {
                if (v != scn.client.value) {
                    r.integrity = Verdict::Fail;
                    r.witnesses["integrity"] = NodeSet::node_name(node, names) + " delivered " + v;
                    break;
                }
            }
        }
    }

    // Consistency: correct servers never deliver different values.
    r.consistency = Verdict::Pass;
    {
        const Value* seen = nullptr;
        NodeId seen_node = 0;
        for (const auto& [node, values] : f.deliveries) {
            if (!correct.contains(node) || values.empty())
                continue;
            if (seen && *seen != values.front()) {
                r.consistency = Verdict::Fail;
                r.witnesses["consistency"] = NodeSet::node_name(seen_node, names) + " delivered " +
                                             *seen + ", " + NodeSet::node_name(node, names) +
                                             " delivered " + values.front();
                break;
            }
            seen = &values.front();
            seen_node = node;
        }
    }

    auto delivered = [&](NodeId v) {
        auto it = f.deliveries.find(v);
        return it != f.deliveries.end() && !it->second.empty();
    };
    auto delivered_value_is = [&](NodeId v, const Value& val) {
        auto it = f.deliveries.find(v);
        return it != f.deliveries.end() && !it->second.empty() && it->second.front() == val;
    };

    // Liveness: only quiescent traces have settled.
    if (f.quiescent) {
        if (scn.client.correct) {
            NodeSet missing;
            for (NodeId v : correct)
                if (!delivered_value_is(v, scn.client.value))
                    missing.add(v);
            r.validity = missing.empty() ? Verdict::Pass : Verdict::Fail;
            if (!missing.empty())
                r.witnesses["validity"] = list_nodes(missing, names);

            NodeSet missing_intact;
            for (NodeId v : ctx.intact)
                if (!delivered_value_is(v, scn.client.value))
                    missing_intact.add(v);
            r.validity_intact = missing_intact.empty() ? Verdict::Pass : Verdict::Fail;
            if (!missing_intact.empty())
                r.witnesses["validity_intact"] = list_nodes(missing_intact, names);
        } else {
            r.validity = Verdict::Pass; // vacuous: the sender is not correct
            r.validity_intact = Verdict::Pass;
        }

        bool any_correct_delivered = false;
        for (NodeId v : correct)
            any_correct_delivered |= delivered(v);
        if (any_correct_delivered) {
            NodeSet missing;
            for (NodeId v : correct)
                if (!delivered(v))
                    missing.add(v);
            r.totality = missing.empty() ? Verdict::Pass : Verdict::Fail;
            if (!missing.empty())
                r.witnesses["totality"] = list_nodes(missing, names);

            NodeSet missing_intact;
            for (NodeId v : ctx.intact)
                if (!delivered(v))
                    missing_intact.add(v);
            r.totality_intact = missing_intact.empty() ? Verdict::Pass : Verdict::Fail;
            if (!missing_intact.empty())
                r.witnesses["totality_intact"] = list_nodes(missing_intact, names);
        } else {
            r.totality = Verdict::Pass; // vacuous: nobody delivered
            r.totality_intact = Verdict::Pass;
        }
    }
    return r;
}

PropertyReport check_trace(const Trace& trace, const Scenario& scenario, NodeSet intact)
{
    CheckContext ctx = make_check_context(scenario);
    ctx.intact = intact;
    return check_trace(trace, ctx);
}

AxiomReport check_lemma_invariants(const Trace& trace, const CheckContext& ctx)
{
    const Scenario& scn = *ctx.scenario;
    NodeSet family = classical_family(ctx.variant.tag()) ? scn.correct() : ctx.intact;

    AxiomReport r;

    // (a) at most one value readied across the family
    {
        AxiomCheck c{.name = "unique-ready-value"};
        std::map<Value, NodeId> senders;
        for (const TraceEvent& ev : trace.events) {
            if (ev.kind != TraceEvent::Kind::Send || ev.msg.kind != MsgKind::Ready ||
                !family.contains(ev.a))
                continue;
            senders.try_emplace(ev.msg.value, ev.a);
        }
        if (senders.size() > 1) {
            c.pass = false;
            for (const auto& [value, node] : senders)
                c.witness_nodes.push_back(node);
            c.note = "distinct ready values";
        }
        r.checks.push_back(std::move(c));
    }

    // (b) the first family READY(a) is backed by an echo quorum at its sender
    {
        AxiomCheck c{.name = "first-ready-echo-quorum"};
        std::map<Value, bool> checked;
        std::map<NodeId, std::map<Value, NodeSet>> echoes;
        for (const TraceEvent& ev : trace.events) {
            if (ev.kind == TraceEvent::Kind::Receive && ev.msg.kind == MsgKind::Echo &&
                family.contains(ev.a)) {
                echoes[ev.a][ev.msg.value].add(ev.b);
            } else if (ev.kind == TraceEvent::Kind::Send && ev.msg.kind == MsgKind::Ready &&
                       family.contains(ev.a) && !checked[ev.msg.value]) {
                checked[ev.msg.value] = true;
                if (!ctx.variant.quorum_in(ev.a, echoes[ev.a][ev.msg.value])) {
                    c.pass = false;
                    c.witness_nodes = {ev.a};
                    c.note = "first ready for " + ev.msg.value + " lacked an echo quorum";
                    break;
                }
            }
        }
        r.checks.push_back(std::move(c));
    }

    // (c) any correct delivery is preceded by an echo quorum somewhere in the family
    {
        AxiomCheck c{.name = "delivery-echo-quorum"};
        std::map<Value, bool> quorum_seen;
        std::map<NodeId, std::map<Value, NodeSet>> echoes;
        for (const TraceEvent& ev : trace.events) {
            if (ev.kind == TraceEvent::Kind::Receive && ev.msg.kind == MsgKind::Echo &&
                family.contains(ev.a)) {
                NodeSet& got = echoes[ev.a][ev.msg.value];
                got.add(ev.b);
                if (ctx.variant.quorum_in(ev.a, got))
                    quorum_seen[ev.msg.value] = true;
            } else if (ev.kind == TraceEvent::Kind::Deliver && scn.correct().contains(ev.a)) {
                if (!quorum_seen[ev.msg.value]) {
                    c.pass = false;
                    c.witness_nodes = {ev.a};
                    c.note = "delivery of " + ev.msg.value + " without a prior echo quorum";
                    break;
                }
            }
        }
        r.checks.push_back(std::move(c));
    }
    return r;
}

AxiomReport check_lemma_invariants(const Trace& trace, const Scenario& scenario, NodeSet intact)
{
    CheckContext ctx = make_check_context(scenario);
    ctx.intact = intact;
    return check_lemma_invariants(trace, ctx);
}

PropertyReport check_exploration(std::span<const Trace> traces, const Scenario& scenario,
                                 SpecKind spec)
{
    CheckContext ctx = make_check_context(scenario);

    PropertyReport agg;
    agg.intact = ctx.intact;
    agg.covering_fail_prone_exists = ctx.covering_fail_prone_exists;
    agg.intact_server_exists = !ctx.intact.empty();

    auto merge = [](Verdict& into, Verdict v) {
        if (v == Verdict::Fail)
            into = Verdict::Fail;
        else if (v == Verdict::Pass && into == Verdict::NotApplicable)
            into = Verdict::Pass;
    };
    std::size_t index = 0;
    for (const Trace& t : traces) {
        PropertyReport r = check_trace(t, ctx);
        auto take = [&](Verdict& into, Verdict v, const char* name) {
            if (v == Verdict::Fail && into != Verdict::Fail)
                agg.witnesses[name] =
                    "trace " + std::to_string(index) + ": " + r.witnesses.at(name);
            merge(into, v);
        };
        take(agg.validity, r.validity, "validity");
        take(agg.no_duplication, r.no_duplication, "no_duplication");
        take(agg.integrity, r.integrity, "integrity");
        take(agg.consistency, r.consistency, "consistency");
        take(agg.totality, r.totality, "totality");
        take(agg.validity_intact, r.validity_intact, "validity_intact");
        take(agg.totality_intact, r.totality_intact, "totality_intact");
        ++index;
    }
    (void)spec;
    return agg;
}

} // namespace fbqs
