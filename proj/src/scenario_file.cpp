#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbqs/cli.hpp"
#include "fbqs/errors.hpp"

namespace fbqs {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ParseError(where.empty() ? what : where + ": " + what);
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            known = known || key == a;
        if (!known)
            fail(where, "semantic: unknown field '" + key + "'");
    }
}

struct NameTable {
    std::vector<std::string> names;
    std::map<std::string, NodeId> ids;

    NodeId id_of(const json& j, const std::string& where) const
    {
        if (!j.is_string())
            fail(where, "semantic: node names are strings");
        auto it = ids.find(j.get<std::string>());
        if (it == ids.end())
            fail(where, "reference: unknown node '" + j.get<std::string>() + "'");
        return it->second;
    }

    NodeSet set_of(const json& j, const std::string& where) const
    {
        if (!j.is_array())
            fail(where, "semantic: expected a list of node names");
        NodeSet s;
        for (const json& name : j)
            s.add(id_of(name, where));
        return s;
    }
};

std::vector<NodeSet> parse_slices(const json& j, const NameTable& nodes, NodeId owner,
                                  const std::string& where)
{
    if (!j.is_array() || j.empty())
        fail(where, "semantic: a node needs at least one slice");
    std::vector<NodeSet> out;
    for (const json& slice : j) {
        NodeSet s = nodes.set_of(slice, where);
        if (!s.contains(owner))
            fail(where, "semantic: slice must contain its owner");
        out.push_back(s);
    }
    return out;
}

MsgKind parse_kind(const json& j, const std::string& where)
{
    std::string k = j.is_string() ? j.get<std::string>() : "";
    if (k == "BCAST")
        return MsgKind::Bcast;
    if (k == "ECHO")
        return MsgKind::Echo;
    if (k == "READY")
        return MsgKind::Ready;
    fail(where, "semantic: message kind must be BCAST, ECHO or READY");
}

VariantTag parse_variant(const json& j, const std::string& where)
{
    std::string v = j.is_string() ? j.get<std::string>() : "";
    for (VariantTag tag : {VariantTag::Bracha, VariantTag::Stellar, VariantTag::StellarOpen,
                           VariantTag::BrachaSubjective, VariantTag::StellarSubjective,
                           VariantTag::EchoDeliver})
        if (v == to_string(tag))
            return tag;
    fail(where, "semantic: unknown protocol variant '" + v + "'");
}

std::uint64_t parse_uint(const json& j, const std::string& where)
{
    if (!j.is_number_unsigned())
        fail(where, "semantic: expected a non-negative integer");
    return j.get<std::uint64_t>();
}

} // namespace

Scenario parse_scenario(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("", std::string("syntax: ") + e.what());
    }
    if (!doc.is_object())
        fail("", "semantic: the scenario document must be an object");
    expect_keys(doc, "scenario",
                {"universe", "slices", "views", "faulty", "client", "variant", "disable_line12",
                 "adversary", "scheduler", "bounds"});
    for (const char* required : {"universe", "slices", "client", "variant"})
        if (!doc.contains(required))
            fail("scenario", std::string("semantic: missing field '") + required + "'");

    Scenario s;

    NameTable nodes;
    if (!doc["universe"].is_array() || doc["universe"].empty())
        fail("universe", "semantic: expected a non-empty list of node names");
    for (const json& name : doc["universe"]) {
        if (!name.is_string())
            fail("universe", "semantic: node names are strings");
        std::string n = name.get<std::string>();
        if (nodes.ids.count(n))
            fail("universe", "semantic: duplicate node '" + n + "'");
        NodeId id = static_cast<NodeId>(nodes.names.size());
        if (id >= 64)
            fail("universe", "semantic: at most 64 nodes are supported");
        nodes.ids[n] = id;
        nodes.names.push_back(n);
        s.universe.add(id);
    }
    s.names = nodes.names;

    if (doc.contains("faulty"))
        s.faulty = nodes.set_of(doc["faulty"], "faulty");

    if (!doc["slices"].is_object())
        fail("slices", "semantic: expected a map from node to slice list");
    for (const auto& [name, slices] : doc["slices"].items()) {
        auto it = nodes.ids.find(name);
        if (it == nodes.ids.end())
            fail("slices", "reference: unknown node '" + name + "'");
        s.structure.slices[it->second] = parse_slices(slices, nodes, it->second, "slices." + name);
    }
    for (NodeId v : s.universe)
        if (!s.structure.slices.count(v))
            fail("slices", "semantic: node '" + nodes.names[v] + "' has no slices");

    if (doc.contains("views")) {
        if (!doc["views"].is_object())
            fail("views", "semantic: expected a map from viewer to overrides");
        for (const auto& [viewer, overrides] : doc["views"].items()) {
            auto vit = nodes.ids.find(viewer);
            if (vit == nodes.ids.end())
                fail("views", "reference: unknown node '" + viewer + "'");
            if (s.faulty.contains(vit->second))
                fail("views", "semantic: views keyed by a faulty node '" + viewer + "'");
            if (!overrides.is_object())
                fail("views." + viewer, "semantic: expected a map from faulty node to slices");
            for (const auto& [target, slices] : overrides.items()) {
                auto tit = nodes.ids.find(target);
                if (tit == nodes.ids.end())
                    fail("views." + viewer, "reference: unknown node '" + target + "'");
                if (!s.faulty.contains(tit->second))
                    fail("views." + viewer,
                         "semantic: override target '" + target + "' is not faulty");
                s.structure.view_overrides[vit->second][tit->second] =
                    parse_slices(slices, nodes, tit->second, "views." + viewer + "." + target);
            }
        }
    }

    {
        const json& client = doc["client"];
        if (!client.is_object())
            fail("client", "semantic: expected an object");
        expect_keys(client, "client", {"value", "split"});
        if (client.contains("value") == client.contains("split"))
            fail("client", "semantic: exactly one of 'value' or 'split' is required");
        if (client.contains("value")) {
            if (!client["value"].is_string())
                fail("client.value", "semantic: expected a string");
            s.client.correct = true;
            s.client.value = client["value"].get<std::string>();
        } else {
            s.client.correct = false;
            if (!client["split"].is_object())
                fail("client.split", "semantic: expected a map from node to value");
            for (const auto& [name, value] : client["split"].items()) {
                auto it = nodes.ids.find(name);
                if (it == nodes.ids.end())
                    fail("client.split", "reference: unknown node '" + name + "'");
                if (value.is_null())
                    continue; // an explicit "no broadcast to this server"
                if (!value.is_string())
                    fail("client.split", "semantic: values are strings");
                s.client.split[it->second] = value.get<std::string>();
            }
        }
    }

    s.variant = parse_variant(doc["variant"], "variant");
    if (doc.contains("disable_line12")) {
        if (!doc["disable_line12"].is_boolean())
            fail("disable_line12", "semantic: expected a boolean");
        s.line12_enabled = !doc["disable_line12"].get<bool>();
    }

    if (doc.contains("adversary")) {
        if (!doc["adversary"].is_array())
            fail("adversary", "semantic: expected a list of actions");
        std::size_t index = 0;
        for (const json& action : doc["adversary"]) {
            std::string where = "adversary[" + std::to_string(index++) + "]";
            if (!action.is_object())
                fail(where, "semantic: expected an object");
            expect_keys(action, where, {"at_step", "after_receive", "send", "silence"});

            AdversaryAction a;
            if (action.contains("at_step") == action.contains("after_receive"))
                fail(where, "semantic: exactly one of 'at_step' or 'after_receive' is required");
            if (action.contains("at_step")) {
                a.trigger.kind = Trigger::Kind::AtStep;
                a.trigger.step = parse_uint(action["at_step"], where + ".at_step");
            } else {
                const json& m = action["after_receive"];
                if (!m.is_object())
                    fail(where + ".after_receive", "semantic: expected an object");
                expect_keys(m, where + ".after_receive", {"at", "from", "kind", "value"});
                for (const char* required : {"at", "kind", "value"})
                    if (!m.contains(required))
                        fail(where + ".after_receive",
                             std::string("semantic: missing field '") + required + "'");
                a.trigger.kind = Trigger::Kind::AfterReceive;
                a.trigger.match.at = nodes.id_of(m["at"], where + ".after_receive.at");
                a.trigger.match.kind = parse_kind(m["kind"], where + ".after_receive.kind");
                if (!m["value"].is_string())
                    fail(where + ".after_receive.value", "semantic: expected a string");
                a.trigger.match.value = m["value"].get<std::string>();
                if (m.contains("from"))
                    a.trigger.match.from = nodes.id_of(m["from"], where + ".after_receive.from");
            }

            if (action.contains("send") == action.contains("silence"))
                fail(where, "semantic: exactly one of 'send' or 'silence' is required");
            if (action.contains("send")) {
                const json& send = action["send"];
                if (!send.is_object())
                    fail(where + ".send", "semantic: expected an object");
                expect_keys(send, where + ".send", {"from", "kind", "value", "to"});
                for (const char* required : {"from", "kind", "value", "to"})
                    if (!send.contains(required))
                        fail(where + ".send",
                             std::string("semantic: missing field '") + required + "'");
                ScriptSend sc;
                NodeId actor = nodes.id_of(send["from"], where + ".send.from");
                if (!s.faulty.contains(actor))
                    fail(where + ".send.from", "semantic: adversary actions need a faulty actor");
                if (!send["value"].is_string())
                    fail(where + ".send.value", "semantic: expected a string");
                sc.msg = Message{parse_kind(send["kind"], where + ".send.kind"),
                                 send["value"].get<std::string>(), actor};
                sc.to = nodes.set_of(send["to"], where + ".send.to");
                a.action = sc;
            } else {
                NodeId actor = nodes.id_of(action["silence"], where + ".silence");
                if (!s.faulty.contains(actor))
                    fail(where + ".silence", "semantic: adversary actions need a faulty actor");
                a.action = ScriptSilence{actor};
            }
            s.adversary.push_back(std::move(a));
        }
    }

    if (doc.contains("scheduler")) {
        const json& sched = doc["scheduler"];
        if (!sched.is_object())
            fail("scheduler", "semantic: expected an object");
        expect_keys(sched, "scheduler", {"mode", "seed"});
        if (sched.contains("mode")) {
            std::string mode = sched["mode"].is_string() ? sched["mode"].get<std::string>() : "";
            if (mode == "fifo")
                s.scheduler.mode = SchedulerPolicy::Mode::Fifo;
            else if (mode == "random")
                s.scheduler.mode = SchedulerPolicy::Mode::Random;
            else if (mode == "exhaustive")
                s.scheduler.mode = SchedulerPolicy::Mode::Exhaustive;
            else
                fail("scheduler.mode", "semantic: expected fifo, random or exhaustive");
        }
        if (sched.contains("seed"))
            s.scheduler.seed = parse_uint(sched["seed"], "scheduler.seed");
    }

    if (doc.contains("bounds")) {
        const json& bounds = doc["bounds"];
        if (!bounds.is_object())
            fail("bounds", "semantic: expected an object");
        expect_keys(bounds, "bounds", {"max_steps", "max_in_flight", "max_states"});
        if (bounds.contains("max_steps"))
            s.bounds.max_steps = parse_uint(bounds["max_steps"], "bounds.max_steps");
        if (bounds.contains("max_in_flight"))
            s.bounds.max_in_flight = parse_uint(bounds["max_in_flight"], "bounds.max_in_flight");
        if (bounds.contains("max_states"))
            s.bounds.max_states = parse_uint(bounds["max_states"], "bounds.max_states");
    }

    return s;
}

Scenario load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s)
{
    auto name = [&](NodeId v) { return NodeSet::node_name(v, s.names); };
    auto set_to_json = [&](NodeSet set) {
        json out = json::array();
        for (NodeId v : set)
            out.push_back(name(v));
        return out;
    };
    auto slices_to_json = [&](const std::vector<NodeSet>& slices) {
        json out = json::array();
        for (const NodeSet& q : slices)
            out.push_back(set_to_json(q));
        return out;
    };

    json doc;
    doc["universe"] = json::array();
    for (NodeId v : s.universe)
        doc["universe"].push_back(name(v));
    doc["slices"] = json::object();
    for (const auto& [node, slices] : s.structure.slices)
        doc["slices"][name(node)] = slices_to_json(slices);
    if (!s.structure.view_overrides.empty()) {
        doc["views"] = json::object();
        for (const auto& [viewer, overrides] : s.structure.view_overrides) {
            json& view = doc["views"][name(viewer)] = json::object();
            for (const auto& [target, slices] : overrides)
                view[name(target)] = slices_to_json(slices);
        }
    }
    doc["faulty"] = set_to_json(s.faulty);
    if (s.client.correct) {
        doc["client"] = json{{"value", s.client.value}};
    } else {
        json split = json::object();
        for (const auto& [node, value] : s.client.split)
            split[name(node)] = value;
        doc["client"] = json{{"split", split}};
    }
    doc["variant"] = to_string(s.variant);
    if (!s.line12_enabled)
        doc["disable_line12"] = true;
    if (!s.adversary.empty()) {
        doc["adversary"] = json::array();
        for (const AdversaryAction& a : s.adversary) {
            json entry;
            if (a.trigger.kind == Trigger::Kind::AtStep) {
                entry["at_step"] = a.trigger.step;
            } else {
                json m;
                m["at"] = name(a.trigger.match.at);
                if (a.trigger.match.from)
                    m["from"] = name(*a.trigger.match.from);
                m["kind"] = to_string(a.trigger.match.kind);
                m["value"] = a.trigger.match.value;
                entry["after_receive"] = m;
            }
            if (const auto* send = std::get_if<ScriptSend>(&a.action)) {
                entry["send"] = json{{"from", name(send->msg.sender)},
                                     {"kind", to_string(send->msg.kind)},
                                     {"value", send->msg.value},
                                     {"to", set_to_json(send->to)}};
            } else {
                entry["silence"] = name(std::get<ScriptSilence>(a.action).actor);
            }
            doc["adversary"].push_back(std::move(entry));
        }
    }
    const char* mode = s.scheduler.mode == SchedulerPolicy::Mode::Fifo      ? "fifo"
                       : s.scheduler.mode == SchedulerPolicy::Mode::Random  ? "random"
                                                                            : "exhaustive";
    doc["scheduler"] = json{{"mode", mode}, {"seed", s.scheduler.seed}};
    doc["bounds"] = json{{"max_steps", s.bounds.max_steps},
                         {"max_in_flight", s.bounds.max_in_flight},
                         {"max_states", s.bounds.max_states}};
    return doc.dump(2) + "\n";
}

} // namespace fbqs
