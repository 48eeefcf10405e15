#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fbqs/protocol.hpp"

namespace fbqs {

// Who broadcasts what. A correct client sends one value to every server; a
// byzantine client sends per-server values (servers absent from the split
// receive nothing).
struct ClientSpec {
    bool correct = true;
    Value value;
    std::map<NodeId, Value> split;

    bool operator==(const ClientSpec&) const = default;
};

struct ScriptSend {
    Message msg; // msg.sender is the acting faulty server
    NodeSet to;

    bool operator==(const ScriptSend&) const = default;
};

struct ScriptSilence {
    NodeId actor;

    bool operator==(const ScriptSilence&) const = default;
};

// Matches a Receive event: node `at` receives `kind`(`value`), optionally
// restricted to a particular sender.
struct ReceiveMatch {
    NodeId at = 0;
    std::optional<NodeId> from;
    MsgKind kind = MsgKind::Echo;
    Value value;

    bool operator==(const ReceiveMatch&) const = default;
};

struct Trigger {
    enum class Kind { AtStep, AfterReceive };
    Kind kind = Kind::AtStep;
    std::uint64_t step = 0;
    ReceiveMatch match;

    bool operator==(const Trigger&) const = default;
};

// Scripted actions run in order; each waits for its trigger.
struct AdversaryAction {
    Trigger trigger;
    std::variant<ScriptSend, ScriptSilence> action;

    bool operator==(const AdversaryAction&) const = default;
};

struct SchedulerPolicy {
    enum class Mode { Fifo, Random, Exhaustive };
    Mode mode = Mode::Fifo;
    std::uint64_t seed = 0;

    bool operator==(const SchedulerPolicy&) const = default;
};

struct Bounds {
    std::uint64_t max_steps = 100000;
    std::size_t max_in_flight = 65536;
    std::size_t max_states = 5000000;

    bool operator==(const Bounds&) const = default;
};

// Declarative slice knowledge: a base slice function for every server, plus
// optional per-viewer overrides of faulty servers' slices for the subjective
// variants.
struct StructureSpec {
    std::map<NodeId, std::vector<NodeSet>> slices;
    std::map<NodeId, std::map<NodeId, std::vector<NodeSet>>> view_overrides;

    bool operator==(const StructureSpec&) const = default;
};

struct Scenario {
    NodeSet universe;
    std::vector<std::string> names; // names[id]; empty means decimal ids
    ClientSpec client;
    NodeSet faulty;
    StructureSpec structure;
    VariantTag variant = VariantTag::Bracha;
    bool line12_enabled = true;
    std::vector<AdversaryAction> adversary;
    SchedulerPolicy scheduler;
    Bounds bounds;

    NodeSet correct() const { return universe - faulty; }
    bool operator==(const Scenario&) const = default;
};

// Builds and validates the protocol structure the scenario's variant needs:
// the classical variants run over the DQS induced by the slices, the
// subjective ones over per-view structures assembled from the overrides.
// Throws ConfigError when the scenario cannot support its variant.
ProtocolVariant resolve_variant(const Scenario& scenario);

// The intact set relevant to the scenario's structure (objective or
// subjective), used by the checker's weak-spec verdicts.
NodeSet scenario_intact_set(const Scenario& scenario);

} // namespace fbqs
