#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbqs/subjective.hpp"

namespace fbqs {

// The broadcast payload; equality and order are all the protocols need.
using Value = std::string;

enum class MsgKind { Bcast, Echo, Ready };

std::string to_string(MsgKind kind);

struct Message {
    MsgKind kind;
    Value value;
    NodeId sender; // kClientId for client broadcasts

    auto operator<=>(const Message&) const = default;
};

// One server's monotone protocol state: flags never reset, sender sets only
// grow, and at most one value is ever delivered.
struct ServerState {
    NodeId me = 0;
    bool echoed = false;
    bool ready = false;
    bool delivered = false;
    std::map<Value, NodeSet> echo_senders;
    std::map<Value, NodeSet> ready_senders;
    std::optional<Value> delivered_value;

    bool operator==(const ServerState&) const = default;
};

enum class VariantTag {
    Bracha,            // quorum + fail-prone guards over a classical DQS
    Stellar,           // federated guards, quorums the server belongs to
    StellarOpen,       // federated guards, no membership requirement
    BrachaSubjective,  // classical guards over per-view structures
    StellarSubjective, // federated guards over per-view structures
    EchoDeliver,       // test-only: delivers on an echo quorum, never readies
};

std::string to_string(VariantTag tag);

// A protocol tag plus the quorum structure its guards consult. Factories
// validate the structure's axioms up front; a protocol never runs over an
// unchecked structure.
class ProtocolVariant {
  public:
    static ProtocolVariant bracha(Dqs dqs, NodeSet universe);
    static ProtocolVariant echo_deliver(Dqs dqs, NodeSet universe);
    static ProtocolVariant stellar(Fbqs fbqs);
    static ProtocolVariant stellar_open(Fbqs fbqs);
    static ProtocolVariant bracha_subjective(SubjectiveDqs sdqs);
    static ProtocolVariant stellar_subjective(SubjectiveFbqs sfbqs);

    VariantTag tag() const { return tag_; }
    const NodeSet& universe() const { return universe_; }

    bool line12_enabled() const { return line12_enabled_; }
    // Test-only toggle: drops the blocking-set handler.
    ProtocolVariant with_line12_disabled() const;

    const Dqs& dqs() const { return *dqs_; }
    const Fbqs& fbqs() const { return *fbqs_; }
    const SubjectiveDqs& sdqs() const { return *sdqs_; }
    const SubjectiveFbqs& sfbqs() const { return *sfbqs_; }

    // True iff senders contains a quorum the server may use (membership
    // required for Stellar and StellarSubjective).
    bool quorum_in(NodeId me, NodeSet senders) const;

    // True iff senders can force the server to ready: not contained in any
    // fail-prone element (classical) or me-blocking (federated).
    bool blocking_in(NodeId me, NodeSet senders) const;

  private:
    ProtocolVariant() = default;

    VariantTag tag_ = VariantTag::Bracha;
    NodeSet universe_;
    bool line12_enabled_ = true;
    std::optional<Dqs> dqs_;
    std::optional<Fbqs> fbqs_;
    std::optional<SubjectiveDqs> sdqs_;
    std::optional<SubjectiveFbqs> sfbqs_;
    std::vector<NodeSet> min_quorums_;
    std::map<NodeId, std::vector<NodeSet>> view_min_quorums_;
};

struct StepOutput {
    std::vector<std::pair<NodeId, Message>> outbound;
    std::optional<Value> delivery;
};

// One BCAST per server, in ascending id order.
std::vector<std::pair<NodeId, Message>> client_broadcast(const Value& value, NodeSet universe);

bool guard_echo(const ServerState& state, const Message& msg);
bool guard_ready_quorum(const ServerState& state, const ProtocolVariant& variant,
                        const Value& value);
bool guard_ready_blocking(const ServerState& state, const ProtocolVariant& variant,
                          const Value& value);
bool guard_deliver(const ServerState& state, const ProtocolVariant& variant, const Value& value);

enum class Handler { Echo, ReadyQuorum, ReadyBlocking, Deliver };

inline constexpr std::array<Handler, 4> kDefaultHandlerOrder{
    Handler::Echo, Handler::ReadyQuorum, Handler::ReadyBlocking, Handler::Deliver};

// Records the message, then fires enabled handlers to a fixpoint. Emissions go
// to every server including the sender itself; the simulator routes them. The
// fixpoint state does not depend on the handler order (the flags make the
// handlers confluent); the order parameter exists so tests can confirm that.
std::pair<ServerState, StepOutput> handle(const ServerState& state, const ProtocolVariant& variant,
                                          const Message& msg,
                                          std::span<const Handler> order = kDefaultHandlerOrder);

} // namespace fbqs
