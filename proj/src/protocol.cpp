#include "fbqs/protocol.hpp"

#include <algorithm>

#include "fbqs/errors.hpp"

namespace fbqs {

std::string to_string(MsgKind kind)
{
    switch (kind) {
    case MsgKind::Bcast:
        return "BCAST";
    case MsgKind::Echo:
        return "ECHO";
    case MsgKind::Ready:
        return "READY";
    }
    return "?";
}

std::string to_string(VariantTag tag)
{
    switch (tag) {
    case VariantTag::Bracha:
        return "bracha";
    case VariantTag::Stellar:
        return "stellar";
    case VariantTag::StellarOpen:
        return "stellar-open";
    case VariantTag::BrachaSubjective:
        return "bracha-subjective";
    case VariantTag::StellarSubjective:
        return "stellar-subjective";
    case VariantTag::EchoDeliver:
        return "echo-deliver";
    }
    return "?";
}

namespace {

std::vector<NodeSet> minimal_of(const std::vector<NodeSet>& sets)
{
    std::vector<NodeSet> out;
    for (const NodeSet& u : sets) {
        bool minimal = true;
        for (const NodeSet& w : sets) {
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

void require_checked_dqs(const Dqs& dqs, NodeSet universe)
{
    for (const NodeSet& u : dqs.quorum_system.quorums)
        if (!u.subset_of(universe))
            throw PreconditionError("quorum " + u.to_string() + " leaves the universe");
    AxiomReport r = check_dqs(dqs);
    if (!r.all_pass())
        throw PreconditionError("DQS fails its axioms:\n" + r.to_string());
}

} // namespace

ProtocolVariant ProtocolVariant::bracha(Dqs dqs, NodeSet universe)
{
    require_checked_dqs(dqs, universe);
    ProtocolVariant v;
    v.tag_ = VariantTag::Bracha;
    v.universe_ = universe;
    v.min_quorums_ = minimal_of(dqs.quorum_system.quorums);
    v.dqs_ = std::move(dqs);
    return v;
}

ProtocolVariant ProtocolVariant::echo_deliver(Dqs dqs, NodeSet universe)
{
    ProtocolVariant v = bracha(std::move(dqs), universe);
    v.tag_ = VariantTag::EchoDeliver;
    return v;
}

ProtocolVariant ProtocolVariant::stellar(Fbqs fbqs)
{
    if (!has_quorum_intersection(fbqs))
        throw PreconditionError("stellar broadcast requires quorum intersection");
    ProtocolVariant v;
    v.tag_ = VariantTag::Stellar;
    v.universe_ = fbqs.universe();
    v.fbqs_ = std::move(fbqs);
    return v;
}

ProtocolVariant ProtocolVariant::stellar_open(Fbqs fbqs)
{
    ProtocolVariant v = stellar(std::move(fbqs));
    v.tag_ = VariantTag::StellarOpen;
    return v;
}

ProtocolVariant ProtocolVariant::bracha_subjective(SubjectiveDqs sdqs)
{
    AxiomReport r = check_subjective_dqs(sdqs);
    for (const AxiomCheck& c : r.checks)
        if (!c.pass && c.name != "sd-consistency-strong")
            throw PreconditionError("subjective DQS fails " + c.name);
    ProtocolVariant v;
    v.tag_ = VariantTag::BrachaSubjective;
    v.universe_ = sdqs.universe;
    for (const auto& [node, qs] : sdqs.per_view_quorums.per_view)
        v.view_min_quorums_[node] = minimal_of(qs.quorums);
    v.sdqs_ = std::move(sdqs);
    return v;
}

ProtocolVariant ProtocolVariant::stellar_subjective(SubjectiveFbqs sfbqs)
{
    if (!validate_agreement(sfbqs).all_pass())
        throw PreconditionError("views disagree on a correct server's slices");
    if (!subjective_quorum_intersection(sfbqs))
        throw PreconditionError("stellar broadcast requires per-view quorum intersection");
    ProtocolVariant v;
    v.tag_ = VariantTag::StellarSubjective;
    v.universe_ = sfbqs.universe();
    v.sfbqs_ = std::move(sfbqs);
    return v;
}

ProtocolVariant ProtocolVariant::with_line12_disabled() const
{
    ProtocolVariant v = *this;
    v.line12_enabled_ = false;
    return v;
}

bool ProtocolVariant::quorum_in(NodeId me, NodeSet senders) const
{
    switch (tag_) {
    case VariantTag::Bracha:
    case VariantTag::EchoDeliver:
        for (const NodeSet& m : min_quorums_)
            if (m.subset_of(senders))
                return true;
        return false;
    case VariantTag::BrachaSubjective: {
        auto it = view_min_quorums_.find(me);
        if (it == view_min_quorums_.end())
            throw DomainError("no view for node " + std::to_string(me));
        for (const NodeSet& m : it->second)
            if (m.subset_of(senders))
                return true;
        return false;
    }
    case VariantTag::Stellar:
        return largest_quorum_within(*fbqs_, senders).contains(me);
    case VariantTag::StellarOpen:
        return !largest_quorum_within(*fbqs_, senders).empty();
    case VariantTag::StellarSubjective:
        return largest_quorum_within(sfbqs_->view(me), senders).contains(me);
    }
    return false;
}

bool ProtocolVariant::blocking_in(NodeId me, NodeSet senders) const
{
    if (senders.empty())
        return false;
    switch (tag_) {
    case VariantTag::Bracha:
    case VariantTag::EchoDeliver: {
        for (const NodeSet& b : dqs_->fail_prone.fail_sets)
            if (senders.subset_of(b))
                return false;
        return true;
    }
    case VariantTag::BrachaSubjective: {
        auto it = sdqs_->per_view_fail_prone.find(me);
        if (it == sdqs_->per_view_fail_prone.end())
            throw DomainError("no view for node " + std::to_string(me));
        for (const NodeSet& b : it->second.fail_sets)
            if (senders.subset_of(b))
                return false;
        return true;
    }
    case VariantTag::Stellar:
    case VariantTag::StellarOpen:
        return is_v_blocking(*fbqs_, me, senders);
    case VariantTag::StellarSubjective:
        return subjective_v_blocking(*sfbqs_, me, senders);
    }
    return false;
}

std::vector<std::pair<NodeId, Message>> client_broadcast(const Value& value, NodeSet universe)
{
    std::vector<std::pair<NodeId, Message>> out;
    for (NodeId v : universe)
        out.emplace_back(v, Message{MsgKind::Bcast, value, kClientId});
    return out;
}

bool guard_echo(const ServerState& state, const Message& msg)
{
    return msg.kind == MsgKind::Bcast && !state.echoed;
}

namespace {

NodeSet senders_of(const std::map<Value, NodeSet>& map, const Value& value)
{
    auto it = map.find(value);
    return it == map.end() ? NodeSet{} : it->second;
}

} // namespace

bool guard_ready_quorum(const ServerState& state, const ProtocolVariant& variant,
                        const Value& value)
{
    if (state.ready)
        return false;
    return variant.quorum_in(state.me, senders_of(state.echo_senders, value));
}

bool guard_ready_blocking(const ServerState& state, const ProtocolVariant& variant,
                          const Value& value)
{
    if (state.ready)
        return false;
    return variant.blocking_in(state.me, senders_of(state.ready_senders, value));
}

bool guard_deliver(const ServerState& state, const ProtocolVariant& variant, const Value& value)
{
    if (state.delivered)
        return false;
    const auto& senders = variant.tag() == VariantTag::EchoDeliver ? state.echo_senders
                                                                   : state.ready_senders;
    return variant.quorum_in(state.me, senders_of(senders, value));
}

std::pair<ServerState, StepOutput> handle(const ServerState& state, const ProtocolVariant& variant,
                                          const Message& msg, std::span<const Handler> order)
{
    ServerState s = state;
    StepOutput out;

    if (msg.kind == MsgKind::Echo)
        s.echo_senders[msg.value].add(msg.sender);
    else if (msg.kind == MsgKind::Ready)
        s.ready_senders[msg.value].add(msg.sender);

    const bool echo_deliver = variant.tag() == VariantTag::EchoDeliver;

    auto emit_to_all = [&](MsgKind kind, const Value& value) {
        for (NodeId dst : variant.universe())
            out.outbound.emplace_back(dst, Message{kind, value, s.me});
    };

    bool progress = true;
    while (progress) {
        progress = false;
        for (Handler h : order) {
            switch (h) {
            case Handler::Echo:
                if (guard_echo(s, msg)) {
                    s.echoed = true;
                    emit_to_all(MsgKind::Echo, msg.value);
                    progress = true;
                }
                break;
            case Handler::ReadyQuorum:
                if (!echo_deliver) {
                    for (const auto& [value, senders] : s.echo_senders) {
                        if (guard_ready_quorum(s, variant, value)) {
                            s.ready = true;
                            emit_to_all(MsgKind::Ready, value);
                            progress = true;
                            break;
                        }
                    }
                }
                break;
            case Handler::ReadyBlocking:
                if (!echo_deliver && variant.line12_enabled()) {
                    for (const auto& [value, senders] : s.ready_senders) {
                        if (guard_ready_blocking(s, variant, value)) {
                            s.ready = true;
                            emit_to_all(MsgKind::Ready, value);
                            progress = true;
                            break;
                        }
                    }
                }
                break;
            case Handler::Deliver: {
                const auto& source = echo_deliver ? s.echo_senders : s.ready_senders;
                for (const auto& [value, senders] : source) {
                    if (guard_deliver(s, variant, value)) {
                        s.delivered = true;
                        s.delivered_value = value;
                        out.delivery = value;
                        progress = true;
                        break;
                    }
                }
                break;
            }
            }
        }
    }
    return {std::move(s), std::move(out)};
}

} // namespace fbqs
