#include "fbqs/sim.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "fbqs/errors.hpp"

namespace fbqs {

namespace {

Fbqs base_fbqs(const Scenario& scn)
{
    return Fbqs(scn.universe, scn.structure.slices);
}

SubjectiveFbqs subjective_fbqs(const Scenario& scn)
{
    return SubjectiveFbqs::from_overrides(scn.universe, FailureScenario{scn.faulty},
                                          scn.structure.slices, scn.structure.view_overrides);
}

bool is_subjective(VariantTag tag)
{
    return tag == VariantTag::BrachaSubjective || tag == VariantTag::StellarSubjective;
}

} // namespace

ProtocolVariant resolve_variant(const Scenario& scn)
{
    try {
        if (!scn.faulty.subset_of(scn.universe))
            throw ConfigError("faulty set leaves the universe");
        for (const auto& [node, value] : scn.client.split) {
            (void)value;
            if (!scn.universe.contains(node))
                throw ConfigError("client split names a node outside the universe");
        }
        for (const AdversaryAction& a : scn.adversary) {
            if (const auto* send = std::get_if<ScriptSend>(&a.action)) {
                if (!scn.faulty.contains(send->msg.sender))
                    throw ConfigError("adversary actions may only act for faulty servers");
                if (!send->to.subset_of(scn.universe))
                    throw ConfigError("adversary send targets a node outside the universe");
            } else if (const auto* silence = std::get_if<ScriptSilence>(&a.action)) {
                if (!scn.faulty.contains(silence->actor))
                    throw ConfigError("adversary actions may only act for faulty servers");
            }
        }
        if (!is_subjective(scn.variant) && !scn.structure.view_overrides.empty())
            throw ConfigError("per-view slice overrides require a subjective variant");

        ProtocolVariant v = [&] {
            switch (scn.variant) {
            case VariantTag::Bracha:
                return ProtocolVariant::bracha(induced_dqs(base_fbqs(scn)), scn.universe);
            case VariantTag::EchoDeliver:
                return ProtocolVariant::echo_deliver(induced_dqs(base_fbqs(scn)), scn.universe);
            case VariantTag::Stellar:
                return ProtocolVariant::stellar(base_fbqs(scn));
            case VariantTag::StellarOpen:
                return ProtocolVariant::stellar_open(base_fbqs(scn));
            case VariantTag::StellarSubjective:
                return ProtocolVariant::stellar_subjective(subjective_fbqs(scn));
            case VariantTag::BrachaSubjective:
                return ProtocolVariant::bracha_subjective(
                    induced_subjective_dqs(subjective_fbqs(scn)));
            }
            throw ConfigError("unknown protocol variant");
        }();
        if (!scn.line12_enabled)
            v = v.with_line12_disabled();
        return v;
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid scenario structure: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("scenario violates a variant precondition: ") + e.what());
    }
}

NodeSet scenario_intact_set(const Scenario& scn)
{
    try {
        if (is_subjective(scn.variant))
            return subjective_intact_set(subjective_fbqs(scn));
        return intact_set(base_fbqs(scn), FailureScenario{scn.faulty});
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid scenario structure: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("intact set undefined: ") + e.what());
    }
}

namespace {

struct QueuedMsg {
    NodeId src;
    NodeId dst;
    Message msg;
};

// Content tuple used for canonical ordering and content-addressed delivery.
struct MsgContent {
    NodeId dst;
    NodeId src;
    MsgKind kind;
    Value value;

    auto operator<=>(const MsgContent&) const = default;
};

MsgContent content_of(const QueuedMsg& m)
{
    return MsgContent{m.dst, m.src, m.msg.kind, m.msg.value};
}

struct Transition {
    bool script = false;
    MsgContent msg;

    bool operator==(const Transition&) const = default;
};

struct SimState {
    std::map<NodeId, ServerState> server;
    std::vector<QueuedMsg> queue;
    std::size_t script_idx = 0;
    NodeSet silenced;
    std::vector<char> matched;
};

class Engine {
  public:
    Engine(const Scenario& scn, const ProtocolVariant& variant, bool explore_mode)
        : scn_(scn), variant_(variant), explore_(explore_mode)
    {
        values_.push_back(scn.client.value);
        for (const auto& [node, value] : scn.client.split)
            values_.push_back(value);
        for (const AdversaryAction& a : scn.adversary)
            if (const auto* send = std::get_if<ScriptSend>(&a.action))
                values_.push_back(send->msg.value);
        std::sort(values_.begin(), values_.end());
        values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    }

    SimState& state() { return st_; }
    void set_state(SimState s) { st_ = std::move(s); }
    void set_sink(std::vector<TraceEvent>* sink) { sink_ = sink; }

    void init()
    {
        st_ = SimState{};
        st_.matched.assign(scn_.adversary.size(), 0);
        for (NodeId v : scn_.correct()) {
            ServerState s;
            s.me = v;
            st_.server.emplace(v, std::move(s));
        }
        if (scn_.client.correct) {
            for (const auto& [dst, msg] : client_broadcast(scn_.client.value, scn_.universe))
                send(kClientId, dst, msg);
        } else {
            for (const auto& [dst, value] : scn_.client.split)
                send(kClientId, dst, Message{MsgKind::Bcast, value, kClientId});
        }
        if (explore_) {
            drain_inert();
            normalize_stuck_script();
        }
    }

    // ---- single-run scheduling ----

    // picker(queue) chooses which in-flight message to deliver next.
    template <typename Picker>
    TerminalStatus run_loop(Picker&& picker)
    {
        std::uint64_t step = 0;
        while (true) {
            while (script_permitted(step))
                fire_next_script_action();
            if (st_.queue.empty()) {
                if (st_.script_idx >= scn_.adversary.size())
                    break;
                const Trigger& t = scn_.adversary[st_.script_idx].trigger;
                if (t.kind == Trigger::Kind::AtStep) {
                    step = std::max(step, t.step); // fast-forward to the trigger
                    continue;
                }
                // No receive can ever match; the action is unreachable.
                ++st_.script_idx;
                continue;
            }
            if (step >= scn_.bounds.max_steps)
                return TerminalStatus::BoundExhausted;
            std::size_t i = picker(st_.queue);
            QueuedMsg m = st_.queue[i];
            st_.queue.erase(st_.queue.begin() + static_cast<std::ptrdiff_t>(i));
            do_receive(m);
            ++step;
        }
        check_quiescent();
        return TerminalStatus::Quiescent;
    }

    // ---- exploration primitives ----

    std::vector<Transition> enabled_transitions() const
    {
        std::vector<Transition> out;
        std::vector<MsgContent> contents;
        for (const QueuedMsg& m : st_.queue)
            contents.push_back(content_of(m));
        std::sort(contents.begin(), contents.end());
        contents.erase(std::unique(contents.begin(), contents.end()), contents.end());
        for (const MsgContent& c : contents)
            out.push_back(Transition{false, c});
        if (st_.script_idx < scn_.adversary.size()) {
            const Trigger& t = scn_.adversary[st_.script_idx].trigger;
            // Step triggers are scheduling hints; exploration interleaves the
            // action at every point.
            bool permitted = t.kind == Trigger::Kind::AtStep || st_.matched[st_.script_idx];
            if (permitted)
                out.push_back(Transition{true, {}});
        }
        return out;
    }

    void apply(const Transition& t)
    {
        if (t.script) {
            fire_next_script_action();
        } else {
            auto it = std::find_if(st_.queue.begin(), st_.queue.end(), [&](const QueuedMsg& m) {
                return content_of(m) == t.msg;
            });
            if (it == st_.queue.end())
                throw InternalInvariantError("transition names a message that is not in flight");
            QueuedMsg m = *it;
            st_.queue.erase(it);
            do_receive(m);
        }
        if (explore_) {
            drain_inert();
            normalize_stuck_script();
        }
    }

    bool terminal_quiescent() const
    {
        return st_.queue.empty() && st_.script_idx >= scn_.adversary.size();
    }

    void check_quiescent() const
    {
        for (const auto& [me, s] : st_.server)
            if (any_enabled_guard(s))
                throw InternalInvariantError("guard still enabled at quiescence for node " +
                                             std::to_string(me));
    }

    // Compact deterministic fingerprint of the mutable state.
    std::string key() const
    {
        std::string k;
        auto put8 = [&](std::uint8_t b) { k.push_back(static_cast<char>(b)); };
        auto put64 = [&](std::uint64_t x) {
            for (int i = 0; i < 8; ++i)
                put8(static_cast<std::uint8_t>(x >> (8 * i)));
        };
        auto put_node = [&](NodeId v) { put8(v == kClientId ? 0xff : static_cast<std::uint8_t>(v)); };
        auto put_sender_map = [&](const std::map<Value, NodeSet>& m) {
            put8(static_cast<std::uint8_t>(m.size()));
            for (const auto& [value, senders] : m) {
                put8(value_index(value));
                put64(senders.bits());
            }
        };
        for (const auto& [me, s] : st_.server) {
            put_node(me);
            put8(static_cast<std::uint8_t>(s.echoed | (s.ready << 1) | (s.delivered << 2)));
            put8(s.delivered_value ? value_index(*s.delivered_value) : 0xff);
            put_sender_map(s.echo_senders);
            put_sender_map(s.ready_senders);
        }
        std::vector<MsgContent> contents;
        for (const QueuedMsg& m : st_.queue)
            contents.push_back(content_of(m));
        std::sort(contents.begin(), contents.end());
        put8(static_cast<std::uint8_t>(contents.size() >> 8));
        put8(static_cast<std::uint8_t>(contents.size()));
        for (const MsgContent& c : contents) {
            put_node(c.src);
            put_node(c.dst);
            put8(static_cast<std::uint8_t>(c.kind));
            put8(value_index(c.value));
        }
        put8(static_cast<std::uint8_t>(st_.script_idx >> 8));
        put8(static_cast<std::uint8_t>(st_.script_idx));
        put64(st_.silenced.bits());
        for (char m : st_.matched)
            put8(static_cast<std::uint8_t>(m));
        return k;
    }

  private:
    std::uint8_t value_index(const Value& v) const
    {
        auto it = std::lower_bound(values_.begin(), values_.end(), v);
        if (it == values_.end() || *it != v)
            throw InternalInvariantError("value not interned: " + v);
        return static_cast<std::uint8_t>(it - values_.begin());
    }

    void emit(TraceEvent ev)
    {
        if (sink_)
            sink_->push_back(std::move(ev));
    }

    bool script_permitted(std::uint64_t step) const
    {
        if (st_.script_idx >= scn_.adversary.size())
            return false;
        const Trigger& t = scn_.adversary[st_.script_idx].trigger;
        if (t.kind == Trigger::Kind::AtStep)
            return step >= t.step;
        return st_.matched[st_.script_idx] != 0;
    }

    void fire_next_script_action()
    {
        const AdversaryAction& a = scn_.adversary.at(st_.script_idx++);
        if (const auto* silence = std::get_if<ScriptSilence>(&a.action)) {
            st_.silenced.add(silence->actor);
            return;
        }
        const auto& s = std::get<ScriptSend>(a.action);
        if (st_.silenced.contains(s.msg.sender))
            return;
        for (NodeId dst : s.to)
            send(s.msg.sender, dst, s.msg);
    }

    void normalize_stuck_script()
    {
        while (st_.script_idx < scn_.adversary.size() && st_.queue.empty()) {
            const Trigger& t = scn_.adversary[st_.script_idx].trigger;
            if (t.kind == Trigger::Kind::AfterReceive && !st_.matched[st_.script_idx])
                ++st_.script_idx; // can never match any more
            else
                break;
        }
    }

    // A message is inert when it can no longer change any guard outcome at its
    // destination; receiving it immediately is equivalent to receiving it at
    // any later point.
    bool inert(const Message& msg, const ServerState& s) const
    {
        switch (msg.kind) {
        case MsgKind::Bcast:
            return s.echoed;
        case MsgKind::Echo:
            return variant_.tag() == VariantTag::EchoDeliver ? s.delivered : s.ready;
        case MsgKind::Ready:
            if (variant_.tag() == VariantTag::EchoDeliver)
                return true;
            return s.delivered && (s.ready || !variant_.line12_enabled());
        }
        return false;
    }

    void send(NodeId src, NodeId dst, const Message& msg)
    {
        bool src_faulty = src != kClientId && scn_.faulty.contains(src);
        bool dst_faulty = scn_.faulty.contains(dst);
        if (src_faulty && dst_faulty)
            return; // traffic between faulty servers is not modelled
        emit(TraceEvent{TraceEvent::Kind::Send, src, dst, msg});
        if (explore_ && (dst_faulty || inert(msg, st_.server.at(dst)))) {
            do_receive(QueuedMsg{src, dst, msg});
            return;
        }
        st_.queue.push_back(QueuedMsg{src, dst, msg});
        if (st_.queue.size() > scn_.bounds.max_in_flight)
            throw CapacityError("in-flight messages exceed max_in_flight (" +
                                std::to_string(scn_.bounds.max_in_flight) + ")");
    }

    void do_receive(const QueuedMsg& m)
    {
        emit(TraceEvent{TraceEvent::Kind::Receive, m.dst, m.src, m.msg});
        for (std::size_t i = st_.script_idx; i < scn_.adversary.size(); ++i) {
            const Trigger& t = scn_.adversary[i].trigger;
            if (t.kind != Trigger::Kind::AfterReceive || st_.matched[i])
                continue;
            const ReceiveMatch& r = t.match;
            if (r.at == m.dst && r.kind == m.msg.kind && r.value == m.msg.value &&
                (!r.from || *r.from == m.src))
                st_.matched[i] = 1;
        }
        auto it = st_.server.find(m.dst);
        if (it == st_.server.end())
            return; // faulty recipient: reception is observable, behaviour is scripted
        auto [next, out] = handle(it->second, variant_, m.msg);
        it->second = std::move(next);
        if (out.delivery)
            emit(TraceEvent{TraceEvent::Kind::Deliver, m.dst, m.dst,
                            Message{MsgKind::Ready, *out.delivery, m.dst}});
        for (const auto& [dst, msg] : out.outbound)
            send(m.dst, dst, msg);
    }

    void drain_inert()
    {
        bool again = true;
        while (again) {
            again = false;
            for (std::size_t i = 0; i < st_.queue.size(); ++i) {
                const QueuedMsg& m = st_.queue[i];
                auto it = st_.server.find(m.dst);
                if (it != st_.server.end() && inert(m.msg, it->second)) {
                    QueuedMsg taken = m;
                    st_.queue.erase(st_.queue.begin() + static_cast<std::ptrdiff_t>(i));
                    do_receive(taken);
                    again = true;
                    break;
                }
            }
        }
    }

    bool any_enabled_guard(const ServerState& s) const
    {
        if (variant_.tag() == VariantTag::EchoDeliver) {
            for (const auto& [value, senders] : s.echo_senders)
                if (guard_deliver(s, variant_, value))
                    return true;
            return false;
        }
        for (const auto& [value, senders] : s.echo_senders)
            if (guard_ready_quorum(s, variant_, value))
                return true;
        for (const auto& [value, senders] : s.ready_senders) {
            if (variant_.line12_enabled() && guard_ready_blocking(s, variant_, value))
                return true;
            if (guard_deliver(s, variant_, value))
                return true;
        }
        return false;
    }

    const Scenario& scn_;
    const ProtocolVariant& variant_;
    bool explore_ = false;
    SimState st_;
    std::vector<TraceEvent>* sink_ = nullptr;
    std::vector<Value> values_;
};

Trace run_single(const Scenario& scn, const ProtocolVariant& variant)
{
    Engine e(scn, variant, /*explore=*/false);
    Trace trace;
    e.set_sink(&trace.events);
    e.init();
    switch (scn.scheduler.mode) {
    case SchedulerPolicy::Mode::Fifo:
        trace.status = e.run_loop([](const std::vector<QueuedMsg>&) { return std::size_t{0}; });
        break;
    case SchedulerPolicy::Mode::Random: {
        std::mt19937_64 rng(scn.scheduler.seed);
        trace.status = e.run_loop(
            [&rng](const std::vector<QueuedMsg>& q) { return static_cast<std::size_t>(rng() % q.size()); });
        break;
    }
    case SchedulerPolicy::Mode::Exhaustive:
        throw ConfigError("run() needs a single-run scheduler (fifo or random); "
                          "use explore() for exhaustive mode");
    }
    return trace;
}

} // namespace

Trace run(const Scenario& scenario)
{
    ProtocolVariant variant = resolve_variant(scenario);
    return run_single(scenario, variant);
}

History extract_history(const Trace& trace)
{
    History h;
    for (const TraceEvent& ev : trace.events) {
        if (ev.kind == TraceEvent::Kind::Receive && ev.msg.kind == MsgKind::Bcast)
            h.first_bcast.try_emplace(ev.a, ev.msg.value);
        else if (ev.kind == TraceEvent::Kind::Deliver)
            h.deliveries.emplace(ev.a, ev.msg.value);
    }
    return h;
}

namespace {

// With a single value in play and no adversary script, any two enabled
// transitions commute: receives only grow per-value sender sets, guards are
// monotone in them, and every emission fires at most once with a fixed
// payload. The transition system is therefore confluent and terminating, so
// it has exactly one terminal state and any maximal linearization reaches it.
bool single_terminal_state(const Scenario& scn)
{
    if (!scn.adversary.empty())
        return false;
    if (scn.client.correct)
        return true;
    const auto& split = scn.client.split;
    for (const auto& [node, value] : split)
        if (value != split.begin()->second)
            return false;
    return true;
}

} // namespace

Exploration explore(const Scenario& scenario)
{
    if (scenario.scheduler.mode != SchedulerPolicy::Mode::Exhaustive)
        throw ConfigError("explore() requires the exhaustive scheduler mode");
    ProtocolVariant variant = resolve_variant(scenario);

    if (single_terminal_state(scenario)) {
        Engine fast(scenario, variant, /*explore=*/true);
        Trace trace;
        fast.set_sink(&trace.events);
        fast.init();
        std::size_t steps = 0;
        while (true) {
            std::vector<Transition> ts = fast.enabled_transitions();
            if (ts.empty()) {
                fast.check_quiescent();
                trace.status = TerminalStatus::Quiescent;
                break;
            }
            if (steps >= scenario.bounds.max_steps) {
                trace.status = TerminalStatus::BoundExhausted;
                break;
            }
            fast.apply(ts.front());
            ++steps;
        }
        Exploration result;
        result.stats.states_visited = steps + 1;
        result.stats.transitions = steps;
        (trace.status == TerminalStatus::Quiescent ? result.stats.quiescent_traces
                                                   : result.stats.bound_exhausted_traces) = 1;
        result.traces.push_back(std::move(trace));
        return result;
    }

    Engine engine(scenario, variant, /*explore=*/true);
    engine.init();
    SimState root = engine.state();

    struct Frame {
        SimState state;
        std::vector<Transition> transitions;
        std::size_t next = 0;
    };

    Exploration result;
    std::unordered_set<std::string> visited;
    std::vector<Frame> stack;
    std::vector<Transition> path;
    std::vector<std::pair<std::vector<Transition>, TerminalStatus>> terminals;

    visited.insert(engine.key());
    stack.push_back(Frame{root, engine.enabled_transitions(), 0});
    if (stack.back().transitions.empty()) {
        engine.check_quiescent();
        terminals.push_back({{}, TerminalStatus::Quiescent});
        stack.clear();
    }

    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next >= top.transitions.size()) {
            stack.pop_back();
            if (!path.empty())
                path.pop_back();
            continue;
        }
        Transition t = top.transitions[top.next++];
        engine.set_state(top.state);
        engine.apply(t);
        ++result.stats.transitions;
        std::string k = engine.key();
        if (!visited.insert(std::move(k)).second)
            continue;
        if (visited.size() > scenario.bounds.max_states)
            throw CapacityError("state budget exceeded: " + std::to_string(visited.size()) +
                                " states visited, depth " + std::to_string(stack.size()));
        path.push_back(t);
        std::vector<Transition> ts = engine.enabled_transitions();
        if (ts.empty()) {
            engine.check_quiescent();
            terminals.push_back({path, TerminalStatus::Quiescent});
            path.pop_back();
            continue;
        }
        if (path.size() >= scenario.bounds.max_steps) {
            terminals.push_back({path, TerminalStatus::BoundExhausted});
            path.pop_back();
            continue;
        }
        stack.push_back(Frame{engine.state(), std::move(ts), 0});
    }

    result.stats.states_visited = visited.size();
    for (const auto& [transitions, status] : terminals) {
        Engine replay(scenario, variant, /*explore=*/true);
        Trace trace;
        replay.set_sink(&trace.events);
        replay.init();
        for (const Transition& t : transitions)
            replay.apply(t);
        trace.status = status;
        if (status == TerminalStatus::Quiescent)
            ++result.stats.quiescent_traces;
        else
            ++result.stats.bound_exhausted_traces;
        result.traces.push_back(std::move(trace));
    }
    return result;
}

namespace {

// The quorum whose ECHO(value) messages first satisfied some correct server,
// reading the source trace forward.
NodeSet find_echo_quorum(const Trace& source, const QuorumSystem& quorums, const Value& value,
                         NodeSet correct)
{
    std::map<NodeId, NodeSet> acc;
    for (const TraceEvent& ev : source.events) {
        if (ev.kind != TraceEvent::Kind::Receive || ev.msg.kind != MsgKind::Echo ||
            ev.msg.value != value || !correct.contains(ev.a))
            continue;
        NodeSet& got = acc[ev.a];
        got.add(ev.b);
        for (const NodeSet& u : quorums.quorums)
            if (u.subset_of(got))
                return u;
    }
    throw InternalInvariantError("no echo quorum found behind a delivery");
}

} // namespace

Trace build_equiv_execution(EquivDirection direction, const Trace& source_trace,
                            const Scenario& scenario)
{
    if (!scenario.structure.view_overrides.empty())
        throw ConfigError("protocol equivalence is stated for objective structures only");
    if (source_trace.status != TerminalStatus::Quiescent)
        throw ConfigError("equivalence construction needs a quiescent source trace");
    VariantTag expected_source = direction == EquivDirection::BrachaToStellarOpen
                                     ? VariantTag::Bracha
                                     : VariantTag::StellarOpen;
    if (scenario.variant != expected_source)
        throw ConfigError("source trace must come from the " + to_string(expected_source) +
                          " variant for this direction");

    Fbqs fb = base_fbqs(scenario);
    if (intact_set(fb, FailureScenario{scenario.faulty}).empty())
        throw ConfigError("equivalence construction requires at least one intact server");
    QuorumSystem quorums = enumerate_quorums(fb);

    History source_hist = extract_history(source_trace);

    Scenario target = scenario;
    target.variant = direction == EquivDirection::BrachaToStellarOpen ? VariantTag::StellarOpen
                                                                      : VariantTag::Bracha;
    target.scheduler = SchedulerPolicy{SchedulerPolicy::Mode::Fifo, 0};
    target.adversary.clear();
    target.client.correct = false;
    target.client.value.clear();
    target.client.split.clear();
    for (const auto& [node, value] : source_hist.first_bcast)
        target.client.split[node] = value;

    NodeSet priority_bcast;
    Value delivered_value;
    bool has_delivery = !source_hist.deliveries.empty();
    if (has_delivery) {
        delivered_value = source_hist.deliveries.begin()->second;
        for (const auto& [node, value] : source_hist.deliveries)
            if (value != delivered_value)
                throw InternalInvariantError("source trace delivered two different values");
        NodeSet quorum =
            find_echo_quorum(source_trace, quorums, delivered_value, scenario.correct());
        priority_bcast = quorum & scenario.correct();
        for (NodeId u : quorum & scenario.faulty) {
            AdversaryAction a;
            a.trigger = Trigger{Trigger::Kind::AtStep, 0, {}};
            a.action = ScriptSend{Message{MsgKind::Echo, delivered_value, u}, scenario.correct()};
            target.adversary.push_back(std::move(a));
        }
    }

    ProtocolVariant variant = resolve_variant(target);
    Engine e(target, variant, /*explore=*/false);
    Trace trace;
    e.set_sink(&trace.events);
    e.init();
    // Deliver the value-carrying traffic first so the echo quorum settles
    // before any competing value circulates.
    auto rank = [&](const QueuedMsg& m) -> int {
        if (!has_delivery)
            return 4;
        if (m.msg.kind == MsgKind::Bcast)
            return m.msg.value == delivered_value && priority_bcast.contains(m.dst) ? 0 : 3;
        if (m.msg.value == delivered_value)
            return m.msg.kind == MsgKind::Echo ? 1 : 2;
        return 4;
    };
    trace.status = e.run_loop([&](const std::vector<QueuedMsg>& q) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < q.size(); ++i)
            if (rank(q[i]) < rank(q[best]))
                best = i;
        return best;
    });

    History target_hist = extract_history(trace);
    if (!(target_hist == source_hist)) {
        throw EquivMismatchError("constructed execution diverges from the source history:\n"
                                 "source:\n" +
                                 serialize_history(source_hist, scenario.names) + "target:\n" +
                                 serialize_history(target_hist, scenario.names));
    }
    return trace;
}

std::string serialize_trace(const Trace& trace, const std::vector<std::string>& names)
{
    std::string out;
    for (const TraceEvent& ev : trace.events) {
        switch (ev.kind) {
        case TraceEvent::Kind::Send:
            out += "send\t" + NodeSet::node_name(ev.a, names) + "\t" +
                   NodeSet::node_name(ev.b, names);
            break;
        case TraceEvent::Kind::Receive:
            out += "recv\t" + NodeSet::node_name(ev.a, names) + "\t" +
                   NodeSet::node_name(ev.b, names);
            break;
        case TraceEvent::Kind::Deliver:
            out += "deliver\t" + NodeSet::node_name(ev.a, names) + "\t" + ev.msg.value;
            out += "\n";
            continue;
        }
        out += "\t" + to_string(ev.msg.kind) + "\t" + ev.msg.value + "\n";
    }
    out += "status\t";
    out += trace.status == TerminalStatus::Quiescent ? "quiescent" : "bound-exhausted";
    out += "\n";
    return out;
}

std::string serialize_history(const History& history, const std::vector<std::string>& names)
{
    std::string out;
    for (const auto& [node, value] : history.first_bcast)
        out += "first-bcast\t" + NodeSet::node_name(node, names) + "\t" + value + "\n";
    for (const auto& [node, value] : history.deliveries)
        out += "deliver\t" + NodeSet::node_name(node, names) + "\t" + value + "\n";
    return out;
}

} // namespace fbqs
