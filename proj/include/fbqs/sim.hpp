#pragma once

#include <set>
#include <utility>

#include "fbqs/scenario.hpp"

namespace fbqs {

struct TraceEvent {
    enum class Kind { Send, Receive, Deliver };
    Kind kind = Kind::Send;
    // Send: a = src, b = dst. Receive: a = dst, b = src. Deliver: a = server.
    NodeId a = 0;
    NodeId b = 0;
    Message msg;

    bool operator==(const TraceEvent&) const = default;
};

enum class TerminalStatus { Quiescent, BoundExhausted };

struct Trace {
    std::vector<TraceEvent> events;
    TerminalStatus status = TerminalStatus::Quiescent;

    bool operator==(const Trace&) const = default;
};

// The observable projection of a trace: each server's first BCAST reception
// plus every delivery. Compared as sets.
struct History {
    std::map<NodeId, Value> first_bcast;
    std::set<std::pair<NodeId, Value>> deliveries;

    bool operator==(const History&) const = default;
};

// Executes the scenario under its scheduler policy until quiescence (no
// in-flight messages, script exhausted) or the step bound. Deterministic for a
// given (scenario, seed). Correct servers run the protocol; faulty servers
// only ever perform scripted actions.
Trace run(const Scenario& scenario);

History extract_history(const Trace& trace);

struct ExplorationStats {
    std::size_t states_visited = 0;
    std::size_t transitions = 0;
    std::size_t quiescent_traces = 0;
    std::size_t bound_exhausted_traces = 0;
};

struct Exploration {
    std::vector<Trace> traces; // one representative per distinct terminal state
    ExplorationStats stats;
};

// Exhaustively permutes delivery order and adversary timing, deduplicating by
// reached global state. Requires scheduler mode Exhaustive.
Exploration explore(const Scenario& scenario);

enum class EquivDirection { BrachaToStellarOpen, StellarOpenToBracha };

// Raised when a constructed execution fails to reproduce the source history;
// never expected on valid inputs.
struct EquivMismatchError : InternalInvariantError {
    using InternalInvariantError::InternalInvariantError;
};

// Builds an execution of the other protocol with the same history as
// source_trace: reroute the first broadcasts as observed, script the faulty
// members of the echo quorum when the source delivered, keep faulty servers
// silent when it did not. Asserts history equality before returning.
Trace build_equiv_execution(EquivDirection direction, const Trace& source_trace,
                            const Scenario& scenario);

std::string serialize_trace(const Trace& trace, const std::vector<std::string>& names = {});
std::string serialize_history(const History& history, const std::vector<std::string>& names = {});

} // namespace fbqs
