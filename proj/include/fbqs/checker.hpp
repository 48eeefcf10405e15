#pragma once

#include <span>

#include "fbqs/sim.hpp"

namespace fbqs {

enum class Verdict { Pass, Fail, NotApplicable };

std::string to_string(Verdict v);

enum class SpecKind { Reliable, WeaklyReliable };

// The seven broadcast properties. Safety (no_duplication, integrity,
// consistency) is judged on any trace; the liveness properties are judged on
// quiescent traces only and otherwise report NotApplicable.
struct PropertyReport {
    Verdict validity = Verdict::NotApplicable;
    Verdict no_duplication = Verdict::NotApplicable;
    Verdict integrity = Verdict::NotApplicable;
    Verdict consistency = Verdict::NotApplicable;
    Verdict totality = Verdict::NotApplicable;
    Verdict validity_intact = Verdict::NotApplicable;
    Verdict totality_intact = Verdict::NotApplicable;

    std::map<std::string, std::string> witnesses; // property name -> witness text

    NodeSet intact;
    bool covering_fail_prone_exists = false;
    bool intact_server_exists = false;

    // Pass or NotApplicable on every property the spec requires.
    bool passes(SpecKind spec) const;

    std::string to_string(const std::vector<std::string>& names = {}) const;
};

// Structure facts the checker needs repeatedly; build once per scenario.
struct CheckContext {
    const Scenario* scenario;
    ProtocolVariant variant;
    NodeSet intact;
    bool covering_fail_prone_exists;
};

CheckContext make_check_context(const Scenario& scenario);

PropertyReport check_trace(const Trace& trace, const CheckContext& ctx);
PropertyReport check_trace(const Trace& trace, const Scenario& scenario, NodeSet intact);

// Trace-level protocol facts: (a) correct (classical variants) or intact
// (federated variants) servers ready at most one value; (b) the first such
// READY follows a full echo quorum at its sender; (c) any correct delivery
// follows some such server accumulating an echo quorum.
AxiomReport check_lemma_invariants(const Trace& trace, const CheckContext& ctx);
AxiomReport check_lemma_invariants(const Trace& trace, const Scenario& scenario, NodeSet intact);

// Aggregates check_trace over an exploration: the spec holds iff every
// quiescent trace passes everything it requires and every trace passes
// safety. Witnesses name the first offending trace.
PropertyReport check_exploration(std::span<const Trace> traces, const Scenario& scenario,
                                 SpecKind spec);

} // namespace fbqs
