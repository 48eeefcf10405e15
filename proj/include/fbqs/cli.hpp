#pragma once

#include <iosfwd>
#include <optional>

#include "fbqs/checker.hpp"

namespace fbqs {

// Parses the declarative scenario document. Node ids are assigned by position
// in the universe list; scenario.names keeps the labels. Unknown fields and
// referential slips are rejected with a diagnostic naming the field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Canonical form; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

struct SimulateOptions {
    std::optional<std::uint64_t> seed;
    std::optional<SpecKind> spec;
    std::string out_file; // trace goes here instead of stdout when set
    bool lines_format = false;
};

struct ExploreOptions {
    std::optional<SpecKind> spec;
    bool lines_format = false;
};

struct EquivOptions {
    bool lines_format = false;
};

// Structure analysis: quorums, intersection, intact/befouled servers, the
// induced (subjective) DQS and its axiom reports.
int cmd_analyze(const Scenario& scenario, std::ostream& out);

// One run plus history and property/lemma reports. Exit 0 iff the requested
// spec passes (or none was requested).
int cmd_simulate(Scenario scenario, const SimulateOptions& options, std::ostream& out);

// Exhaustive exploration plus aggregated verdicts.
int cmd_explore(const Scenario& scenario, const ExploreOptions& options, std::ostream& out);

// Runs both protocols over the scenario's structure and rebuilds each history
// under the other protocol, in both directions. Exit 1 on any history
// mismatch.
int cmd_equiv(const Scenario& scenario, const EquivOptions& options, std::ostream& out);

} // namespace fbqs
