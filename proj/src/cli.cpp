#include <fstream>
#include <ostream>

#include "fbqs/cli.hpp"
#include "fbqs/errors.hpp"

namespace fbqs {

namespace {

std::string set_line(NodeSet s, const std::vector<std::string>& names)
{
    return s.to_string(names);
}

std::string sets_line(const std::vector<NodeSet>& sets, const std::vector<std::string>& names)
{
    std::string out;
    for (const NodeSet& s : sets) {
        if (!out.empty())
            out += " ";
        out += s.to_string(names);
    }
    return out.empty() ? "(none)" : out;
}

void analyze_objective(const Scenario& scn, const Fbqs& fb, std::ostream& out)
{
    bool qi = has_quorum_intersection(fb);
    out << "quorum-intersection\t" << (qi ? "true" : "false") << "\n";
    QuorumSystem qs = enumerate_quorums(fb);
    out << "quorums\t" << qs.quorums.size() << "\t" << sets_line(qs.quorums, scn.names) << "\n";
    out << "minimal-quorums\t" << sets_line(minimal_quorums(fb), scn.names) << "\n";
    if (!qi) {
        out << "note\tno quorum intersection: intact sets and the induced DQS are undefined\n";
        return;
    }
    NodeSet intact = intact_set(fb, FailureScenario{scn.faulty});
    out << "intact\t" << set_line(intact, scn.names) << "\n";
    out << "befouled\t" << set_line(fb.universe() - intact, scn.names) << "\n";
    Dqs dqs = induced_dqs(fb);
    out << "induced-fail-prone\t" << sets_line(dqs.fail_prone.fail_sets, scn.names) << "\n";
    out << check_dqs(dqs, FailureScenario{scn.faulty}).to_string(scn.names);
}

void analyze_subjective(const Scenario& scn, std::ostream& out)
{
    SubjectiveFbqs fam = SubjectiveFbqs::from_overrides(
        scn.universe, FailureScenario{scn.faulty}, scn.structure.slices,
        scn.structure.view_overrides);
    out << "view-agreement\t" << (validate_agreement(fam).all_pass() ? "pass" : "fail") << "\n";
    bool qi = subjective_quorum_intersection(fam);
    out << "quorum-intersection\t" << (qi ? "true" : "false") << "\n";
    if (!qi) {
        out << "note\tno per-view quorum intersection: subjective analysis is undefined\n";
        return;
    }
    SubjectiveQuorumSystem qs = induce_subjective_quorums(fam);
    for (const auto& [viewer, quorums] : qs.per_view) {
        out << "view\t" << NodeSet::node_name(viewer, scn.names) << "\tquorums\t"
            << sets_line(quorums.quorums, scn.names) << "\n";
        out << "view\t" << NodeSet::node_name(viewer, scn.names) << "\tminimal-quorums\t"
            << sets_line(minimal_quorums(fam.view(viewer)), scn.names) << "\n";
    }
    NodeSet intact = subjective_intact_set(fam);
    out << "intact\t" << set_line(intact, scn.names) << "\n";
    out << "befouled\t" << set_line(scn.universe - intact, scn.names) << "\n";
    if (intact.empty()) {
        out << "note\tno intact server: the induced subjective DQS is undefined\n";
        return;
    }
    SubjectiveDqs sdqs = induced_subjective_dqs(fam);
    for (const auto& [viewer, fp] : sdqs.per_view_fail_prone)
        out << "view\t" << NodeSet::node_name(viewer, scn.names) << "\tfail-prone\t"
            << sets_line(fp.fail_sets, scn.names) << "\n";
    out << check_subjective_dqs(sdqs).to_string(scn.names);
}

bool subjective_variant(VariantTag tag)
{
    return tag == VariantTag::BrachaSubjective || tag == VariantTag::StellarSubjective;
}

std::string spec_name(SpecKind spec)
{
    return spec == SpecKind::Reliable ? "reliable" : "weakly-reliable";
}

void header(std::ostream& out, bool lines, const char* title)
{
    if (!lines)
        out << "# " << title << "\n";
}

} // namespace

int cmd_analyze(const Scenario& scenario, std::ostream& out)
{
    out << "universe\t" << set_line(scenario.universe, scenario.names) << "\n";
    out << "faulty\t" << set_line(scenario.faulty, scenario.names) << "\n";
    out << "variant\t" << to_string(scenario.variant) << "\n";
    if (subjective_variant(scenario.variant))
        analyze_subjective(scenario, out);
    else
        analyze_objective(scenario, Fbqs(scenario.universe, scenario.structure.slices), out);
    return 0;
}

int cmd_simulate(Scenario scenario, const SimulateOptions& options, std::ostream& out)
{
    if (options.seed) {
        scenario.scheduler.mode = SchedulerPolicy::Mode::Random;
        scenario.scheduler.seed = *options.seed;
    } else if (scenario.scheduler.mode == SchedulerPolicy::Mode::Exhaustive) {
        scenario.scheduler.mode = SchedulerPolicy::Mode::Fifo; // single-run normalization
    }

    CheckContext ctx = make_check_context(scenario);
    Trace trace = run(scenario);

    std::string trace_text = serialize_trace(trace, scenario.names);
    if (!options.out_file.empty()) {
        std::ofstream f(options.out_file);
        if (!f)
            throw ConfigError("cannot write trace file: " + options.out_file);
        f << trace_text;
    } else {
        header(out, options.lines_format, "trace");
        out << trace_text;
    }

    header(out, options.lines_format, "history");
    out << serialize_history(extract_history(trace), scenario.names);

    PropertyReport report = check_trace(trace, ctx);
    header(out, options.lines_format, "properties");
    out << report.to_string(scenario.names);

    header(out, options.lines_format, "lemmas");
    for (const AxiomCheck& c : check_lemma_invariants(trace, ctx).checks)
        out << "lemma\t" << c.format(scenario.names) << "\n";

    if (!options.spec)
        return 0;
    bool pass = report.passes(*options.spec);
    header(out, options.lines_format, "result");
    out << "spec\t" << spec_name(*options.spec) << "\t" << (pass ? "pass" : "fail") << "\n";
    return pass ? 0 : 1;
}

int cmd_explore(const Scenario& scenario, const ExploreOptions& options, std::ostream& out)
{
    Exploration ex = explore(scenario);

    header(out, options.lines_format, "exploration");
    out << "states\t" << ex.stats.states_visited << "\n";
    out << "transitions\t" << ex.stats.transitions << "\n";
    out << "traces\t" << ex.traces.size() << "\n";
    out << "quiescent\t" << ex.stats.quiescent_traces << "\n";
    out << "bound-exhausted\t" << ex.stats.bound_exhausted_traces << "\n";

    SpecKind spec = options.spec.value_or(SpecKind::Reliable);
    PropertyReport report = check_exploration(ex.traces, scenario, spec);
    header(out, options.lines_format, "properties");
    out << report.to_string(scenario.names);

    if (!options.spec)
        return 0;
    bool pass = report.passes(spec);
    header(out, options.lines_format, "result");
    out << "spec\t" << spec_name(spec) << "\t" << (pass ? "pass" : "fail") << "\n";
    return pass ? 0 : 1;
}

int cmd_equiv(const Scenario& scenario, const EquivOptions& options, std::ostream& out)
{
    struct Direction {
        EquivDirection dir;
        VariantTag source;
        const char* label;
    };
    const Direction directions[] = {
        {EquivDirection::BrachaToStellarOpen, VariantTag::Bracha, "bracha-to-stellar-open"},
        {EquivDirection::StellarOpenToBracha, VariantTag::StellarOpen, "stellar-open-to-bracha"},
    };

    int status = 0;
    for (const Direction& d : directions) {
        Scenario source = scenario;
        source.variant = d.source;
        if (source.scheduler.mode == SchedulerPolicy::Mode::Exhaustive)
            source.scheduler.mode = SchedulerPolicy::Mode::Fifo;
        Trace source_trace = run(source);

        header(out, options.lines_format, (std::string("direction ") + d.label).c_str());
        header(out, options.lines_format, "source trace");
        out << serialize_trace(source_trace, scenario.names);
        try {
            Trace built = build_equiv_execution(d.dir, source_trace, source);
            header(out, options.lines_format, "constructed trace");
            out << serialize_trace(built, scenario.names);
            header(out, options.lines_format, "common history");
            out << serialize_history(extract_history(built), scenario.names);
            out << "equivalence\t" << d.label << "\tpass\n";
        } catch (const EquivMismatchError& e) {
            out << "equivalence\t" << d.label << "\tfail\n" << e.what() << "\n";
            status = 1;
        }
    }
    return status;
}

} // namespace fbqs
