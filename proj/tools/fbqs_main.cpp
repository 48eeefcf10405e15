// Command line front end: analyze quorum structures, simulate and
// exhaustively explore broadcast runs, and rebuild executions across the two
// protocol families.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbqs/cli.hpp"
#include "fbqs/errors.hpp"

namespace {

std::optional<fbqs::SpecKind> parse_spec(const std::string& spec)
{
    if (spec.empty())
        return std::nullopt;
    if (spec == "reliable")
        return fbqs::SpecKind::Reliable;
    if (spec == "weakly-reliable")
        return fbqs::SpecKind::WeaklyReliable;
    throw fbqs::ConfigError("unknown spec '" + spec + "' (use reliable or weakly-reliable)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"federated quorum structures and reliable broadcast at desk scale"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string spec;
    std::string format = "text";
    std::string out_file;
    std::uint64_t seed = 0;
    bool seed_set = false;

    CLI::App* analyze = app.add_subcommand("analyze", "report quorums, intact sets and axioms");
    analyze->add_option("scenario", scenario_path, "scenario file")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "run once and check the trace");
    simulate->add_option("scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--seed", seed, "use seeded-random scheduling")
        ->each([&](const std::string&) { seed_set = true; });
    simulate->add_option("--spec", spec, "reliable|weakly-reliable");
    simulate->add_option("--out", out_file, "write the trace to a file");
    simulate->add_option("--format", format, "text|lines")
        ->check(CLI::IsMember({"text", "lines"}));

    CLI::App* explore = app.add_subcommand("explore", "exhaust all interleavings and check them");
    explore->add_option("scenario", scenario_path, "scenario file")->required();
    explore->add_option("--spec", spec, "reliable|weakly-reliable");
    explore->add_option("--format", format, "text|lines")
        ->check(CLI::IsMember({"text", "lines"}));

    CLI::App* equiv = app.add_subcommand("equiv", "rebuild each protocol's history in the other");
    equiv->add_option("scenario", scenario_path, "scenario file")->required();
    equiv->add_option("--format", format, "text|lines")->check(CLI::IsMember({"text", "lines"}));

    CLI11_PARSE(app, argc, argv);

    try {
        fbqs::Scenario scenario = fbqs::load_scenario_file(scenario_path);
        bool lines = format == "lines";
        if (analyze->parsed())
            return fbqs::cmd_analyze(scenario, std::cout);
        if (simulate->parsed()) {
            fbqs::SimulateOptions options;
            if (seed_set)
                options.seed = seed;
            options.spec = parse_spec(spec);
            options.out_file = out_file;
            options.lines_format = lines;
            return fbqs::cmd_simulate(std::move(scenario), options, std::cout);
        }
        if (explore->parsed()) {
            fbqs::ExploreOptions options;
            options.spec = parse_spec(spec);
            options.lines_format = lines;
            return fbqs::cmd_explore(scenario, options, std::cout);
        }
        fbqs::EquivOptions options;
        options.lines_format = lines;
        return fbqs::cmd_equiv(scenario, options, std::cout);
    } catch (const fbqs::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const fbqs::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const fbqs::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
