#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbqs/cli.hpp"
#include "fbqs/errors.hpp"

using namespace fbqs;

namespace {

std::string fixture(const std::string& name)
{
    return std::string(FBQS_SCENARIO_DIR) + "/" + name;
}

const char* kMinimal = R"({
  "universe": ["1", "2"],
  "slices": {"1": [["1", "2"]], "2": [["1", "2"]]},
  "client": {"value": "a"},
  "variant": "bracha"
})";

} // namespace

TEST_CASE("parsing the shipped equivocating-client fixture")
{
    Scenario s = load_scenario_file(fixture("example14.json"));
    CHECK(s.names == std::vector<std::string>{"1", "2", "3", "4"});
    CHECK(s.universe == NodeSet::full(4));
    CHECK(s.faulty == NodeSet::of({2})); // node "3" has id 2
    CHECK_FALSE(s.client.correct);
    CHECK(s.client.split == std::map<NodeId, Value>{{0, "a"}, {1, "a"}, {3, "a2"}});
    CHECK(s.variant == VariantTag::Stellar);
    CHECK(s.scheduler.mode == SchedulerPolicy::Mode::Exhaustive);
    CHECK(s.structure.slices.at(0).size() == 2);
}

TEST_CASE("parsing the subjective fixture")
{
    Scenario s = load_scenario_file(fixture("example19.json"));
    CHECK(s.variant == VariantTag::StellarSubjective);
    REQUIRE(s.structure.view_overrides.count(1)); // viewer "2"
    CHECK(s.structure.view_overrides.at(1).at(2) ==
          std::vector<NodeSet>{NodeSet::of({1, 2})}); // slice {"2","3"}
}

TEST_CASE("defaults for optional sections")
{
    Scenario s = parse_scenario(kMinimal);
    CHECK(s.faulty.empty());
    CHECK(s.adversary.empty());
    CHECK(s.scheduler.mode == SchedulerPolicy::Mode::Fifo);
    CHECK(s.bounds.max_steps == 100000);
    CHECK(s.line12_enabled);
}

TEST_CASE("parse diagnostics name the violated constraint")
{
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_scenario(text);
            FAIL_CHECK("expected a parse error containing: " << needle);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    // slice without its owner
    expect_error(R"({"universe": ["1", "2"],
                     "slices": {"1": [["1"]], "2": [["1"]]},
                     "client": {"value": "a"}, "variant": "bracha"})",
                 "slice must contain its owner");
    // unknown node in a slice
    expect_error(R"({"universe": ["1"], "slices": {"1": [["1", "9"]]},
                     "client": {"value": "a"}, "variant": "bracha"})",
                 "unknown node '9'");
    // unknown top-level field
    expect_error(R"({"universe": ["1"], "slices": {"1": [["1"]]},
                     "client": {"value": "a"}, "variant": "bracha", "extra": 1})",
                 "unknown field 'extra'");
    // views keyed by a faulty node
    expect_error(R"({"universe": ["1", "2"],
                     "slices": {"1": [["1"]], "2": [["2"]]},
                     "faulty": ["2"],
                     "views": {"2": {"2": [["2"]]}},
                     "client": {"value": "a"}, "variant": "stellar-subjective"})",
                 "views keyed by a faulty node");
    // adversary acting for a correct server
    expect_error(R"({"universe": ["1", "2"],
                     "slices": {"1": [["1"]], "2": [["2"]]},
                     "client": {"value": "a"}, "variant": "bracha",
                     "adversary": [{"at_step": 0,
                       "send": {"from": "1", "kind": "ECHO", "value": "a", "to": ["2"]}}]})",
                 "faulty actor");
    // malformed json
    expect_error("{", "syntax");
    // missing slices for a node
    expect_error(R"({"universe": ["1", "2"], "slices": {"1": [["1"]]},
                     "client": {"value": "a"}, "variant": "bracha"})",
                 "has no slices");
}

TEST_CASE("round-trip over every shipped fixture")
{
    for (const auto& entry : std::filesystem::directory_iterator(FBQS_SCENARIO_DIR)) {
        if (entry.path().extension() != ".json")
            continue;
        INFO("fixture: " << entry.path().filename().string());
        Scenario first = load_scenario_file(entry.path().string());
        Scenario second = parse_scenario(serialize_scenario(first));
        CHECK(first == second);
    }
}

TEST_CASE("analyze report for the hub fixture")
{
    Scenario s = load_scenario_file(fixture("example7.json"));
    std::ostringstream out;
    CHECK(cmd_analyze(s, out) == 0);
    std::string text = out.str();
    CHECK(text.find("quorums\t4\t{1,2} {1,2,3} {1,3,4} {1,2,3,4}\n") != std::string::npos);
    CHECK(text.find("induced-fail-prone\t{2} {3,4}\n") != std::string::npos);
    CHECK(text.find("intact\t{1,2}\n") != std::string::npos);
    CHECK(text.find("axiom\td-consistency\tpass\n") != std::string::npos);
}

TEST_CASE("simulate exit status follows the requested spec")
{
    Scenario s = load_scenario_file(fixture("example14.json"));
    std::ostringstream out;

    SimulateOptions weak;
    weak.spec = SpecKind::WeaklyReliable;
    CHECK(cmd_simulate(s, weak, out) == 0);

    SimulateOptions strong;
    strong.spec = SpecKind::Reliable;
    CHECK(cmd_simulate(s, strong, out) == 1);
    CHECK(out.str().find("property\ttotality\tfail\twitness=4") != std::string::npos);

    SimulateOptions none;
    CHECK(cmd_simulate(s, none, out) == 0);
}

TEST_CASE("simulate is deterministic for a fixed seed")
{
    Scenario s = load_scenario_file(fixture("example4.json"));
    SimulateOptions options;
    options.seed = 7;
    std::ostringstream first, second;
    cmd_simulate(s, options, first);
    cmd_simulate(s, options, second);
    CHECK(first.str() == second.str());
    CHECK(!first.str().empty());
}

TEST_CASE("explore command rejects single-run schedulers")
{
    Scenario s = load_scenario_file(fixture("example7-equiv-correct.json"));
    std::ostringstream out;
    CHECK_THROWS_AS(cmd_explore(s, ExploreOptions{}, out), ConfigError);
}

TEST_CASE("fifo traces match their golden files")
{
    auto golden = [](const std::string& name) {
        std::ifstream in(std::string(FBQS_SCENARIO_DIR) + "/../tests/golden/" + name);
        REQUIRE(in);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    for (const auto& [scenario, file] :
         {std::pair{"example14.json", "example14-fifo.trace"},
          std::pair{"example5.json", "example5-fifo.trace"}}) {
        Scenario s = load_scenario_file(fixture(scenario));
        s.scheduler.mode = SchedulerPolicy::Mode::Fifo;
        CHECK(serialize_trace(run(s), s.names) == golden(file));
    }
}

TEST_CASE("equiv command reports both directions")
{
    Scenario s = load_scenario_file(fixture("example7-equiv-silent.json"));
    std::ostringstream out;
    CHECK(cmd_equiv(s, EquivOptions{}, out) == 0);
    CHECK(out.str().find("equivalence\tbracha-to-stellar-open\tpass") != std::string::npos);
    CHECK(out.str().find("equivalence\tstellar-open-to-bracha\tpass") != std::string::npos);
}
