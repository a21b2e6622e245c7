#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixrev/errors.hpp"
#include "fixrev/scenario.hpp"

using namespace fixrev;

namespace {

std::string scenario_dir() {
    const char* env = std::getenv("FIXREV_SCENARIO_DIR");
    return env ? env : "scenarios";
}

nlohmann::json load_scenario(const std::string& name) {
    std::ifstream in(scenario_dir() + "/" + name);
    REQUIRE_MESSAGE(in.good(), "missing scenario ", name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return nlohmann::json::parse(ss.str());
}

}  // namespace

TEST_CASE("bundled case 1 scenario passes its expectations") {
    ScenarioResult result = run_scenario(load_scenario("case1.scenario.json"));
    for (const auto& f : result.failures) MESSAGE(f);
    CHECK(result.expectations_ok);
    CHECK(result.summary.at("final_state") == "Published");

    bool advisory = false;
    for (const auto& f : result.summary.at("findings")) {
        if (f.at("category") == "container-nondeterminism-advisory") {
            advisory = true;
            CHECK(f.at("table_row") == false);
            CHECK(f.at("role") == "Data Repository");
        }
    }
    CHECK(advisory);
    CHECK(result.summary.at("verification") == "VerifiedContentOnly");

    const auto& records = result.summary.at("records");
    CHECK(records.at("submission/1").at("stability") == "ContainerNondeterminism");
    // Raw digests across the two seals differ while manifests agree.
    CHECK(records.at("submission/1").at("raw_digest") != records.at("acceptance/1").at("raw_digest"));
    CHECK(records.at("submission/1").at("manifest_digest") ==
          records.at("acceptance/1").at("manifest_digest"));
}

TEST_CASE("bundled case 2 scenario passes its expectations") {
    ScenarioResult result = run_scenario(load_scenario("case2.scenario.json"));
    for (const auto& f : result.failures) MESSAGE(f);
    CHECK(result.expectations_ok);
    CHECK(result.summary.at("final_state") == "Accepted");

    const auto& trail = result.summary.at("state_trail");
    bool suspended = false, resumed = false;
    for (std::size_t i = 0; i < trail.size(); ++i) {
        if (trail[i] == "Suspended") {
            suspended = true;
            if (i + 1 < trail.size() && trail[i + 1] == "Accepted") resumed = true;
        }
    }
    CHECK(suspended);
    CHECK(resumed);

    bool unauthorized = false;
    for (const auto& f : result.summary.at("findings")) {
        if (f.at("category") == "unauthorized-change-during-review") {
            unauthorized = true;
            CHECK(f.at("disposition") == "Resolved");
            CHECK(f.at("notified") == nlohmann::json::array({"Editor"}));
        }
    }
    CHECK(unauthorized);
}

TEST_CASE("scenario runs are deterministic under the scripted clock") {
    nlohmann::json script = load_scenario("case1.scenario.json");
    ScenarioResult a = run_scenario(script);
    ScenarioResult b = run_scenario(script);
    CHECK(a.summary.dump() == b.summary.dump());
    CHECK(a.report_bytes == b.report_bytes);
}

TEST_CASE("wrong expectations produce diffs, not exceptions") {
    nlohmann::json script = load_scenario("case2.scenario.json");
    script["expectations"]["final_state"] = "Published";
    ScenarioResult result = run_scenario(script);
    CHECK(!result.expectations_ok);
    REQUIRE(!result.failures.empty());
    CHECK(result.failures[0].find("expected Published") != std::string::npos);
    CHECK(result.failures[0].find("actual Accepted") != std::string::npos);
}

TEST_CASE("script validation failures") {
    nlohmann::json script = load_scenario("case1.scenario.json");
    SUBCASE("undeclared actor") {
        script["steps"][0]["actor"] = "Nobody";
        CHECK_THROWS_AS(run_scenario(script), Error);
    }
    SUBCASE("unknown command") {
        script["steps"][0]["command"] = "frobnicate";
        CHECK_THROWS_AS(run_scenario(script), Error);
    }
    SUBCASE("unknown expected state") {
        script["expectations"]["final_state"] = "Limbo";
        CHECK_THROWS_AS(run_scenario(script), Error);
    }
    SUBCASE("not json") {
        CHECK_THROWS_AS(run_scenario_text("{nope"), Error);
    }
    SUBCASE("sub-second clock step") {
        script["clock"]["step"] = 1;
        CHECK_THROWS_AS(run_scenario(script), Error);
    }
}

TEST_CASE("a failing step surfaces as an expectation failure with context") {
    nlohmann::json script = load_scenario("case2.scenario.json");
    // Decide before the review completes: InvalidState at step 6.
    nlohmann::json steps = script["steps"];
    nlohmann::json reordered = nlohmann::json::array();
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i]["command"] == "complete_review") continue;
        reordered.push_back(steps[i]);
    }
    script["steps"] = reordered;
    ScenarioResult result = run_scenario(script);
    CHECK(!result.expectations_ok);
    bool mentions_step = false;
    for (const auto& f : result.failures) {
        if (f.find("failed: InvalidState") != std::string::npos) mentions_step = true;
    }
    CHECK(mentions_step);
}
