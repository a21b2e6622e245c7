#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fixrev/report.hpp"
#include "fixrev/workflow.hpp"

namespace fixrev {

// A scripted end-to-end run: a fresh simulated repository (with one of the
// four behaviors), a declared cast of actors, an ordered list of commands,
// and the expected outcome. Scripts are JSON; see scenarios/ for the two
// bundled incident replays.
struct ScenarioResult {
    nlohmann::json summary;              // canonical; deterministic under the scripted clock
    bool expectations_ok = false;
    std::vector<std::string> failures;   // human-readable expected-vs-actual diffs
    std::string report_bytes;            // canonical report, when the run published
};

// Throws Error(ScriptInvalid) for malformed scripts (unknown commands,
// undeclared actors, unknown expectation states/categories). Transport
// errors from an http-backed repository propagate as-is.
ScenarioResult run_scenario(const nlohmann::json& script);
ScenarioResult run_scenario_text(std::string_view text);

}  // namespace fixrev
