#include "fixrev/scenario.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "fixrev/errors.hpp"
#include "fixrev/http_fetch.hpp"

namespace fixrev {

namespace {

[[noreturn]] void script_fail(const std::string& why) { throw Error(ErrorCode::ScriptInvalid, why); }

std::vector<FileEntry> parse_files(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) script_fail(where + ": expected a non-empty files array");
    std::vector<FileEntry> files;
    for (const auto& f : j) {
        if (!f.contains("path") || !f.contains("content")) {
            script_fail(where + ": each file needs path and content");
        }
        files.push_back({f.at("path").get<std::string>(), f.at("content").get<std::string>()});
    }
    return files;
}

struct Runner {
    const nlohmann::json& script;
    std::unique_ptr<SteppingClock> clock;
    std::unique_ptr<SimulatedRepo> repo;
    std::unique_ptr<ReviewEngine> engine;
    std::map<std::string, Role> actor_roles;
    std::map<std::string, DatasetRef> datasets;
    int probe_n = 2;
    std::string report_bytes;
    std::optional<VerificationOutcome> verification;
    std::optional<RequirementReport> requirements;
    std::vector<std::string> failures;

    explicit Runner(const nlohmann::json& s) : script(s) {}

    const nlohmann::json& arg(const nlohmann::json& args, const char* key, const char* cmd) {
        if (!args.contains(key)) {
            script_fail(std::string(cmd) + ": missing argument '" + key + "'");
        }
        return args.at(key);
    }

    void setup() {
        if (!script.is_object()) script_fail("script must be a JSON object");
        for (const char* key : {"name", "case_id", "repository", "actors", "steps"}) {
            if (!script.contains(key)) script_fail(std::string("script is missing '") + key + "'");
        }

        std::int64_t start = 1704067200, step = 60;
        if (script.contains("clock")) {
            start = script.at("clock").value("start", start);
            step = script.at("clock").value("step", step);
        }
        if (step < 2) {
            // DOS mtime resolution is 2 s; a smaller step would make the
            // timestamp-recompression fault unreproducible.
            script_fail("clock.step must be at least 2 seconds");
        }
        clock = std::make_unique<SteppingClock>(start, step);

        const auto& repo_spec = script.at("repository");
        RepoBehavior behavior =
            repo_behavior_from_string(repo_spec.value("behavior", std::string("faithful")));
        repo = std::make_unique<SimulatedRepo>(behavior, repo_spec.value("id", std::string("repo-sim")),
                                               clock.get());
        if (!repo_spec.contains("datasets") || !repo_spec.at("datasets").is_array()) {
            script_fail("repository.datasets must be an array");
        }
        for (const auto& ds : repo_spec.at("datasets")) {
            std::string id = ds.value("dataset_id", std::string());
            if (id.empty()) script_fail("dataset_id missing in repository.datasets");
            std::optional<std::string> pid;
            if (ds.contains("persistent_id") && !ds.at("persistent_id").is_null()) {
                pid = ds.at("persistent_id").get<std::string>();
            }
            datasets[id] = repo->register_dataset(id, parse_files(ds.at("files"), "dataset " + id), pid);
        }

        if (script.contains("config")) {
            probe_n = script.at("config").value("probe_n", probe_n);
        }

        engine = std::make_unique<ReviewEngine>(script.at("case_id").get<std::string>(), clock.get());
        for (const auto& actor : script.at("actors")) {
            std::string name = actor.value("name", std::string());
            if (name.empty()) script_fail("actor without a name");
            Role role = role_from_label(actor.value("role", std::string("Secretariat")));
            actor_roles[name] = role;
        }

        // Validate steps before running anything: declared actors and known
        // commands only.
        static const std::set<std::string> known_commands = {
            "submit",          "seal",
            "assign",          "comment",
            "request_revision", "declare_revision",
            "approve_revision", "submit_revision",
            "complete_review", "decide",
            "accept",          "publish",
            "resolve",         "flag",
            "admin_replace",   "admin_withdraw",
            "check_requirements", "verify_report",
        };
        for (const auto& step : script.at("steps")) {
            std::string actor = step.value("actor", std::string());
            if (!actor_roles.count(actor)) {
                script_fail("step references undeclared actor '" + actor + "'");
            }
            std::string command = step.value("command", std::string());
            if (!known_commands.count(command)) {
                script_fail("unknown command '" + command + "'");
            }
        }
        validate_expectations();
    }

    void validate_expectations() {
        if (!script.contains("expectations")) return;
        const auto& exp = script.at("expectations");
        if (exp.contains("final_state")) {
            case_state_from_string(exp.at("final_state").get<std::string>());
        }
        if (exp.contains("state_trail_includes")) {
            for (const auto& s : exp.at("state_trail_includes")) {
                case_state_from_string(s.get<std::string>());
            }
        }
        if (exp.contains("findings")) {
            for (const auto& slug : exp.at("findings")) {
                category_from_slug(slug.get<std::string>());
            }
        }
        if (exp.contains("notifications")) {
            for (const auto& n : exp.at("notifications")) {
                category_from_slug(n.at("category").get<std::string>());
                for (const auto& r : n.at("recipients")) role_from_label(r.get<std::string>());
            }
        }
    }

    void run_step(const nlohmann::json& step) {
        std::string actor = step.at("actor").get<std::string>();
        std::string command = step.at("command").get<std::string>();
        nlohmann::json args = step.value("args", nlohmann::json::object());
        Role role = actor_roles.at(actor);

        if (command == "submit") {
            std::string dataset_id = arg(args, "dataset_id", "submit").get<std::string>();
            if (!datasets.count(dataset_id)) script_fail("submit: unknown dataset " + dataset_id);
            nlohmann::json meta = script.value("manuscript", nlohmann::json::object());
            std::string affiliation;
            // Registered cast goes into the case before the first event that
            // needs them.
            engine->submit(meta, datasets.at(dataset_id), actor, affiliation);
            for (const auto& [name, r] : actor_roles) {
                engine->add_participant(r, name);
            }
        } else if (command == "seal") {
            CheckpointKind kind;
            switch (engine->current().state) {
                case CaseState::Submitted: kind = CheckpointKind::Submission; break;
                case CaseState::Revised: kind = CheckpointKind::Revision; break;
                case CaseState::Accepted: kind = CheckpointKind::Acceptance; break;
                case CaseState::Published: kind = CheckpointKind::PostPublication; break;
                default:
                    throw Error(ErrorCode::InvalidState,
                                "no checkpoint to seal from state " +
                                    std::string(to_string(engine->current().state)));
            }
            engine->seal_checkpoint(kind, *repo, probe_n, actor);
        } else if (command == "assign") {
            std::optional<std::string> conflict;
            if (args.contains("conflict_note")) conflict = args.at("conflict_note").get<std::string>();
            engine->assign_referee(actor, arg(args, "referee", "assign").get<std::string>(), conflict);
        } else if (command == "comment") {
            engine->record_comment(actor, role, arg(args, "text", "comment").get<std::string>(),
                                   args.value("consent", true));
        } else if (command == "request_revision") {
            engine->request_revision(actor);
        } else if (command == "declare_revision") {
            engine->declare_data_revision(actor, arg(args, "note", "declare_revision").get<std::string>());
        } else if (command == "approve_revision") {
            engine->approve_data_revision(actor);
        } else if (command == "submit_revision") {
            engine->submit_revision(actor);
        } else if (command == "complete_review") {
            engine->complete_review(actor);
        } else if (command == "decide") {
            std::string d = arg(args, "decision", "decide").get<std::string>();
            if (d != "accept" && d != "reject") script_fail("decide: decision must be accept or reject");
            engine->decide(actor, d == "accept" ? Decision::Accept : Decision::Reject);
        } else if (command == "accept") {
            engine->accept_and_seal(*repo, probe_n, actor);
        } else if (command == "publish") {
            engine->publish(actor, [this](const ReviewCase& c) {
                report_bytes = serialize_report(generate_report(c));
            });
        } else if (command == "resolve") {
            engine->resolve_finding(actor, arg(args, "finding", "resolve").get<int>(),
                                    resolution_verdict_from_string(
                                        arg(args, "verdict", "resolve").get<std::string>()),
                                    args.value("note", std::string()), args.value("resume", true));
        } else if (command == "flag") {
            std::vector<std::string> evidence;
            if (args.contains("evidence")) {
                evidence = args.at("evidence").get<std::vector<std::string>>();
            }
            engine->flag_policy_finding(actor,
                                        category_from_slug(arg(args, "category", "flag").get<std::string>()),
                                        args.value("note", std::string()), std::move(evidence));
        } else if (command == "admin_replace") {
            std::string id = arg(args, "dataset_id", "admin_replace").get<std::string>();
            repo->admin_replace(id, parse_files(arg(args, "files", "admin_replace"), "admin_replace"));
        } else if (command == "admin_withdraw") {
            repo->admin_withdraw(arg(args, "dataset_id", "admin_withdraw").get<std::string>());
        } else if (command == "check_requirements") {
            std::string id = arg(args, "dataset_id", "check_requirements").get<std::string>();
            if (!datasets.count(id)) script_fail("check_requirements: unknown dataset " + id);
            requirements = check_repo_requirements(*repo, datasets.at(id), repo.get());
        } else if (command == "verify_report") {
            if (report_bytes.empty()) {
                throw Error(ErrorCode::InvalidState, "verify_report before publish");
            }
            VerifyMode mode = args.value("mode", std::string("content-normalized")) == "strict"
                                  ? VerifyMode::Strict
                                  : VerifyMode::ContentNormalized;
            verification = verify_against_report(parse_report(report_bytes), *repo, mode, clock.get());
        }
    }

    void check_expectations() {
        const ReviewCase& c = engine->current();
        if (!script.contains("expectations")) return;
        const auto& exp = script.at("expectations");

        if (exp.contains("final_state")) {
            std::string expected = exp.at("final_state").get<std::string>();
            std::string actual(to_string(c.state));
            if (expected != actual) {
                failures.push_back("final_state: expected " + expected + ", actual " + actual);
            }
        }
        if (exp.contains("state_trail_includes")) {
            for (const auto& s : exp.at("state_trail_includes")) {
                std::string wanted = s.get<std::string>();
                if (std::find(c.state_trail.begin(), c.state_trail.end(), wanted) ==
                    c.state_trail.end()) {
                    failures.push_back("state_trail: expected to include " + wanted);
                }
            }
        }
        if (exp.contains("findings")) {
            for (const auto& slug_json : exp.at("findings")) {
                std::string slug = slug_json.get<std::string>();
                FindingCategory cat = category_from_slug(slug);
                bool found = false;
                for (const auto& f : c.findings) found = found || f.category == cat;
                if (!found) failures.push_back("findings: expected " + slug + ", not raised");
            }
        }
        if (exp.contains("notifications")) {
            for (const auto& n : exp.at("notifications")) {
                FindingCategory cat = category_from_slug(n.at("category").get<std::string>());
                std::set<std::string> wanted;
                for (const auto& r : n.at("recipients")) wanted.insert(r.get<std::string>());
                bool matched = false;
                for (const auto& f : c.findings) {
                    if (f.category != cat || !c.notifications.count(f.id)) continue;
                    std::set<std::string> actual;
                    for (const auto& note : c.notifications.at(f.id)) {
                        actual.insert(std::string(role_label(note.recipient)));
                    }
                    if (actual == wanted) matched = true;
                }
                if (!matched) {
                    failures.push_back("notifications: no " + std::string(category_info(cat).slug) +
                                       " finding routed to the expected recipients");
                }
            }
        }
        if (exp.contains("verification")) {
            std::string expected = exp.at("verification").get<std::string>();
            std::string actual = verification ? std::string(to_string(verification->verdict)) : "none";
            if (expected != actual) {
                failures.push_back("verification: expected " + expected + ", actual " + actual);
            }
        }
        if (exp.contains("requirements_overall")) {
            bool expected = exp.at("requirements_overall").get<bool>();
            if (!requirements) {
                failures.push_back("requirements_overall: check_requirements never ran");
            } else if (requirements->overall != expected) {
                failures.push_back("requirements_overall: expected " + std::to_string(expected) +
                                   ", actual " + std::to_string(requirements->overall));
            }
        }
        if (exp.contains("report_emitted")) {
            bool expected = exp.at("report_emitted").get<bool>();
            if (expected != !report_bytes.empty()) {
                failures.push_back("report_emitted: expected " + std::to_string(expected));
            }
        }
    }

    nlohmann::json build_summary() {
        const ReviewCase& c = engine->current();
        nlohmann::json findings = nlohmann::json::array();
        for (const auto& f : c.findings) {
            nlohmann::json notified = nlohmann::json::array();
            if (c.notifications.count(f.id)) {
                for (const auto& n : c.notifications.at(f.id)) {
                    notified.push_back(std::string(role_label(n.recipient)));
                }
            }
            findings.push_back({{"id", f.id},
                                {"category", std::string(f.info().slug)},
                                {"category_label", std::string(f.info().label)},
                                {"role", std::string(role_label(f.info().role))},
                                {"table_row", f.info().table_row},
                                {"disposition", std::string(to_string(f.disposition))},
                                {"notified", std::move(notified)}});
        }

        nlohmann::json records = nlohmann::json::object();
        for (const auto& r : c.records) {
            records[r.checkpoint.key()] = {
                {"raw_digest", r.raw_digest.hex()},
                {"manifest_digest", r.content_manifest.manifest_digest().hex()},
                {"stability", std::string(to_string(r.stability.verdict))},
            };
        }

        nlohmann::json summary{
            {"name", script.at("name").get<std::string>()},
            {"case_id", c.case_id},
            {"repository_behavior", std::string(to_string(repo->behavior()))},
            {"final_state", std::string(to_string(c.state))},
            {"state_trail", c.state_trail},
            {"findings", std::move(findings)},
            {"records", std::move(records)},
            {"report", nullptr},
            {"verification", nullptr},
            {"requirements", nullptr},
            {"expectations", {{"ok", failures.empty()}, {"failures", failures}}},
        };
        if (!report_bytes.empty()) {
            summary["report"] = {{"digest", digest_bytes(report_bytes).hex()},
                                 {"bytes", report_bytes.size()}};
        }
        if (verification) {
            summary["verification"] = std::string(to_string(verification->verdict));
        }
        if (requirements) {
            nlohmann::json checks = nlohmann::json::array();
            for (const auto& chk : requirements->checks) {
                checks.push_back({{"name", chk.name}, {"passed", chk.passed}, {"evidence", chk.evidence}});
            }
            summary["requirements"] = {{"overall", requirements->overall}, {"checks", std::move(checks)}};
        }
        return summary;
    }
};

}  // namespace

ScenarioResult run_scenario(const nlohmann::json& script) {
    Runner runner(script);
    runner.setup();

    std::size_t step_no = 0;
    for (const auto& step : script.at("steps")) {
        ++step_no;
        try {
            runner.run_step(step);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ScriptInvalid || e.code() == ErrorCode::Timeout ||
                e.code() == ErrorCode::TransportError) {
                throw;
            }
            // An operation the script expected to succeed was rejected:
            // surface it as an expectation failure with context.
            runner.failures.push_back("step " + std::to_string(step_no) + " (" +
                                      step.value("command", std::string()) + ") failed: " + e.what());
            break;
        }
    }
    runner.check_expectations();

    ScenarioResult result;
    result.failures = runner.failures;
    result.expectations_ok = runner.failures.empty();
    result.summary = runner.build_summary();
    result.report_bytes = runner.report_bytes;
    return result;
}

ScenarioResult run_scenario_text(std::string_view text) {
    nlohmann::json script;
    try {
        script = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ScriptInvalid, std::string("script is not valid JSON: ") + e.what());
    }
    return run_scenario(script);
}

}  // namespace fixrev
