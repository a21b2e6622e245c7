#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "fixrev/errors.hpp"
#include "fixrev/http_fetch.hpp"
#include "fixrev/report.hpp"
#include "fixrev/scenario.hpp"
#include "fixrev/workflow.hpp"

namespace fs = std::filesystem;
using namespace fixrev;

namespace {

// Exit codes (stable contract):
//   0 success / verified
//   1 rejected operation, mismatch, or failed expectations
//   2 usage, script, or schema errors
//   3 I/O and transport failures (including a held case lock)
int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::SchemaInvalid:
        case ErrorCode::ScriptInvalid:
        case ErrorCode::ConfigInvalid:
            return 2;
        case ErrorCode::NotFound:
        case ErrorCode::Timeout:
        case ErrorCode::TransportError:
        case ErrorCode::TooLarge:
        case ErrorCode::TooManyRedirects:
        case ErrorCode::FetchFailed:
        case ErrorCode::IoError:
        case ErrorCode::LockHeld:
            return 3;
        default:
            return 1;
    }
}

struct Config {
    int probe_n = 2;
    std::string verify_mode = "strict";  // default mode for `verify`
    FetchLimits limits;
    std::unique_ptr<SteppingClock> stepping_clock;  // set when clock.mode == "stepping"

    Clock* clock() { return stepping_clock ? static_cast<Clock*>(stepping_clock.get()) : &system_clock(); }
};

Config load_config(const std::string& explicit_path) {
    Config cfg;
    std::string path = explicit_path;
    if (path.empty() && fs::exists("fixity-review.json")) path = "fixity-review.json";
    if (path.empty()) return cfg;

    std::ifstream in(path);
    if (!in.good()) throw Error(ErrorCode::ConfigInvalid, "cannot read config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, path + ": " + e.what());
    }
    cfg.probe_n = j.value("probe_n", cfg.probe_n);
    cfg.verify_mode = j.value("comparison_mode", cfg.verify_mode);
    if (j.contains("fetch")) {
        const auto& f = j.at("fetch");
        cfg.limits.max_bytes = f.value("max_bytes", cfg.limits.max_bytes);
        cfg.limits.timeout_ms = f.value("timeout_ms", cfg.limits.timeout_ms);
        cfg.limits.max_redirects = f.value("max_redirects", cfg.limits.max_redirects);
    }
    if (j.contains("clock") && j.at("clock").value("mode", std::string("system")) == "stepping") {
        cfg.stepping_clock = std::make_unique<SteppingClock>(
            j.at("clock").value("start", static_cast<std::int64_t>(1704067200)),
            j.at("clock").value("step", static_cast<std::int64_t>(60)));
    }
    return cfg;
}

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_or_throw(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw Error(ErrorCode::IoError, "cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw Error(ErrorCode::IoError, "short write to " + path);
}

int run_hash(const std::vector<std::string>& paths) {
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in.good() || fs::is_directory(path)) {
            throw Error(ErrorCode::IoError, "cannot read " + path);
        }
        Sha256 hasher;
        char buf[1 << 16];
        while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
            hasher.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
        }
        std::cout << hasher.finish().hex() << "  " << path << "\n";
    }
    return 0;
}

int run_manifest(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::IoError, dir + " is not a readable directory");
    }
    std::vector<FileEntry> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string rel = fs::relative(entry.path(), dir).generic_string();
        files.push_back(FileEntry{rel, read_file_or_throw(entry.path().string())});
    }
    std::cout << build_manifest(files).canonical_text();
    return 0;
}

int run_verify(const std::string& report_path, bool content_normalized, Config& cfg) {
    std::string bytes;
    try {
        bytes = read_file_or_throw(report_path);
    } catch (const Error&) {
        throw Error(ErrorCode::IoError, "cannot read report " + report_path);
    }
    PeerReviewReport report = parse_report(bytes);  // SchemaInvalid → exit 2
    VerifyMode mode = content_normalized || cfg.verify_mode == "content-normalized"
                          ? VerifyMode::ContentNormalized
                          : VerifyMode::Strict;
    VerificationOutcome outcome = verify_against_report(
        report,
        [&]() { return fetch_link(report.data_section.permanent_link, cfg.limits, cfg.clock()).bytes; },
        mode, cfg.clock());
    std::cout << to_string(outcome.verdict) << "\n";
    std::cerr << outcome.detail << "\n";
    switch (outcome.verdict) {
        case VerifyVerdict::Verified:
        case VerifyVerdict::VerifiedContentOnly:
            return 0;
        case VerifyVerdict::Mismatch:
            return 1;
        case VerifyVerdict::Inaccessible:
            return 3;
    }
    return 3;
}

int run_scenario_cmd(const std::string& file, const std::string& summary_out,
                     const std::string& report_out) {
    nlohmann::json script;
    try {
        script = nlohmann::json::parse(read_file_or_throw(file));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ScriptInvalid, std::string("script is not valid JSON: ") + e.what());
    }
    ScenarioResult result = run_scenario(script);
    std::string summary = result.summary.dump() + "\n";
    std::cout << summary;
    if (!summary_out.empty()) write_file_or_throw(summary_out, summary);
    if (!report_out.empty() && !result.report_bytes.empty()) {
        write_file_or_throw(report_out, result.report_bytes);
    }
    if (!result.expectations_ok) {
        for (const auto& f : result.failures) std::cerr << "expectation failed: " << f << "\n";
        return 1;
    }
    return 0;
}

// One CLI invocation per case directory; the lock lives for the process.
class CaseLock {
  public:
    explicit CaseLock(const fs::path& dir) {
        fs::create_directories(dir);
        fd_ = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open lock file in " + dir.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw Error(ErrorCode::LockHeld, "another invocation holds " + dir.string());
        }
    }
    ~CaseLock() {
        if (fd_ >= 0) ::close(fd_);  // releases the flock
    }

  private:
    int fd_ = -1;
};

struct CaseStore {
    fs::path dir;
    CaseLock lock;
    std::unique_ptr<ReviewEngine> engine;
    std::size_t persisted_events = 0;

    CaseStore(const std::string& case_dir, Clock* clock, bool must_exist) : dir(case_dir), lock(dir) {
        fs::path log_path = dir / "events.jsonl";
        if (fs::exists(log_path)) {
            EventLog log = EventLog::from_jsonl(read_file_or_throw(log_path.string()));
            persisted_events = log.size();
            engine = std::make_unique<ReviewEngine>(ReviewEngine::from_log(std::move(log), clock));
        } else if (must_exist) {
            throw Error(ErrorCode::IoError, "no case at " + dir.string() + " (run `case submit` first)");
        }
    }

    void persist() {
        // The log is authoritative and append-only; state.json is a cache.
        const auto& events = engine->log().events();
        std::ofstream out(dir / "events.jsonl", std::ios::binary | std::ios::app);
        if (!out.good()) throw Error(ErrorCode::IoError, "cannot append to events.jsonl");
        for (std::size_t i = persisted_events; i < events.size(); ++i) {
            out << event_to_json(events[i]).dump() << "\n";
        }
        out.flush();
        if (!out.good()) throw Error(ErrorCode::IoError, "short write to events.jsonl");
        persisted_events = events.size();
        write_file_or_throw((dir / "state.json").string(),
                            case_snapshot(engine->current()).dump() + "\n");
    }

    void print_state() const {
        const ReviewCase& c = engine->current();
        nlohmann::json out{{"case_id", c.case_id},
                           {"state", std::string(to_string(c.state))},
                           {"events", engine->log().size()},
                           {"records", nlohmann::json::object()},
                           {"findings", nlohmann::json::array()}};
        for (const auto& r : c.records) {
            out["records"][r.checkpoint.key()] = r.raw_digest.hex();
        }
        for (const auto& f : c.findings) {
            out["findings"].push_back({{"id", f.id},
                                       {"category", std::string(f.info().slug)},
                                       {"disposition", std::string(to_string(f.disposition))}});
        }
        std::cout << out.dump() << "\n";
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integrity engine for data-journal peer review: hash-sealed checkpoints, "
                 "incident classification, and open review reports"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "config file (default ./fixity-review.json if present)");

    // hash
    auto* hash_cmd = app.add_subcommand("hash", "print canonical digest lines for files");
    std::vector<std::string> hash_paths;
    hash_cmd->add_option("paths", hash_paths, "files to hash")->required();

    // manifest
    auto* manifest_cmd = app.add_subcommand("manifest", "print the canonical manifest of a directory");
    std::string manifest_dir;
    manifest_cmd->add_option("dir", manifest_dir, "directory to walk")->required();

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "verify published data against a review report");
    std::string verify_report;
    bool verify_content = false;
    verify_cmd->add_option("report", verify_report, "review report JSON file")->required();
    verify_cmd->add_flag("--content-normalized", verify_content,
                         "fall back to archive-content comparison when containers differ");

    // scenario run
    auto* scenario_cmd = app.add_subcommand("scenario", "scripted end-to-end runs");
    auto* scenario_run = scenario_cmd->add_subcommand("run", "execute a scenario script");
    std::string scenario_file, scenario_summary_out, scenario_report_out;
    scenario_run->add_option("file", scenario_file, "scenario JSON script")->required();
    scenario_run->add_option("--summary-out", scenario_summary_out, "also write the summary here");
    scenario_run->add_option("--report-out", scenario_report_out,
                             "write the emitted review report here");

    // case
    auto* case_cmd = app.add_subcommand("case", "drive one persisted review case");
    std::string case_dir;
    case_cmd->add_option("--case-dir", case_dir, "case directory (holds events.jsonl)")->required();

    auto* c_submit = case_cmd->add_subcommand("submit", "open the case (flow 1)");
    std::string s_case_id, s_author, s_affiliation, s_title, s_ref_file;
    c_submit->add_option("--case-id", s_case_id)->required();
    c_submit->add_option("--author", s_author)->required();
    c_submit->add_option("--affiliation", s_affiliation);
    c_submit->add_option("--title", s_title)->required();
    c_submit->add_option("--dataset-ref", s_ref_file, "dataset reference JSON file")->required();

    auto* c_seal = case_cmd->add_subcommand("seal", "seal the pending checkpoint");
    int seal_probe_n = 0;
    c_seal->add_option("--probe-n", seal_probe_n, "fetch count for the stability probe");

    auto* c_assign = case_cmd->add_subcommand("assign", "assign editor and referee");
    std::string a_editor, a_referee, a_referee_affiliation, a_conflict;
    c_assign->add_option("--editor", a_editor)->required();
    c_assign->add_option("--referee", a_referee)->required();
    c_assign->add_option("--referee-affiliation", a_referee_affiliation);
    c_assign->add_option("--conflict-note", a_conflict, "recorded for audit; never blocks");

    auto* c_comment = case_cmd->add_subcommand("comment", "record a review comment");
    std::string m_actor, m_role = "referee", m_text;
    bool m_consent = false;
    c_comment->add_option("--actor", m_actor)->required();
    c_comment->add_option("--role", m_role)->check(CLI::IsMember({"referee", "editor"}));
    c_comment->add_option("--text", m_text)->required();
    c_comment->add_flag("--consent,!--no-consent", m_consent,
                        "disclose this writer's identity in the published report");

    auto* c_revise = case_cmd->add_subcommand("revise", "revision round actions");
    std::string r_action, r_actor, r_note;
    c_revise->add_option("action", r_action)->check(CLI::IsMember({"request", "declare", "submit"}))
        ->required();
    c_revise->add_option("--actor", r_actor)->required();
    c_revise->add_option("--note", r_note, "what will change (declare)");

    auto* c_approve = case_cmd->add_subcommand("approve-revision", "editor approves a declared change");
    std::string ap_editor;
    c_approve->add_option("--editor", ap_editor)->required();

    auto* c_decide = case_cmd->add_subcommand("decide", "close review / record the decision");
    std::string d_action, d_editor;
    c_decide->add_option("action", d_action)->check(CLI::IsMember({"complete", "accept", "reject"}))
        ->required();
    c_decide->add_option("--editor", d_editor)->required();

    auto* c_accept = case_cmd->add_subcommand("accept", "seal the acceptance checkpoint (flow 14)");
    int accept_probe_n = 0;
    c_accept->add_option("--probe-n", accept_probe_n);

    auto* c_publish = case_cmd->add_subcommand("publish", "emit the review report and publish");
    std::string p_report_out;
    c_publish->add_option("--report-out", p_report_out, "report path (default <case-dir>/<id>.review-report.json)");

    auto* c_resolve = case_cmd->add_subcommand("resolve", "editor resolves an open finding");
    std::string res_editor, res_verdict, res_note;
    int res_finding = 0;
    bool res_resume = false;
    c_resolve->add_option("--editor", res_editor)->required();
    c_resolve->add_option("--finding", res_finding)->required();
    c_resolve->add_option("--verdict", res_verdict)
        ->check(CLI::IsMember({"malicious", "negligent", "technical-issue", "unfounded"}))
        ->required();
    c_resolve->add_option("--note", res_note);
    c_resolve->add_flag("--resume", res_resume, "resume a suspended case");

    auto* c_status = case_cmd->add_subcommand("status", "print the current case state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Config cfg = load_config(config_path);

        if (*hash_cmd) return run_hash(hash_paths);
        if (*manifest_cmd) return run_manifest(manifest_dir);
        if (*verify_cmd) return run_verify(verify_report, verify_content, cfg);
        if (*scenario_run) {
            return run_scenario_cmd(scenario_file, scenario_summary_out, scenario_report_out);
        }
        if (*scenario_cmd) {
            std::cerr << "usage: fixity-review scenario run <file>\n";
            return 2;
        }

        if (*case_cmd) {
            int probe_n = cfg.probe_n;
            if (*c_submit) {
                CaseStore store(case_dir, cfg.clock(), false);
                if (store.engine) {
                    throw Error(ErrorCode::InvalidState, "case already exists in " + case_dir);
                }
                DatasetRef ref = dataset_ref_from_json(
                    nlohmann::json::parse(read_file_or_throw(s_ref_file)));
                store.engine = std::make_unique<ReviewEngine>(s_case_id, cfg.clock());
                store.engine->submit({{"title", s_title}}, ref, s_author, s_affiliation);
                store.persist();
                store.print_state();
                return 0;
            }

            CaseStore store(case_dir, cfg.clock(), true);
            ReviewEngine& engine = *store.engine;
            LinkConnector connector(cfg.limits, cfg.clock());

            if (*c_seal || *c_accept) {
                int n = *c_seal ? seal_probe_n : accept_probe_n;
                if (n == 0) n = probe_n;
                CheckpointKind kind;
                switch (engine.current().state) {
                    case CaseState::Submitted: kind = CheckpointKind::Submission; break;
                    case CaseState::Revised: kind = CheckpointKind::Revision; break;
                    case CaseState::Accepted: kind = CheckpointKind::Acceptance; break;
                    case CaseState::Published: kind = CheckpointKind::PostPublication; break;
                    default:
                        throw Error(ErrorCode::InvalidState,
                                    "no checkpoint to seal from state " +
                                        std::string(to_string(engine.current().state)));
                }
                if (*c_accept && kind != CheckpointKind::Acceptance) {
                    throw Error(ErrorCode::InvalidState, "accept requires state Accepted");
                }
                engine.seal_checkpoint(kind, connector, n);
            } else if (*c_assign) {
                std::optional<std::string> conflict;
                if (!a_conflict.empty()) conflict = a_conflict;
                engine.assign_referee(a_editor, a_referee, conflict, a_referee_affiliation);
            } else if (*c_comment) {
                engine.record_comment(m_actor, m_role == "editor" ? Role::Editor : Role::Referee,
                                      m_text, m_consent);
            } else if (*c_revise) {
                if (r_action == "request") {
                    engine.request_revision(r_actor);
                } else if (r_action == "declare") {
                    engine.declare_data_revision(r_actor, r_note);
                } else {
                    engine.submit_revision(r_actor);
                }
            } else if (*c_approve) {
                engine.approve_data_revision(ap_editor);
            } else if (*c_decide) {
                if (d_action == "complete") {
                    engine.complete_review(d_editor);
                } else {
                    engine.decide(d_editor, d_action == "accept" ? Decision::Accept : Decision::Reject);
                }
            } else if (*c_publish) {
                std::string out_path = p_report_out.empty()
                                           ? (fs::path(case_dir) /
                                              report_file_name(engine.current().case_id))
                                                 .string()
                                           : p_report_out;
                engine.publish("secretariat", [&](const ReviewCase& c) {
                    write_file_or_throw(out_path, serialize_report(generate_report(c)));
                });
                std::cerr << "report written to " << out_path << "\n";
            } else if (*c_resolve) {
                ResolutionVerdict verdict = ResolutionVerdict::Unfounded;
                if (res_verdict == "malicious") verdict = ResolutionVerdict::Malicious;
                if (res_verdict == "negligent") verdict = ResolutionVerdict::Negligent;
                if (res_verdict == "technical-issue") verdict = ResolutionVerdict::TechnicalIssue;
                engine.resolve_finding(res_editor, res_finding, verdict, res_note, res_resume);
            } else if (*c_status) {
                store.print_state();
                return 0;
            } else {
                std::cerr << "usage: fixity-review case --case-dir <dir> <subcommand>\n";
                return 2;
            }
            store.persist();
            store.print_state();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
