#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fixrev/clock.hpp"
#include "fixrev/detection.hpp"
#include "fixrev/events.hpp"
#include "fixrev/repository.hpp"
#include "fixrev/stability.hpp"

namespace fixrev {

enum class CaseState {
    Draft,
    Submitted,
    SealedSubmission,
    EditorAssigned,
    UnderReview,
    RevisionRequested,
    Revised,
    SealedRevision,
    DecisionPending,
    Accepted,
    SealedAcceptance,
    Published,
    Rejected,
    Suspended,
};

std::string_view to_string(CaseState state);
CaseState case_state_from_string(std::string_view s);

struct Checkpoint {
    CheckpointKind kind = CheckpointKind::Submission;
    int instance = 1;

    std::string key() const;  // "submission/1", "revision/2", ...
    bool operator==(const Checkpoint&) const = default;
};

// Immutable seal of dataset identity at a checkpoint: raw container digest,
// content-normalized manifest, and the stability probe observed at seal
// time. Never overwritten; re-seals get a fresh instance number.
struct HashRecord {
    Checkpoint checkpoint;
    Digest raw_digest;
    HashManifest content_manifest;
    StabilitySummary stability;
    std::string source_link;
    std::int64_t sealed_at = 0;
    std::string sealed_by;
};

nlohmann::json record_to_json(const HashRecord& record);
HashRecord record_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const HashManifest& manifest);
HashManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json dataset_ref_to_json(const DatasetRef& ref);
DatasetRef dataset_ref_from_json(const nlohmann::json& j);

enum class ComparisonMode { Raw, ContentNormalized };
enum class ComparisonOutcome { Match, Mismatch };

ComparisonOutcome compare_records(const HashRecord& a, const HashRecord& b, ComparisonMode mode);

// Author-declared, editor-approved authorization for a mid-review data
// change. Effective only once approved; a clean revision seal consumes it.
struct DataRevision {
    std::string declared_by;
    std::string note;
    std::optional<std::string> approved_by;
    std::string covers_from;               // checkpoint key of the baseline at declaration
    std::optional<std::string> covers_to;  // checkpoint key of the consuming revision seal
    std::int64_t declared_at = 0;

    bool effective() const { return approved_by.has_value(); }
    bool consumed() const { return covers_to.has_value(); }
};

struct Participant {
    Role role = Role::Author;
    std::string name;
    std::string affiliation;
};

struct CommentEntry {
    Role author_role = Role::Referee;
    std::string actor;
    std::string text;
    bool identity_consent = false;
    int round = 1;
    std::int64_t at = 0;
};

enum class Decision { Accept, Reject };

struct ReviewCase {
    std::string case_id;
    nlohmann::json manuscript_meta = nlohmann::json::object();
    DatasetRef dataset_ref;
    CaseState state = CaseState::Draft;
    std::optional<CaseState> pre_suspension_state;
    std::vector<HashRecord> records;  // in seal order; write-once per (kind, instance)
    std::vector<DataRevision> revisions;
    std::vector<ManipulationFinding> findings;
    std::vector<Participant> participants;
    std::vector<CommentEntry> comments;
    std::vector<std::string> state_trail;  // state after every event that changed it
    std::map<int, std::vector<Notification>> notifications;  // finding id → routed recipients
    int revision_round = 0;
    std::optional<std::size_t> baseline_index;  // comparison baseline, index into records
    std::optional<std::int64_t> published_at;

    const HashRecord* find_record(CheckpointKind kind, int instance) const;
    const HashRecord* latest_record(CheckpointKind kind) const;
    const HashRecord* baseline_record() const;
    const Participant* find_participant(const std::string& name) const;
    bool has_participant(const std::string& name, Role role) const;
    const ManipulationFinding* find_finding(int id) const;
};

struct SealOutcome {
    std::optional<Checkpoint> checkpoint;  // set when a record was sealed
    std::optional<int> finding_id;
    CaseState state_after = CaseState::Draft;
};

// Event-sourced review engine. Every operation validates its precondition,
// appends one or more events, and folds them into the case; replaying the
// log reproduces the exact state. Single writer per case: wrap calls in
// external serialization when sharing an instance across threads.
class ReviewEngine {
  public:
    explicit ReviewEngine(std::string case_id, Clock* clock = nullptr);

    // Rebuilds a case from a verified log. The clock only matters for
    // subsequent operations.
    static ReviewEngine from_log(EventLog log, Clock* clock = nullptr);

    // Pure fold of an event log into a case (no verification, no engine).
    static ReviewCase replay(const EventLog& log);

    void add_participant(Role role, const std::string& name, const std::string& affiliation = "");

    // Flow 1: manuscript with data links enters the system.
    void submit(const nlohmann::json& manuscript_meta, const DatasetRef& dataset_ref,
                const std::string& author, const std::string& affiliation = "");

    // Flows 4 / 4' / 14 / post-publication audit: fetch, probe, record, and
    // classify against the comparison baseline. A Data-loss or falsification
    // or unauthorized-change outcome suspends the case instead of advancing.
    SealOutcome seal_checkpoint(CheckpointKind kind, Connector& connector, int probe_n = 2,
                                const std::string& actor = "secretariat");

    void assign_editor(const std::string& editor, const std::string& affiliation = "");
    void assign_referee(const std::string& editor, const std::string& referee,
                        const std::optional<std::string>& conflict_note = std::nullopt,
                        const std::string& referee_affiliation = "");

    void record_comment(const std::string& actor, Role role, const std::string& text,
                        bool identity_consent);

    void request_revision(const std::string& editor);
    void declare_data_revision(const std::string& author, const std::string& note);
    void approve_data_revision(const std::string& editor);
    void submit_revision(const std::string& author);

    void complete_review(const std::string& editor);
    void decide(const std::string& editor, Decision decision);

    // Flow 14 wrapper: seal the acceptance checkpoint from state Accepted.
    SealOutcome accept_and_seal(Connector& connector, int probe_n = 2,
                                const std::string& actor = "secretariat");

    // Flows 15-17: emits the report through the sink, then marks Published.
    void publish(const std::string& actor, const std::function<void(const ReviewCase&)>& report_sink);

    int flag_policy_finding(const std::string& reporter, FindingCategory category,
                            const std::string& note, std::vector<std::string> evidence = {});

    void resolve_finding(const std::string& editor, int finding_id, ResolutionVerdict verdict,
                         const std::string& note, bool resume);

    const ReviewCase& current() const noexcept { return case_; }
    const EventLog& log() const noexcept { return log_; }

  private:
    void apply_and_store(Role actor_role, const std::string& actor, const std::string& event_type,
                         nlohmann::json payload);
    int raise_finding(ManipulationFinding finding, bool suspends, CaseState pre_suspension,
                      Role reporter_role, const std::string& reporter);
    void require_state(CaseState expected, const char* op) const;
    void require_editor(const std::string& name, const char* op) const;

    ReviewCase case_;
    EventLog log_;
    Clock* clock_;
};

// Applies one event to a case; the only place case state mutates.
void apply_event(ReviewCase& c, const ReviewEvent& event);

// Canonical JSON snapshot of the whole case. Two cases are behaviorally
// identical iff their snapshots serialize identically; also what the CLI
// caches next to the authoritative log.
nlohmann::json case_snapshot(const ReviewCase& c);

}  // namespace fixrev
