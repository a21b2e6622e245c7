#include "fixrev/workflow.hpp"

#include <algorithm>

#include "fixrev/errors.hpp"

namespace fixrev {

std::string_view to_string(CaseState state) {
    switch (state) {
        case CaseState::Draft: return "Draft";
        case CaseState::Submitted: return "Submitted";
        case CaseState::SealedSubmission: return "SealedSubmission";
        case CaseState::EditorAssigned: return "EditorAssigned";
        case CaseState::UnderReview: return "UnderReview";
        case CaseState::RevisionRequested: return "RevisionRequested";
        case CaseState::Revised: return "Revised";
        case CaseState::SealedRevision: return "SealedRevision";
        case CaseState::DecisionPending: return "DecisionPending";
        case CaseState::Accepted: return "Accepted";
        case CaseState::SealedAcceptance: return "SealedAcceptance";
        case CaseState::Published: return "Published";
        case CaseState::Rejected: return "Rejected";
        case CaseState::Suspended: return "Suspended";
    }
    return "Draft";
}

CaseState case_state_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(CaseState::Suspended); ++i) {
        CaseState st = static_cast<CaseState>(i);
        if (to_string(st) == s) return st;
    }
    throw Error(ErrorCode::SchemaInvalid, "unknown case state: " + std::string(s));
}

std::string Checkpoint::key() const {
    return std::string(to_string(kind)) + "/" + std::to_string(instance);
}

nlohmann::json manifest_to_json(const HashManifest& manifest) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : manifest.entries()) {
        entries.push_back({{"path", e.path}, {"sha256", e.digest.hex()}, {"size", e.size}});
    }
    return nlohmann::json{{"entries", std::move(entries)},
                          {"manifest_digest", manifest.manifest_digest().hex()}};
}

HashManifest manifest_from_json(const nlohmann::json& j) {
    std::vector<ManifestEntry> entries;
    for (const auto& e : j.at("entries")) {
        entries.push_back(ManifestEntry{e.at("path").get<std::string>(),
                                        Digest::from_hex(e.at("sha256").get<std::string>()),
                                        e.at("size").get<std::uint64_t>()});
    }
    HashManifest m = HashManifest::from_entries(std::move(entries));
    if (m.manifest_digest().hex() != j.at("manifest_digest").get<std::string>()) {
        throw Error(ErrorCode::SchemaInvalid, "manifest_digest does not recompute from entries");
    }
    return m;
}

nlohmann::json dataset_ref_to_json(const DatasetRef& ref) {
    nlohmann::json j{
        {"repository_id", ref.repository_id}, {"dataset_id", ref.dataset_id},
        {"landing_url", ref.landing_url},     {"download_link", ref.download_link},
        {"persistent_id", nullptr},           {"version_label", nullptr},
    };
    if (ref.persistent_id) j["persistent_id"] = *ref.persistent_id;
    if (ref.version_label) j["version_label"] = *ref.version_label;
    return j;
}

DatasetRef dataset_ref_from_json(const nlohmann::json& j) {
    DatasetRef ref;
    ref.repository_id = j.at("repository_id").get<std::string>();
    ref.dataset_id = j.at("dataset_id").get<std::string>();
    ref.landing_url = j.at("landing_url").get<std::string>();
    ref.download_link = j.at("download_link").get<std::string>();
    if (j.contains("persistent_id") && !j.at("persistent_id").is_null()) {
        ref.persistent_id = j.at("persistent_id").get<std::string>();
    }
    if (j.contains("version_label") && !j.at("version_label").is_null()) {
        ref.version_label = j.at("version_label").get<std::string>();
    }
    return ref;
}

nlohmann::json record_to_json(const HashRecord& record) {
    nlohmann::json raw = nlohmann::json::array();
    for (const auto& d : record.stability.raw_digests) raw.push_back(d.hex());
    nlohmann::json content = nlohmann::json::array();
    for (const auto& d : record.stability.content_manifest_digests) content.push_back(d.hex());
    return nlohmann::json{
        {"algorithm", std::string(kDigestAlgorithm)},
        {"checkpoint",
         {{"kind", std::string(to_string(record.checkpoint.kind))}, {"instance", record.checkpoint.instance}}},
        {"raw_digest", record.raw_digest.hex()},
        {"content_manifest", manifest_to_json(record.content_manifest)},
        {"stability",
         {{"verdict", std::string(to_string(record.stability.verdict))},
          {"raw_digests", std::move(raw)},
          {"content_manifest_digests", std::move(content)},
          {"payload_is_archive", record.stability.payload_is_archive}}},
        {"source_link", record.source_link},
        {"sealed_at", record.sealed_at},
        {"sealed_by", record.sealed_by},
    };
}

HashRecord record_from_json(const nlohmann::json& j) {
    HashRecord r;
    r.checkpoint.kind = checkpoint_kind_from_string(j.at("checkpoint").at("kind").get<std::string>());
    r.checkpoint.instance = j.at("checkpoint").at("instance").get<int>();
    r.raw_digest = Digest::from_hex(j.at("raw_digest").get<std::string>());
    r.content_manifest = manifest_from_json(j.at("content_manifest"));
    const auto& st = j.at("stability");
    r.stability.verdict = stability_verdict_from_string(st.at("verdict").get<std::string>());
    for (const auto& d : st.at("raw_digests")) {
        r.stability.raw_digests.push_back(Digest::from_hex(d.get<std::string>()));
    }
    for (const auto& d : st.at("content_manifest_digests")) {
        r.stability.content_manifest_digests.push_back(Digest::from_hex(d.get<std::string>()));
    }
    r.stability.payload_is_archive = st.at("payload_is_archive").get<bool>();
    r.source_link = j.at("source_link").get<std::string>();
    r.sealed_at = j.at("sealed_at").get<std::int64_t>();
    r.sealed_by = j.at("sealed_by").get<std::string>();
    return r;
}

ComparisonOutcome compare_records(const HashRecord& a, const HashRecord& b, ComparisonMode mode) {
    bool match = mode == ComparisonMode::Raw
                     ? a.raw_digest == b.raw_digest
                     : a.content_manifest.manifest_digest() == b.content_manifest.manifest_digest();
    return match ? ComparisonOutcome::Match : ComparisonOutcome::Mismatch;
}

const HashRecord* ReviewCase::find_record(CheckpointKind kind, int instance) const {
    for (const auto& r : records) {
        if (r.checkpoint.kind == kind && r.checkpoint.instance == instance) return &r;
    }
    return nullptr;
}

const HashRecord* ReviewCase::latest_record(CheckpointKind kind) const {
    const HashRecord* out = nullptr;
    for (const auto& r : records) {
        if (r.checkpoint.kind == kind) out = &r;
    }
    return out;
}

const HashRecord* ReviewCase::baseline_record() const {
    return baseline_index ? &records[*baseline_index] : nullptr;
}

const Participant* ReviewCase::find_participant(const std::string& name) const {
    for (const auto& p : participants) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

bool ReviewCase::has_participant(const std::string& name, Role role) const {
    for (const auto& p : participants) {
        if (p.name == name && p.role == role) return true;
    }
    return false;
}

const ManipulationFinding* ReviewCase::find_finding(int id) const {
    for (const auto& f : findings) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

namespace {

void add_participant_once(ReviewCase& c, Role role, const std::string& name,
                          const std::string& affiliation) {
    for (const auto& p : c.participants) {
        if (p.role == role && p.name == name) return;
    }
    c.participants.push_back(Participant{role, name, affiliation});
}

void set_state(ReviewCase& c, CaseState state) {
    if (c.state != state) {
        c.state = state;
        c.state_trail.push_back(std::string(to_string(state)));
    }
}

}  // namespace

void apply_event(ReviewCase& c, const ReviewEvent& event) {
    if (c.case_id.empty()) c.case_id = event.case_id;
    const nlohmann::json& p = event.payload;
    const std::string& type = event.event_type;

    if (type == "participant_added") {
        add_participant_once(c, role_from_label(p.at("role").get<std::string>()),
                             p.at("name").get<std::string>(), p.at("affiliation").get<std::string>());
    } else if (type == "submitted") {
        c.manuscript_meta = p.at("manuscript_meta");
        c.dataset_ref = dataset_ref_from_json(p.at("dataset_ref"));
        add_participant_once(c, Role::Author, p.at("author").get<std::string>(),
                             p.at("affiliation").get<std::string>());
        set_state(c, CaseState::Submitted);
    } else if (type == "checkpoint_sealed") {
        HashRecord record = record_from_json(p.at("record"));
        if (c.find_record(record.checkpoint.kind, record.checkpoint.instance)) {
            throw Error(ErrorCode::InvalidState,
                        "checkpoint already sealed: " + record.checkpoint.key());
        }
        c.records.push_back(std::move(record));
        if (p.at("baseline_shift").get<bool>()) {
            c.baseline_index = c.records.size() - 1;
        }
        for (const auto& idx : p.at("consume_revisions")) {
            std::size_t i = idx.get<std::size_t>();
            if (i < c.revisions.size()) {
                c.revisions[i].covers_to = c.records.back().checkpoint.key();
            }
        }
        if (!p.at("advance_to").is_null()) {
            set_state(c, case_state_from_string(p.at("advance_to").get<std::string>()));
        }
    } else if (type == "finding_raised") {
        ManipulationFinding f = finding_from_json(p.at("finding"));
        std::vector<Notification> notes;
        for (const auto& n : p.at("notifications")) {
            notes.push_back(Notification{role_from_label(n.at("recipient").get<std::string>()),
                                         n.at("kind").get<std::string>()});
        }
        c.notifications[f.id] = std::move(notes);
        c.findings.push_back(std::move(f));
        if (p.at("suspends").get<bool>()) {
            c.pre_suspension_state =
                case_state_from_string(p.at("pre_suspension_state").get<std::string>());
            set_state(c, CaseState::Suspended);
        }
    } else if (type == "editor_assigned") {
        add_participant_once(c, Role::Editor, p.at("editor").get<std::string>(),
                             p.at("affiliation").get<std::string>());
        set_state(c, CaseState::EditorAssigned);
    } else if (type == "referee_assigned") {
        add_participant_once(c, Role::Editor, p.at("editor").get<std::string>(), "");
        add_participant_once(c, Role::Referee, p.at("referee").get<std::string>(),
                             p.at("referee_affiliation").get<std::string>());
        set_state(c, CaseState::UnderReview);
    } else if (type == "comment_recorded") {
        c.comments.push_back(CommentEntry{role_from_label(p.at("role").get<std::string>()),
                                          p.at("actor").get<std::string>(),
                                          p.at("text").get<std::string>(),
                                          p.at("identity_consent").get<bool>(),
                                          p.at("round").get<int>(), event.at});
    } else if (type == "revision_requested") {
        c.revision_round += 1;
        set_state(c, CaseState::RevisionRequested);
    } else if (type == "revision_declared") {
        c.revisions.push_back(DataRevision{p.at("author").get<std::string>(),
                                           p.at("note").get<std::string>(), std::nullopt,
                                           p.at("covers_from").get<std::string>(), std::nullopt,
                                           event.at});
    } else if (type == "revision_approved") {
        std::size_t i = p.at("revision_index").get<std::size_t>();
        if (i >= c.revisions.size()) {
            throw Error(ErrorCode::NoPendingRevision, "revision index out of range");
        }
        c.revisions[i].approved_by = p.at("editor").get<std::string>();
    } else if (type == "revision_submitted") {
        set_state(c, CaseState::Revised);
    } else if (type == "review_completed") {
        set_state(c, CaseState::DecisionPending);
    } else if (type == "decision_recorded") {
        set_state(c, p.at("decision").get<std::string>() == "Accept" ? CaseState::Accepted
                                                                     : CaseState::Rejected);
    } else if (type == "published") {
        c.published_at = event.at;
        set_state(c, CaseState::Published);
    } else if (type == "finding_resolved") {
        int id = p.at("finding_id").get<int>();
        for (auto& f : c.findings) {
            if (f.id == id) {
                f.disposition = Disposition::Resolved;
                f.resolution = FindingResolution{
                    resolution_verdict_from_string(p.at("verdict").get<std::string>()),
                    p.at("note").get<std::string>(), p.at("editor").get<std::string>(), event.at};
            }
        }
        if (p.at("resume").get<bool>() && c.state == CaseState::Suspended && c.pre_suspension_state) {
            CaseState back = *c.pre_suspension_state;
            c.pre_suspension_state.reset();
            set_state(c, back);
        }
    } else {
        throw Error(ErrorCode::SchemaInvalid, "unknown event type: " + type);
    }
}

nlohmann::json case_snapshot(const ReviewCase& c) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : c.records) records.push_back(record_to_json(r));

    nlohmann::json revisions = nlohmann::json::array();
    for (const auto& r : c.revisions) {
        nlohmann::json j{{"declared_by", r.declared_by}, {"note", r.note},
                         {"approved_by", nullptr},       {"covers_from", r.covers_from},
                         {"covers_to", nullptr},         {"declared_at", r.declared_at}};
        if (r.approved_by) j["approved_by"] = *r.approved_by;
        if (r.covers_to) j["covers_to"] = *r.covers_to;
        revisions.push_back(std::move(j));
    }

    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : c.findings) findings.push_back(finding_to_json(f));

    nlohmann::json participants = nlohmann::json::array();
    for (const auto& p : c.participants) {
        participants.push_back({{"role", std::string(role_label(p.role))},
                                {"name", p.name},
                                {"affiliation", p.affiliation}});
    }

    nlohmann::json comments = nlohmann::json::array();
    for (const auto& cm : c.comments) {
        comments.push_back({{"role", std::string(role_label(cm.author_role))},
                            {"actor", cm.actor},
                            {"text", cm.text},
                            {"identity_consent", cm.identity_consent},
                            {"round", cm.round},
                            {"at", cm.at}});
    }

    nlohmann::json notifications = nlohmann::json::object();
    for (const auto& [id, notes] : c.notifications) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& n : notes) {
            list.push_back({{"recipient", std::string(role_label(n.recipient))}, {"kind", n.message_kind}});
        }
        notifications[std::to_string(id)] = std::move(list);
    }

    nlohmann::json snapshot{
        {"case_id", c.case_id},
        {"state", std::string(to_string(c.state))},
        {"state_trail", c.state_trail},
        {"manuscript_meta", c.manuscript_meta},
        {"dataset_ref", dataset_ref_to_json(c.dataset_ref)},
        {"records", std::move(records)},
        {"revisions", std::move(revisions)},
        {"findings", std::move(findings)},
        {"participants", std::move(participants)},
        {"comments", std::move(comments)},
        {"notifications", std::move(notifications)},
        {"revision_round", c.revision_round},
        {"baseline", nullptr},
        {"pre_suspension_state", nullptr},
        {"published_at", nullptr},
    };
    if (c.baseline_index) snapshot["baseline"] = c.records[*c.baseline_index].checkpoint.key();
    if (c.pre_suspension_state) {
        snapshot["pre_suspension_state"] = std::string(to_string(*c.pre_suspension_state));
    }
    if (c.published_at) snapshot["published_at"] = *c.published_at;
    return snapshot;
}

ReviewEngine::ReviewEngine(std::string case_id, Clock* clock)
    : clock_(clock ? clock : &system_clock()) {
    case_.case_id = std::move(case_id);
}

ReviewEngine ReviewEngine::from_log(EventLog log, Clock* clock) {
    ReviewEngine engine("", clock);
    engine.case_ = replay(log);
    engine.log_ = std::move(log);
    return engine;
}

ReviewCase ReviewEngine::replay(const EventLog& log) {
    ReviewCase c;
    for (const auto& e : log.events()) {
        apply_event(c, e);
    }
    return c;
}

void ReviewEngine::apply_and_store(Role actor_role, const std::string& actor,
                                   const std::string& event_type, nlohmann::json payload) {
    const ReviewEvent& e =
        log_.append(case_.case_id, actor_role, actor, event_type, std::move(payload), clock_->now());
    apply_event(case_, e);
}

void ReviewEngine::require_state(CaseState expected, const char* op) const {
    if (case_.state != expected) {
        throw Error(ErrorCode::InvalidState, std::string(op) + " requires state " +
                                                 std::string(to_string(expected)) + ", case is " +
                                                 std::string(to_string(case_.state)));
    }
}

void ReviewEngine::require_editor(const std::string& name, const char* op) const {
    if (!case_.has_participant(name, Role::Editor)) {
        throw Error(ErrorCode::NotEditor, std::string(op) + ": " + name + " is not a recorded editor");
    }
}

void ReviewEngine::add_participant(Role role, const std::string& name, const std::string& affiliation) {
    apply_and_store(role, name, "participant_added",
                    {{"role", std::string(role_label(role))}, {"name", name}, {"affiliation", affiliation}});
}

void ReviewEngine::submit(const nlohmann::json& manuscript_meta, const DatasetRef& dataset_ref,
                          const std::string& author, const std::string& affiliation) {
    require_state(CaseState::Draft, "submit");
    if (dataset_ref.download_link.empty() || dataset_ref.landing_url.empty()) {
        throw Error(ErrorCode::MissingDatasetRef,
                    "submission requires a dataset with landing and download links");
    }
    apply_and_store(Role::Author, author, "submitted",
                    {{"author", author},
                     {"affiliation", affiliation},
                     {"manuscript_meta", manuscript_meta},
                     {"dataset_ref", dataset_ref_to_json(dataset_ref)}});
}

int ReviewEngine::raise_finding(ManipulationFinding finding, bool suspends, CaseState pre_suspension,
                                Role reporter_role, const std::string& reporter) {
    finding.id = static_cast<int>(case_.findings.size()) + 1;
    finding.raised_by = reporter;
    finding.raised_at = clock_->now();
    finding.disposition = Disposition::Open;

    nlohmann::json notes = nlohmann::json::array();
    for (const auto& n : route_incident(finding)) {
        notes.push_back({{"recipient", std::string(role_label(n.recipient))}, {"kind", n.message_kind}});
    }
    nlohmann::json payload{{"finding", finding_to_json(finding)},
                           {"notifications", std::move(notes)},
                           {"suspends", suspends},
                           {"pre_suspension_state", nullptr}};
    if (suspends) {
        payload["pre_suspension_state"] = std::string(to_string(pre_suspension));
    }
    apply_and_store(reporter_role, reporter, "finding_raised", std::move(payload));
    return finding.id;
}

SealOutcome ReviewEngine::seal_checkpoint(CheckpointKind kind, Connector& connector, int probe_n,
                                          const std::string& actor) {
    CaseState start_state = case_.state;
    CaseState required;
    std::optional<CaseState> advance;
    switch (kind) {
        case CheckpointKind::Submission:
            required = CaseState::Submitted;
            advance = CaseState::SealedSubmission;
            break;
        case CheckpointKind::Revision:
            required = CaseState::Revised;
            advance = CaseState::SealedRevision;
            break;
        case CheckpointKind::Acceptance:
            required = CaseState::Accepted;
            advance = CaseState::SealedAcceptance;
            break;
        case CheckpointKind::PostPublication:
            required = CaseState::Published;
            advance = std::nullopt;  // audits never change the published state
            break;
    }
    require_state(required, "seal_checkpoint");

    int instance = 1;
    for (const auto& r : case_.records) {
        if (r.checkpoint.kind == kind) instance = std::max(instance, r.checkpoint.instance + 1);
    }
    const std::string& link = case_.dataset_ref.download_link;

    StabilityResult probe;
    try {
        probe = probe_stability([&](int) { return connector.download(link).bytes; }, probe_n);
    } catch (const Error& fetch_error) {
        ClassifyContext ctx;
        ctx.stage = kind;
        ctx.fetch = fetch_error.cause() == ErrorCode::NotFound ? FetchStatus::NotFound
                                                               : FetchStatus::TransportFailed;
        ManipulationFinding finding = *classify(ctx);
        finding.evidence = {"link:" + link};
        finding.note = std::string("data not retrievable while sealing ") +
                       std::string(to_string(kind)) + ": " + fetch_error.what();
        int id = raise_finding(std::move(finding), true, start_state, Role::Secretariat, actor);
        return SealOutcome{std::nullopt, id, case_.state};
    }

    HashRecord record;
    record.checkpoint = Checkpoint{kind, instance};
    record.raw_digest = probe.raw_digests.front();
    record.content_manifest = probe.content_manifests.front();
    record.stability = summarize(probe);
    record.source_link = link;
    record.sealed_at = clock_->now();
    record.sealed_by = actor;

    const HashRecord* baseline = nullptr;
    if (kind == CheckpointKind::Revision || kind == CheckpointKind::Acceptance) {
        baseline = case_.baseline_record();
    } else if (kind == CheckpointKind::PostPublication) {
        baseline = case_.latest_record(CheckpointKind::Acceptance);
    }

    ClassifyContext ctx;
    ctx.stage = kind;
    ctx.stability = probe.verdict;
    nlohmann::json comparison = nullptr;
    if (baseline) {
        ctx.raw_changed = compare_records(record, *baseline, ComparisonMode::Raw) ==
                          ComparisonOutcome::Mismatch;
        ctx.content_changed = compare_records(record, *baseline, ComparisonMode::ContentNormalized) ==
                              ComparisonOutcome::Mismatch;
        comparison = nlohmann::json{{"baseline", baseline->checkpoint.key()},
                                    {"raw", ctx.raw_changed ? "Mismatch" : "Match"},
                                    {"content", ctx.content_changed ? "Mismatch" : "Match"}};
    }
    for (const auto& rev : case_.revisions) {
        if (!rev.consumed()) {
            ctx.revision_declared = true;
            if (rev.effective()) ctx.revision_approved = true;
        }
    }

    std::optional<ManipulationFinding> draft = classify(ctx);
    if (draft && draft->category == FindingCategory::ContainerNondeterminismAdvisory) {
        // One open advisory per case is enough; every extra seal would
        // otherwise repeat it.
        for (const auto& f : case_.findings) {
            if (f.category == FindingCategory::ContainerNondeterminismAdvisory &&
                f.disposition == Disposition::Open) {
                draft.reset();
                break;
            }
        }
    }

    bool suspends = false;
    if (draft) {
        suspends = draft->category == FindingCategory::DataFalsification ||
                   draft->category == FindingCategory::UnauthorizedChangeDuringReview;
    }

    bool baseline_shift =
        !suspends && ((kind == CheckpointKind::Submission && instance == 1) ||
                      kind == CheckpointKind::Revision);
    nlohmann::json consumed = nlohmann::json::array();
    if (kind == CheckpointKind::Revision && !suspends) {
        for (std::size_t i = 0; i < case_.revisions.size(); ++i) {
            if (!case_.revisions[i].consumed()) consumed.push_back(i);
        }
    }

    nlohmann::json payload{{"record", record_to_json(record)},
                           {"advance_to", nullptr},
                           {"baseline_shift", baseline_shift},
                           {"consume_revisions", std::move(consumed)},
                           {"comparison", std::move(comparison)}};
    if (!suspends && advance) {
        payload["advance_to"] = std::string(to_string(*advance));
    }
    apply_and_store(Role::Secretariat, actor, "checkpoint_sealed", std::move(payload));

    std::optional<int> finding_id;
    if (draft) {
        draft->evidence.push_back("record:" + record.checkpoint.key());
        if (baseline) draft->evidence.push_back("baseline:" + baseline->checkpoint.key());
        draft->note = std::string(draft->info().label) + " detected while sealing " +
                      record.checkpoint.key();
        finding_id = raise_finding(std::move(*draft), suspends, start_state, Role::Secretariat, actor);
    }
    return SealOutcome{record.checkpoint, finding_id, case_.state};
}

void ReviewEngine::assign_editor(const std::string& editor, const std::string& affiliation) {
    require_state(CaseState::SealedSubmission, "assign_editor");
    apply_and_store(Role::Editor, editor, "editor_assigned",
                    {{"editor", editor}, {"affiliation", affiliation}});
}

void ReviewEngine::assign_referee(const std::string& editor, const std::string& referee,
                                  const std::optional<std::string>& conflict_note,
                                  const std::string& referee_affiliation) {
    if (case_.state != CaseState::SealedSubmission && case_.state != CaseState::EditorAssigned) {
        throw Error(ErrorCode::InvalidState,
                    "assign_referee requires SealedSubmission or EditorAssigned, case is " +
                        std::string(to_string(case_.state)));
    }
    nlohmann::json payload{{"editor", editor},
                           {"referee", referee},
                           {"referee_affiliation", referee_affiliation},
                           {"conflict_note", nullptr}};
    if (conflict_note) payload["conflict_note"] = *conflict_note;  // audit trail, not a gate
    apply_and_store(Role::Editor, editor, "referee_assigned", std::move(payload));
}

void ReviewEngine::record_comment(const std::string& actor, Role role, const std::string& text,
                                  bool identity_consent) {
    if (case_.state != CaseState::UnderReview && case_.state != CaseState::RevisionRequested) {
        throw Error(ErrorCode::InvalidState, "comments are only accepted during review, case is " +
                                                 std::string(to_string(case_.state)));
    }
    if (role != Role::Referee && role != Role::Editor) {
        throw Error(ErrorCode::InvalidState, "comments come from referees or editors");
    }
    apply_and_store(role, actor, "comment_recorded",
                    {{"actor", actor},
                     {"role", std::string(role_label(role))},
                     {"text", text},
                     {"identity_consent", identity_consent},
                     {"round", case_.revision_round + 1}});
}

void ReviewEngine::request_revision(const std::string& editor) {
    require_state(CaseState::UnderReview, "request_revision");
    apply_and_store(Role::Editor, editor, "revision_requested", {{"editor", editor}});
}

void ReviewEngine::declare_data_revision(const std::string& author, const std::string& note) {
    require_state(CaseState::RevisionRequested, "declare_data_revision");
    const HashRecord* baseline = case_.baseline_record();
    apply_and_store(Role::Author, author, "revision_declared",
                    {{"author", author},
                     {"note", note},
                     {"covers_from", baseline ? baseline->checkpoint.key() : "submission/1"}});
}

void ReviewEngine::approve_data_revision(const std::string& editor) {
    std::optional<std::size_t> pending;
    for (std::size_t i = 0; i < case_.revisions.size(); ++i) {
        if (!case_.revisions[i].consumed() && !case_.revisions[i].effective()) pending = i;
    }
    if (!pending) {
        throw Error(ErrorCode::NoPendingRevision, "no declared revision awaits approval");
    }
    apply_and_store(Role::Editor, editor, "revision_approved",
                    {{"editor", editor}, {"revision_index", *pending}});
}

void ReviewEngine::submit_revision(const std::string& author) {
    require_state(CaseState::RevisionRequested, "submit_revision");
    apply_and_store(Role::Author, author, "revision_submitted", {{"author", author}});
}

void ReviewEngine::complete_review(const std::string& editor) {
    if (case_.state != CaseState::UnderReview && case_.state != CaseState::SealedRevision) {
        throw Error(ErrorCode::InvalidState,
                    "complete_review requires UnderReview or SealedRevision, case is " +
                        std::string(to_string(case_.state)));
    }
    apply_and_store(Role::Editor, editor, "review_completed", {{"editor", editor}});
}

void ReviewEngine::decide(const std::string& editor, Decision decision) {
    require_state(CaseState::DecisionPending, "decide");
    apply_and_store(Role::Editor, editor, "decision_recorded",
                    {{"editor", editor}, {"decision", decision == Decision::Accept ? "Accept" : "Reject"}});
}

SealOutcome ReviewEngine::accept_and_seal(Connector& connector, int probe_n, const std::string& actor) {
    return seal_checkpoint(CheckpointKind::Acceptance, connector, probe_n, actor);
}

void ReviewEngine::publish(const std::string& actor,
                           const std::function<void(const ReviewCase&)>& report_sink) {
    require_state(CaseState::SealedAcceptance, "publish");
    apply_and_store(Role::Secretariat, actor, "published", nlohmann::json::object());
    if (report_sink) report_sink(case_);
}

int ReviewEngine::flag_policy_finding(const std::string& reporter, FindingCategory category,
                                      const std::string& note, std::vector<std::string> evidence) {
    const Participant* p = case_.find_participant(reporter);
    if (!p) {
        throw Error(ErrorCode::UnknownReporter, reporter + " is not a recorded participant");
    }
    if (!is_policy_flaggable(category)) {
        throw Error(ErrorCode::CategoryNotPolicyOnly,
                    std::string(category_info(category).label) +
                        " is detected by the engine, not flagged by participants");
    }
    ManipulationFinding finding;
    finding.category = category;
    finding.note = note;
    finding.evidence = std::move(evidence);
    return raise_finding(std::move(finding), false, case_.state, p->role, reporter);
}

void ReviewEngine::resolve_finding(const std::string& editor, int finding_id,
                                   ResolutionVerdict verdict, const std::string& note, bool resume) {
    require_editor(editor, "resolve_finding");
    const ManipulationFinding* finding = case_.find_finding(finding_id);
    if (!finding) {
        throw Error(ErrorCode::UnknownFinding, "no finding with id " + std::to_string(finding_id));
    }
    if (finding->disposition != Disposition::Open) {
        throw Error(ErrorCode::AlreadyResolved, "finding already resolved");
    }
    apply_and_store(Role::Editor, editor, "finding_resolved",
                    {{"editor", editor},
                     {"finding_id", finding_id},
                     {"verdict", std::string(to_string(verdict))},
                     {"note", note},
                     {"resume", resume}});
}

}  // namespace fixrev
