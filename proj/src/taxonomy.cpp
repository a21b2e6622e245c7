#include "fixrev/taxonomy.hpp"

#include "fixrev/errors.hpp"

namespace fixrev {

std::string_view role_label(Role role) {
    switch (role) {
        case Role::Author: return "Author";
        case Role::Referee: return "Referee";
        case Role::Editor: return "Editor";
        case Role::DataRepository: return "Data Repository";
        case Role::Secretariat: return "Secretariat";
    }
    return "Secretariat";
}

Role role_from_label(std::string_view label) {
    if (label == "Author") return Role::Author;
    if (label == "Referee") return Role::Referee;
    if (label == "Editor") return Role::Editor;
    if (label == "Data Repository") return Role::DataRepository;
    if (label == "Secretariat") return Role::Secretariat;
    throw Error(ErrorCode::SchemaInvalid, "unknown role: " + std::string(label));
}

std::string_view measure_label(Measure m) {
    switch (m) {
        case Measure::HashValue: return "Hash value";
        case Measure::JournalPolicy: return "Journal policy";
        case Measure::PeerReviewReport: return "Peer review report";
        case Measure::SystemImplementation: return "System implementation";
    }
    return "Journal policy";
}

const std::vector<CategoryInfo>& all_categories() {
    static const std::vector<CategoryInfo> table = {
        {FindingCategory::FakeDataRegistration, "fake-data-registration", "Fake data registration",
         Role::Author, "Pre-1", Measure::JournalPolicy, false, true},
        {FindingCategory::UnauthorizedChangeDuringReview, "unauthorized-change-during-review",
         "Unauthorized data change during the review process", Role::Author, "2-13", Measure::HashValue,
         true, true},
        {FindingCategory::PostAcceptanceChange, "post-acceptance-change",
         "Data change after the acceptance of the paper", Role::Author, "14-17", Measure::HashValue, true,
         true},
        {FindingCategory::DataPlagiarism, "data-plagiarism", "Data plagiarism", Role::Referee, "9",
         Measure::JournalPolicy, false, true},
        {FindingCategory::InductiveComments, "inductive-comments",
         "Comments that induce data edits for the referee's benefit", Role::Referee, "10",
         Measure::PeerReviewReport, false, true},
        {FindingCategory::InappropriateRefereeNomination, "inappropriate-referee-nomination",
         "Inappropriate referee nomination", Role::Editor, "7", Measure::PeerReviewReport, false, true},
        {FindingCategory::InappropriateDecision, "inappropriate-decision",
         "Notification of inappropriate review results", Role::Editor, "12", Measure::PeerReviewReport,
         false, true},
        {FindingCategory::DataLoss, "data-loss", "Data loss", Role::DataRepository, "Mainly after 13",
         Measure::HashValue, true, true},
        {FindingCategory::DataFalsification, "data-falsification", "Data falsification",
         Role::DataRepository, "Mainly after 13", Measure::HashValue, true, true},
        {FindingCategory::DataFabrication, "data-fabrication", "Data fabrication", Role::DataRepository,
         "Pre-1 and after 13", Measure::JournalPolicy, false, true},
        {FindingCategory::ProceduralError, "procedural-error", "Procedural error", Role::Secretariat,
         "2-17", Measure::SystemImplementation, false, true},
        {FindingCategory::ContainerNondeterminismAdvisory, "container-nondeterminism-advisory",
         "Container nondeterminism advisory", Role::DataRepository, "n/a", Measure::HashValue, true,
         false},
    };
    return table;
}

const CategoryInfo& category_info(FindingCategory category) {
    for (const auto& info : all_categories()) {
        if (info.category == category) return info;
    }
    throw Error(ErrorCode::SchemaInvalid, "unknown finding category");
}

FindingCategory category_from_slug(std::string_view slug) {
    for (const auto& info : all_categories()) {
        if (info.slug == slug) return info.category;
    }
    throw Error(ErrorCode::SchemaInvalid, "unknown finding category: " + std::string(slug));
}

bool is_policy_flaggable(FindingCategory category) {
    switch (category) {
        case FindingCategory::FakeDataRegistration:
        case FindingCategory::DataPlagiarism:
        case FindingCategory::InductiveComments:
        case FindingCategory::InappropriateRefereeNomination:
        case FindingCategory::InappropriateDecision:
        case FindingCategory::DataFabrication:
        case FindingCategory::ProceduralError:
            return true;
        default:
            return false;
    }
}

std::string_view to_string(Disposition d) {
    switch (d) {
        case Disposition::Open: return "Open";
        case Disposition::Resolved: return "Resolved";
        case Disposition::Escalated: return "Escalated";
    }
    return "Open";
}

Disposition disposition_from_string(std::string_view s) {
    if (s == "Open") return Disposition::Open;
    if (s == "Resolved") return Disposition::Resolved;
    if (s == "Escalated") return Disposition::Escalated;
    throw Error(ErrorCode::SchemaInvalid, "unknown disposition: " + std::string(s));
}

std::string_view to_string(ResolutionVerdict v) {
    switch (v) {
        case ResolutionVerdict::Malicious: return "Malicious";
        case ResolutionVerdict::Negligent: return "Negligent";
        case ResolutionVerdict::TechnicalIssue: return "TechnicalIssue";
        case ResolutionVerdict::Unfounded: return "Unfounded";
    }
    return "Unfounded";
}

ResolutionVerdict resolution_verdict_from_string(std::string_view s) {
    if (s == "Malicious") return ResolutionVerdict::Malicious;
    if (s == "Negligent") return ResolutionVerdict::Negligent;
    if (s == "TechnicalIssue") return ResolutionVerdict::TechnicalIssue;
    if (s == "Unfounded") return ResolutionVerdict::Unfounded;
    throw Error(ErrorCode::SchemaInvalid, "unknown resolution verdict: " + std::string(s));
}

nlohmann::json finding_to_json(const ManipulationFinding& finding) {
    const CategoryInfo& info = finding.info();
    nlohmann::json j{
        {"id", finding.id},
        {"category", std::string(info.slug)},
        {"category_label", std::string(info.label)},
        {"role", std::string(role_label(info.role))},
        {"flow_ref", std::string(info.flow_ref)},
        {"measure", std::string(measure_label(info.measure))},
        {"detectable", info.detectable},
        {"table_row", info.table_row},
        {"evidence", finding.evidence},
        {"note", finding.note},
        {"raised_by", finding.raised_by},
        {"raised_at", finding.raised_at},
        {"disposition", std::string(to_string(finding.disposition))},
    };
    if (finding.resolution) {
        j["resolution"] = nlohmann::json{{"verdict", std::string(to_string(finding.resolution->verdict))},
                                         {"note", finding.resolution->note},
                                         {"resolved_by", finding.resolution->resolved_by},
                                         {"resolved_at", finding.resolution->resolved_at}};
    }
    return j;
}

ManipulationFinding finding_from_json(const nlohmann::json& j) {
    ManipulationFinding f;
    f.id = j.at("id").get<int>();
    f.category = category_from_slug(j.at("category").get<std::string>());
    f.evidence = j.at("evidence").get<std::vector<std::string>>();
    f.note = j.at("note").get<std::string>();
    f.raised_by = j.at("raised_by").get<std::string>();
    f.raised_at = j.at("raised_at").get<std::int64_t>();
    f.disposition = disposition_from_string(j.at("disposition").get<std::string>());
    if (j.contains("resolution")) {
        const auto& r = j.at("resolution");
        f.resolution = FindingResolution{
            resolution_verdict_from_string(r.at("verdict").get<std::string>()),
            r.at("note").get<std::string>(), r.at("resolved_by").get<std::string>(),
            r.at("resolved_at").get<std::int64_t>()};
    }
    return f;
}

}  // namespace fixrev
