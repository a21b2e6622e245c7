#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fixrev {

enum class Role { Author, Referee, Editor, DataRepository, Secretariat };

std::string_view role_label(Role role);          // "Data Repository" etc.
Role role_from_label(std::string_view label);

// The incident taxonomy. The first eleven categories are the published
// role-by-role manipulation table, one category per row; the container
// nondeterminism advisory is an engine extension (marked table_row=false in
// every serialized form) covering recompression artifacts that would
// otherwise misread as tampering.
enum class FindingCategory {
    FakeDataRegistration,
    UnauthorizedChangeDuringReview,
    PostAcceptanceChange,
    DataPlagiarism,
    InductiveComments,
    InappropriateRefereeNomination,
    InappropriateDecision,
    DataLoss,
    DataFalsification,
    DataFabrication,
    ProceduralError,
    ContainerNondeterminismAdvisory,
};

inline constexpr int kTableRowCount = 11;

enum class Measure { HashValue, JournalPolicy, PeerReviewReport, SystemImplementation };

std::string_view measure_label(Measure m);       // "Hash value" etc.

struct CategoryInfo {
    FindingCategory category;
    std::string_view slug;        // stable machine id
    std::string_view label;       // row text, verbatim
    Role role;
    std::string_view flow_ref;    // "Flow in Fig. 1" column, verbatim
    Measure measure;
    bool detectable;              // true iff the engine may raise it autonomously
    bool table_row;               // false only for the advisory extension
};

const CategoryInfo& category_info(FindingCategory category);
const std::vector<CategoryInfo>& all_categories();
FindingCategory category_from_slug(std::string_view slug);

// Categories a human participant may flag; the engine never raises these
// itself (they have no hash-comparison signal).
bool is_policy_flaggable(FindingCategory category);

enum class Disposition { Open, Resolved, Escalated };
std::string_view to_string(Disposition d);
Disposition disposition_from_string(std::string_view s);

enum class ResolutionVerdict { Malicious, Negligent, TechnicalIssue, Unfounded };
std::string_view to_string(ResolutionVerdict v);
ResolutionVerdict resolution_verdict_from_string(std::string_view s);

struct FindingResolution {
    ResolutionVerdict verdict = ResolutionVerdict::Unfounded;
    std::string note;
    std::string resolved_by;
    std::int64_t resolved_at = 0;
};

// A classified incident. Role/flow/measure metadata is derived from the
// category and never stored independently, so it cannot drift from the
// table.
struct ManipulationFinding {
    int id = 0;
    FindingCategory category = FindingCategory::ProceduralError;
    std::vector<std::string> evidence;  // record/event references
    std::string note;
    std::string raised_by;              // participant name, or "engine"
    std::int64_t raised_at = 0;
    Disposition disposition = Disposition::Open;
    std::optional<FindingResolution> resolution;

    const CategoryInfo& info() const { return category_info(category); }
};

nlohmann::json finding_to_json(const ManipulationFinding& finding);
ManipulationFinding finding_from_json(const nlohmann::json& j);

}  // namespace fixrev
